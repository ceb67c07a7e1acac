use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::transcript::{GameTranscript, Reason};
use super::{run_game, AdversaryFactory, GameConfig};
use crate::error::Result;
use crate::parallel;
use crate::seeds;

/// Aggregate of `N` independent games. `ci95 = 1.96·√(p(1−p)/N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub trials: usize,
    pub wins: usize,
    pub win_rate: f64,
    pub p_ov: f64,
    pub advantage: f64,
    pub ci95: f64,
    pub seed: u64,
    pub mu_violations: usize,
    pub abstentions: usize,
    /// Per-trial adversary diagnostics, averaged over the trials reporting them.
    pub diagnostics: BTreeMap<String, f64>,
}

pub fn trial_seed(master: u64, index: u64) -> u64 {
    seeds::derive(master, "trial", index)
}

pub fn run_trial(cfg: &GameConfig, factory: &dyn AdversaryFactory, index: u64) -> Result<GameTranscript> {
    let mut adv = factory.create();
    let mut t = run_game(cfg, adv.as_mut(), trial_seed(cfg.seed, index))?;
    t.trial = index;
    Ok(t)
}

/// Full transcripts of the first `count` trials.
pub fn run_trials(
    cfg: &GameConfig,
    factory: &dyn AdversaryFactory,
    count: usize,
) -> Result<Vec<GameTranscript>> {
    parallel::map_indexed(count, |i| run_trial(cfg, factory, i as u64))
        .into_iter()
        .collect()
}

struct Summary {
    verdict: u8,
    reason: Reason,
    p_ov: f64,
    diagnostics: Vec<(String, f64)>,
}

fn summarize(cfg: &GameConfig, factory: &dyn AdversaryFactory, i: usize) -> Result<Summary> {
    let t = run_trial(cfg, factory, i as u64)?;
    Ok(Summary {
        verdict: t.verdict,
        reason: t.reason,
        p_ov: t.p_ov,
        diagnostics: t.diagnostics,
    })
}

fn aggregate(cfg: &GameConfig, rows: Vec<Result<Summary>>) -> Result<ExperimentResult> {
    let n = rows.len();
    let (mut wins, mut viol, mut abst) = (0usize, 0usize, 0usize);
    let mut p_ov = 0.0;
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for row in rows {
        let s = row?;
        wins += usize::from(s.verdict == 1);
        viol += usize::from(s.reason == Reason::MuViolation);
        abst += usize::from(s.reason == Reason::Abstained);
        p_ov += s.p_ov;
        for (k, v) in s.diagnostics {
            let e = sums.entry(k).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    let win_rate = wins as f64 / n as f64;
    let p_ov = p_ov / n as f64;
    Ok(ExperimentResult {
        trials: n,
        wins,
        win_rate,
        p_ov,
        advantage: win_rate - p_ov,
        ci95: 1.96 * (win_rate * (1.0 - win_rate) / n as f64).sqrt(),
        seed: cfg.seed,
        mu_violations: viol,
        abstentions: abst,
        diagnostics: sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect(),
    })
}

/// `cfg.trials` games, data-parallel when the `parallel` feature is on.
/// Per-trial seeds depend only on `(cfg.seed, index)` and results are folded
/// in index order, so the outcome does not depend on scheduling.
pub fn estimate_win_rate(cfg: &GameConfig, factory: &dyn AdversaryFactory) -> Result<ExperimentResult> {
    cfg.validate()?;
    aggregate(cfg, parallel::map_indexed(cfg.trials, |i| summarize(cfg, factory, i)))
}

pub fn estimate_win_rate_serial(
    cfg: &GameConfig,
    factory: &dyn AdversaryFactory,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    aggregate(
        cfg,
        parallel::map_indexed_serial(cfg.trials, |i| summarize(cfg, factory, i)),
    )
}
