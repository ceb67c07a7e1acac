use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qunforge::attacks::{AttackId, AuaVariant};
use qunforge::games::{estimate_win_rate, run_trials, ExperimentResult, GameConfig};

use crate::error::Result;
use crate::experiments::{self, Analytic};
use crate::manifest::{ExperimentManifest, Resolved};
use crate::output;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunParams {
    pub attack: AttackId,
    pub gamma: f64,
    pub aua_variant: AuaVariant,
    pub game: GameConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunArtifact {
    pub experiment: AttackId,
    pub params: RunParams,
    pub trials: usize,
    pub wins: usize,
    pub win_rate: f64,
    pub p_ov: f64,
    pub advantage: f64,
    pub ci95: f64,
    pub seed: u64,
    pub mu_violations: usize,
    pub abstentions: usize,
    pub analytic_advantage: Option<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl RunArtifact {
    pub fn new(r: &Resolved, result: ExperimentResult, analytic: &Analytic) -> Self {
        RunArtifact {
            experiment: r.attack.id,
            params: RunParams {
                attack: r.attack.id,
                gamma: r.effective_gamma,
                aua_variant: r.attack.aua_variant,
                game: r.game.clone(),
            },
            trials: result.trials,
            wins: result.wins,
            win_rate: result.win_rate,
            p_ov: result.p_ov,
            advantage: result.advantage,
            ci95: result.ci95,
            seed: result.seed,
            mu_violations: result.mu_violations,
            abstentions: result.abstentions,
            analytic_advantage: analytic.advantage,
            diagnostics: result.diagnostics,
        }
    }
}

pub fn analytic_for(r: &Resolved) -> Analytic {
    experiments::analytic(
        r.attack.id,
        r.game.primitive.kind,
        r.game.q,
        r.game.mu,
        r.effective_gamma,
    )
}

pub fn execute(r: &Resolved) -> Result<RunArtifact> {
    let result = estimate_win_rate(&r.game, &r.attack)?;
    Ok(RunArtifact::new(r, result, &analytic_for(r)))
}

/// `<out>.transcripts.jsonl` next to the result file.
pub fn transcript_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".transcripts.jsonl");
    out.with_file_name(name)
}

/// Runs the manifest's single point. Returns the serialized artifact; with an
/// output path it is also written there, and `dump_states` adds a transcript
/// file with one JSON object per trial.
pub fn cmd_run(manifest: &ExperimentManifest) -> Result<String> {
    let r = manifest.resolve()?;
    let artifact = execute(&r)?;
    let text = output::to_json_string(&artifact)?;
    if let Some(out) = &manifest.out {
        output::write_text(out, &text)?;
        if manifest.dump_states {
            let mut lines = String::new();
            for t in run_trials(&r.game, &r.attack, r.game.trials)? {
                let _ = writeln!(lines, "{}", serde_json::to_string(&output::envelope(&t)?)?);
            }
            output::write_text(&transcript_path(out), &lines)?;
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_reproducible() {
        let mut m = ExperimentManifest::new(AttackId::Thm5Qea);
        m.trials = Some(200);
        let a = cmd_run(&m).unwrap();
        assert_eq!(a, cmd_run(&m).unwrap());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        for k in ["experiment", "params", "trials", "wins", "win_rate", "p_ov", "advantage", "ci95", "seed"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["schema"], 1);
        assert_eq!(v["experiment"], "thm5-qea");
    }

    #[test]
    fn transcript_file_name() {
        assert_eq!(
            transcript_path(Path::new("out/run.json")),
            PathBuf::from("out/run.json.transcripts.jsonl")
        );
    }
}
