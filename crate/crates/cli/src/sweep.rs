use qunforge::attacks::AttackId;

use crate::error::{CliError, Result};
use crate::manifest::ExperimentManifest;
use crate::output::{self, fmt_num};
use crate::run::{execute, RunArtifact};

/// One CSV row: the point, its closed forms and the Monte-Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub gamma: f64,
    pub analytic_advantage: Option<f64>,
    pub sqrt_ps1: Option<f64>,
    pub printed_curve: Option<f64>,
    pub printed_squared: Option<f64>,
    pub run: RunArtifact,
}

pub fn sweep_rows(manifest: &ExperimentManifest) -> Result<Vec<SweepRow>> {
    manifest
        .sweep_points()
        .into_iter()
        .map(|(mu, gamma)| {
            let r = manifest.resolve_at(mu, gamma)?;
            let a = crate::run::analytic_for(&r);
            let run = execute(&r)?;
            Ok(SweepRow {
                mu: r.game.mu,
                gamma: r.effective_gamma,
                analytic_advantage: a.advantage,
                sqrt_ps1: a.sqrt_ps1,
                printed_curve: a.printed_curve,
                printed_squared: a.printed_squared,
                run,
            })
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// CSV text. Example 1 sweeps carry the ground-truth `√P_s1` and both printed
/// curves next to the empirical columns.
pub fn to_csv(experiment: AttackId, rows: &[SweepRow]) -> Result<String> {
    let extended = experiment == AttackId::Example1DoubleQea;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["mu", "gamma", "analytic_advantage"];
    if extended {
        header.extend(["sqrt_ps1", "printed_curve", "printed_squared"]);
    }
    header.extend(["trials", "wins", "win_rate", "p_ov", "empirical_advantage", "ci95", "seed"]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![fmt_num(r.mu), fmt_num(r.gamma), opt(r.analytic_advantage)];
        if extended {
            rec.extend([opt(r.sqrt_ps1), opt(r.printed_curve), opt(r.printed_squared)]);
        }
        rec.extend([
            r.run.trials.to_string(),
            r.run.wins.to_string(),
            fmt_num(r.run.win_rate),
            fmt_num(r.run.p_ov),
            fmt_num(r.run.advantage),
            fmt_num(r.run.ci95),
            r.run.seed.to_string(),
        ]);
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Manifest(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cmd_sweep(manifest: &ExperimentManifest) -> Result<String> {
    let text = to_csv(manifest.experiment, &sweep_rows(manifest)?)?;
    if let Some(out) = &manifest.out {
        output::write_text(out, &text)?;
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_axis_matches_run() {
        let mut m = ExperimentManifest::new(AttackId::TrivialOverlap);
        m.trials = Some(300);
        let rows = sweep_rows(&m).unwrap();
        assert_eq!(rows.len(), 1);
        let single = execute(&m.resolve().unwrap()).unwrap();
        assert_eq!(rows[0].run, single);
        let csv = to_csv(m.experiment, &rows).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn example1_columns_present() {
        let mut m = ExperimentManifest::new(AttackId::Example1DoubleQea);
        m.trials = Some(50);
        m.sweep.gamma = vec![0.3, 0.5];
        let csv = cmd_sweep(&m).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().contains("printed_curve,printed_squared"));
        assert!(lines.next().unwrap().starts_with("0.91,0.3,"));
    }
}
