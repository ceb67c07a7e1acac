//! Full acceptance run rendered as a primitive × unforgeability-level matrix.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::acceptance::{run_all, Budget, CriterionOutcome};
use crate::error::Result;
use crate::output;

pub const LEVELS: [&str; 6] = ["1-qGEU", "mu-qGEU", "1-qGSU", "mu-qGSU", "qGUU", "qGUU-aua"];

/// Experimentally checkable cells: `(row, level, criterion, status when it passes)`.
pub const CELLS: [(&str, &str, u8, &str); 4] = [
    ("classical det", "mu-qGEU", 1, "attack succeeds"),
    ("classical det", "mu-qGSU", 4, "attack succeeds"),
    ("classical rand (Construction 1)", "mu-qGSU", 7, "attack fails"),
    ("quantum det", "qGUU-aua", 8, "attack succeeds"),
];

pub const ROWS: [&str; 4] = [
    "classical det",
    "classical rand (Construction 1)",
    "quantum det",
    "quantum rand (Construction 2)",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub primitive: &'static str,
    pub level: &'static str,
    pub criterion: u8,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
    pub matrix: Vec<Cell>,
}

impl Summary {
    pub fn failed(&self) -> usize {
        self.criteria.iter().filter(|c| !c.passed).count()
    }
}

fn cells(criteria: &[CriterionOutcome]) -> Vec<Cell> {
    CELLS
        .iter()
        .map(|&(row, level, id, ok)| {
            let passed = criteria.iter().any(|c| c.id == id && c.passed);
            Cell {
                primitive: row,
                level,
                criterion: id,
                status: if passed {
                    ok.to_string()
                } else {
                    format!("criterion {id} failed")
                },
            }
        })
        .collect()
}

pub fn render_matrix(matrix: &[Cell]) -> String {
    let width = 34;
    let mut s = format!("{:<width$}", "primitive \\ level");
    for l in LEVELS {
        let _ = write!(s, " | {l:<22}");
    }
    s.truncate(s.trim_end().len());
    s.push('\n');
    for row in ROWS {
        let _ = write!(s, "{row:<width$}");
        for l in LEVELS {
            let cell = matrix
                .iter()
                .find(|c| c.primitive == row && c.level == l)
                .map(|c| c.status.as_str())
                .unwrap_or("-");
            let _ = write!(s, " | {cell:<22}");
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
    }
    s
}

pub fn report(summary: &Summary) -> String {
    let mut s = String::new();
    for c in &summary.criteria {
        let _ = writeln!(s, "{}", c.line());
    }
    s.push('\n');
    s.push_str(&render_matrix(&summary.matrix));
    s
}

/// Runs every criterion. With `out`, writes `acceptance.json`, `matrix.txt`
/// and any per-criterion artifacts there.
pub fn cmd_reproduce_all(seed: u64, budget: Budget, out: Option<&Path>) -> Result<Summary> {
    let criteria = run_all(seed, budget)?;
    let summary = Summary {
        seed,
        trials: budget.trials,
        passed: criteria.iter().all(|c| c.passed),
        matrix: cells(&criteria),
        criteria,
    };
    if let Some(dir) = out {
        output::write_text(&dir.join("acceptance.json"), &output::to_json_string(&summary)?)?;
        output::write_text(&dir.join("matrix.txt"), &report(&summary))?;
        for c in &summary.criteria {
            if let Some((name, text)) = &c.artifact {
                output::write_text(&dir.join(name), text)?;
            }
        }
    }
    Ok(summary)
}
