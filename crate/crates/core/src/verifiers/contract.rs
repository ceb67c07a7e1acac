use serde::{Deserialize, Serialize};

use super::quantum::QuantumTest;
use crate::error::Result;
use crate::qstate::{Layout, StateVector};
use crate::seeds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractRow {
    pub kappa: usize,
    pub fidelity: f64,
    pub analytic: f64,
    pub empirical: f64,
}

/// Grid evaluation of `f(κ, κ, F)` and the limit conditions it violates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractReport {
    pub test: String,
    pub trials: usize,
    pub rows: Vec<ContractRow>,
    /// `Err(κ)` per grid κ, in grid order.
    pub err: Vec<(usize, f64)>,
    pub monotone_in_f: bool,
    pub violations: Vec<String>,
}

impl ContractReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Qubit pair with `|⟨a|b⟩|² = f`.
fn pair(f: f64) -> Result<(StateVector, StateVector)> {
    let l = Layout::single("q", 1);
    Ok((
        StateVector::zero(l.clone())?,
        StateVector::from_real(&[f.sqrt(), (1.0 - f).sqrt()], l)?,
    ))
}

/// Runs the test `trials` times per grid point on qubit pairs of the given
/// fidelity. Limits are checked with a `4σ` Monte-Carlo allowance:
/// `f(κ, 1) = 1`; `f(κ_max, F) = F`; empirical `f(κ, 0) = Err(κ)`.
pub fn test_contract_check(
    test: &dyn QuantumTest,
    f_grid: &[f64],
    kappa_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ContractReport> {
    let mut rows = Vec::new();
    for (ki, &kappa) in kappa_grid.iter().enumerate() {
        for (fi, &f) in f_grid.iter().enumerate() {
            let (a, b) = pair(f)?;
            let (ra, rb) = (a.density(), b.density());
            let mut rng = seeds::rng_for(seed, "contract", (ki * f_grid.len() + fi) as u64);
            let mut acc = 0usize;
            for _ in 0..trials {
                if test.run(&ra, &rb, kappa, kappa, &mut rng)? {
                    acc += 1;
                }
            }
            rows.push(ContractRow {
                kappa,
                fidelity: f,
                analytic: test.acceptance_probability(kappa, kappa, f),
                empirical: acc as f64 / trials as f64,
            });
        }
    }
    let slack = |p: f64| 4.0 * (p * (1.0 - p) / trials as f64).sqrt() + 1e-12;
    let mut violations = Vec::new();
    let kmax = kappa_grid.iter().copied().max().unwrap_or(1);
    for row in &rows {
        if (row.empirical - row.analytic).abs() > slack(row.analytic).max(4.0 / trials as f64) {
            violations.push(format!(
                "κ={} F={}: empirical {} disagrees with f = {}",
                row.kappa, row.fidelity, row.empirical, row.analytic
            ));
        }
        if row.fidelity == 1.0 && (row.analytic - 1.0).abs() > 1e-12 {
            violations.push(format!("κ={}: f(F→1) = {} ≠ 1", row.kappa, row.analytic));
        }
        if row.kappa == kmax && (row.analytic - row.fidelity).abs() > 1e-6 {
            violations.push(format!(
                "κ={} F={}: f = {} does not approach F as κ grows",
                row.kappa, row.fidelity, row.analytic
            ));
        }
    }
    let err: Vec<(usize, f64)> = kappa_grid.iter().map(|&k| (k, test.err(k, k))).collect();
    let mut monotone = true;
    for &kappa in kappa_grid {
        let mut pts: Vec<&ContractRow> = rows.iter().filter(|r| r.kappa == kappa).collect();
        pts.sort_by(|a, b| a.fidelity.total_cmp(&b.fidelity));
        if pts.windows(2).any(|w| w[1].analytic < w[0].analytic) {
            monotone = false;
            violations.push(format!("κ={kappa}: f not monotone in F"));
        }
    }
    Ok(ContractReport {
        test: test.name().to_string(),
        trials,
        rows,
        err,
        monotone_in_f: monotone,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifiers::{IdealFidelity, SwapTest};

    #[test]
    fn ideal_meets_contract() {
        let r = test_contract_check(&IdealFidelity, &[0.0, 0.5, 1.0], &[1, 4], 2000, 1).unwrap();
        assert!(r.passes(), "{:?}", r.violations);
        assert!(r.err.iter().all(|e| e.1 == 0.0));
    }

    #[test]
    fn swap_test_err_and_large_kappa_violation() {
        let r = test_contract_check(&SwapTest, &[0.0, 0.5, 1.0], &[1, 8], 2000, 1).unwrap();
        assert_eq!(r.err[0], (1, 0.5));
        assert!(r.monotone_in_f);
        assert!(r.violations.iter().all(|v| v.contains("does not approach")));
        assert!(!r.passes());
    }
}
