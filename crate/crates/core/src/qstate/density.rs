use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::layout::Layout;
use super::state::{check_width, StateVector};
use super::TOL;
use crate::error::{Error, Result};

/// Mixed state over a register layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
    layout: Layout,
}

impl DensityMatrix {
    /// Checked constructor: Hermitian, unit trace, PSD (all within tolerance).
    pub fn new(m: DMatrix<Complex64>, layout: Layout) -> Result<Self> {
        check_width(&layout)?;
        if m.nrows() != layout.dim() || m.ncols() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: m.nrows(),
            });
        }
        let herm = (&m - m.adjoint()).camax();
        if herm > TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        let min = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { m, layout })
    }

    pub(crate) fn from_parts(m: DMatrix<Complex64>, layout: Layout) -> Self {
        DensityMatrix { m, layout }
    }

    pub fn from_pure(s: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        DensityMatrix {
            m: &v * v.adjoint(),
            layout: s.layout().clone(),
        }
    }

    pub fn maximally_mixed(layout: Layout) -> Result<Self> {
        check_width(&layout)?;
        let d = layout.dim();
        Ok(DensityMatrix {
            m: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
            layout,
        })
    }

    /// Convex mixture `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(parts: &[(f64, StateVector)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut m = DMatrix::zeros(first.1.dim(), first.1.dim());
        for (p, s) in parts {
            if s.dim() != first.1.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.1.dim(),
                    found: s.dim(),
                });
            }
            m += DensityMatrix::from_pure(s).m * Complex64::new(*p, 0.0);
        }
        DensityMatrix::new(m, first.1.layout().clone())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() < 1e-10
    }

    /// Eigen-decomposition as `(weight, eigenvector)` pairs with weight above `1e-12`,
    /// sorted by decreasing weight.
    pub fn spectrum(&self) -> Vec<(f64, StateVector)> {
        let eig = SymmetricEigen::new(self.m.clone());
        let mut out: Vec<(f64, StateVector)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 1e-12)
            .filter_map(|(k, w)| {
                let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
                StateVector::normalized(v, self.layout.clone())
                    .ok()
                    .map(|s| (*w, s))
            })
            .collect();
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }

    /// `Tr_{rest}(ρ)` keeping the listed registers in the given order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let kf = self.layout.fields(keep)?;
        let layout = self.layout.select(keep)?;
        let koff = kf.offsets();
        let bases: Vec<usize> = kf.bases(self.dim()).collect();
        let dk = koff.len();
        let mut out = DMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in &bases {
                    acc += self.m[(b | koff[i], b | koff[j])];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix { m: out, layout })
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; reduces to `|⟨ψ|φ⟩|²` on pure states.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.is_pure() || other.is_pure() {
            let f = (&self.m * &other.m).trace().re;
            return Ok(f.clamp(0.0, 1.0));
        }
        let sq = psd_sqrt(&self.m);
        let inner = &sq * &other.m * &sq;
        let s: f64 = SymmetricEigen::new(inner)
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        Ok((s * s).clamp(0.0, 1.0))
    }
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// True iff `F(r1, r2) ≤ 1 − μ` (inclusive of tolerance).
pub fn mu_distinguishable(r1: &DensityMatrix, r2: &DensityMatrix, mu: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside [0, 1]")));
    }
    Ok(r1.fidelity(r2)? <= 1.0 - mu + TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::haar_random_state;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, 0.0, 0.0, h], Layout::new([("a", 1), ("b", 1)])).unwrap()
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let rho = bell().density();
        for keep in ["a", "b"] {
            let r = rho.partial_trace(&[keep]).unwrap();
            let mm = DensityMatrix::maximally_mixed(Layout::single(keep, 1)).unwrap();
            assert!((r.matrix() - mm.matrix()).camax() < 1e-15);
        }
        let direct = bell().reduced(&["a"]).unwrap();
        assert!((direct.matrix() - rho.partial_trace(&["a"]).unwrap().matrix()).camax() < 1e-15);
    }

    #[test]
    fn pure_vs_maximally_mixed() {
        let l = Layout::single("q", 3);
        let psi = haar_random_state(l.clone(), 2).unwrap().density();
        let mm = DensityMatrix::maximally_mixed(l).unwrap();
        assert!((psi.fidelity(&mm).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn mixed_fidelity_general_path() {
        let l = Layout::single("q", 1);
        let z0 = StateVector::zero(l.clone()).unwrap();
        let z1 = StateVector::basis(l.clone(), 1).unwrap();
        let a = DensityMatrix::mixture(&[(0.75, z0.clone()), (0.25, z1.clone())]).unwrap();
        let b = DensityMatrix::mixture(&[(0.25, z0), (0.75, z1)]).unwrap();
        // Commuting states: (Σ √(p_i q_i))².
        let expect = (2.0 * (0.75f64 * 0.25).sqrt()).powi(2);
        assert!((a.fidelity(&b).unwrap() - expect).abs() < 1e-12);
        assert!((b.fidelity(&a).unwrap() - expect).abs() < 1e-12);
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_distinguishability() {
        let l = Layout::single("q", 1);
        let z0 = StateVector::zero(l.clone()).unwrap().density();
        let z1 = StateVector::basis(l.clone(), 1).unwrap().density();
        assert!(mu_distinguishable(&z0, &z1, 1.0).unwrap());
        assert!(!mu_distinguishable(&z0, &z0, 0.1).unwrap());
        assert!(mu_distinguishable(&z0, &z1, 1.5).is_err());
        let g = 0.5;
        let mixed = StateVector::from_real(&[g, (1.0f64 - g * g).sqrt()], l).unwrap();
        assert!(mu_distinguishable(&z0, &mixed.density(), 0.75).unwrap());
    }

    #[test]
    fn checked_constructor() {
        let l = Layout::single("q", 1);
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(bad, l.clone()).is_err());
        let ok = DensityMatrix::maximally_mixed(l.clone()).unwrap();
        assert!(DensityMatrix::new(ok.matrix().clone(), l).is_ok());
    }

    #[test]
    fn spectrum_reconstructs() {
        let l = Layout::single("q", 2);
        let a = haar_random_state(l.clone(), 1).unwrap();
        let b = haar_random_state(l, 2).unwrap();
        let rho = DensityMatrix::mixture(&[(0.3, a), (0.7, b)]).unwrap();
        let parts = rho.spectrum();
        let back = DensityMatrix::mixture(&parts).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-10);
    }
}
