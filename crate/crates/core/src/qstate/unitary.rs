use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::StateVector;
use super::TOL;
use crate::error::{Error, Result};

/// Square matrix checked to satisfy `U†U = I` within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex64>,
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl UnitaryMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let dev = unitarity_deviation(&m);
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(UnitaryMatrix { m })
    }

    pub(crate) fn from_trusted(m: DMatrix<Complex64>) -> Self {
        UnitaryMatrix { m }
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Permutation matrix sending basis `i` to `f(i)`.
    pub fn from_permutation<F: Fn(usize) -> usize>(dim: usize, f: F) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let j = f(i);
            if j >= dim {
                return Err(Error::NotUnitary(1.0));
            }
            m[(j, i)] = r(1.0);
        }
        UnitaryMatrix::new(m)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMatrix::from_trusted(DMatrix::from_row_slice(2, 2, &[r(h), r(h), r(h), r(-h)]))
    }

    pub fn pauli_x() -> Self {
        UnitaryMatrix::from_trusted(DMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]))
    }

    pub fn pauli_z() -> Self {
        UnitaryMatrix::from_trusted(DMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-1.0)]))
    }

    /// `I − 2|φ⟩⟨φ|`
    pub fn reflection_about(phi: &StateVector) -> Result<Self> {
        let n = phi.norm();
        if (n * n - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n * n));
        }
        let v = nalgebra::DVector::from_column_slice(phi.amplitudes());
        let d = phi.dim();
        let m = DMatrix::identity(d, d) - (&v * v.adjoint()) * r(2.0);
        Ok(UnitaryMatrix { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix {
            m: self.m.adjoint(),
        }
    }

    /// `self · other`
    pub fn mul(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(UnitaryMatrix {
            m: &self.m * &other.m,
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.m.column(j).iter().copied().collect()
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.m)
    }
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let p = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = if i == j { r(1.0) } else { r(0.0) };
            worst = worst.max((p[(i, j)] - e).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_state, Layout};

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, r(1.0));
        assert!(matches!(UnitaryMatrix::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn reflection_is_hermitian_involution() {
        let phi = haar_random_state(Layout::single("q", 3), 5).unwrap();
        let rf = UnitaryMatrix::reflection_about(&phi).unwrap();
        assert!(rf.deviation() < 1e-12);
        let sq = rf.mul(&rf).unwrap();
        assert!((sq.matrix() - DMatrix::identity(8, 8)).camax() < 1e-12);
        assert!((rf.matrix() - rf.matrix().adjoint()).camax() < 1e-15);
    }

    #[test]
    fn reflection_rejects_unnormalized() {
        let v = StateVector::zero(Layout::single("q", 1)).unwrap();
        let big = v.clone().into_amplitudes().iter().map(|a| a * 2.0).collect::<Vec<_>>();
        let bad = StateVector::new(big, Layout::single("q", 1));
        assert!(bad.is_err());
    }
}
