use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::layout::Layout;
use super::state::StateVector;
use super::unitary::UnitaryMatrix;
use crate::error::{Error, Result};
use crate::seeds::{self, SimRng};

fn gaussian(rng: &mut SimRng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension {dim} < 2")));
    }
    let mut rng = seeds::rng(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(q)
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn haar_random_state(layout: Layout, seed: u64) -> Result<StateVector> {
    if layout.dim() < 2 {
        return Err(Error::InvalidParameter("dimension < 2".into()));
    }
    let mut rng = seeds::rng(seed);
    let amps = (0..layout.dim()).map(|_| gaussian(&mut rng)).collect();
    StateVector::normalized(amps, layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unitary() {
        let a = haar_random_unitary(8, 42).unwrap();
        let b = haar_random_unitary(8, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.deviation() < 1e-12);
        for j in 0..8 {
            let n: f64 = a.column(j).iter().map(|x| x.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_ne!(a, haar_random_unitary(8, 43).unwrap());
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(haar_random_unitary(1, 0).is_err());
    }
}
