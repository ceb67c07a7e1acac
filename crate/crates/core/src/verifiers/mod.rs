//! Classical verification and quantum equality tests.

mod contract;
mod quantum;

pub use contract::{test_contract_check, ContractReport, ContractRow};
pub use quantum::{
    ideal_fidelity_test, swap_test, swap_test_mixed, IdealFidelity, QuantumTest, SwapOutcome,
    SwapTest, TestConfig, TestKind,
};

use crate::error::{Error, Result};

/// A keyed classical tag function `t = T(k, m, r)`.
pub trait ClassicalScheme: Send + Sync {
    fn key_bits(&self) -> usize;
    fn n_in(&self) -> usize;
    fn m_out(&self) -> usize;
    /// Randomness width (0 for deterministic schemes).
    fn l_bits(&self) -> usize;
    fn tag(&self, key: u64, m: usize, r: u64) -> u64;
}

fn fits(v: u64, bits: usize) -> bool {
    bits >= 64 || v >> bits == 0
}

/// Accepts iff the recomputed tag equals `t` exactly.
pub fn classical_verify(
    scheme: &dyn ClassicalScheme,
    key: u64,
    m: usize,
    t: u64,
    r: u64,
) -> Result<bool> {
    let checks = [
        ("key", key, scheme.key_bits()),
        ("message", m as u64, scheme.n_in()),
        ("tag", t, scheme.m_out()),
        ("randomness", r, scheme.l_bits()),
    ];
    for (what, v, bits) in checks {
        if !fits(v, bits) {
            return Err(Error::WidthMismatch(format!(
                "{what} {v:#x} does not fit in {bits} bits"
            )));
        }
    }
    Ok(scheme.tag(key, m, r) == t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use rand::Rng;

    struct XorScheme;
    impl ClassicalScheme for XorScheme {
        fn key_bits(&self) -> usize {
            8
        }
        fn n_in(&self) -> usize {
            8
        }
        fn m_out(&self) -> usize {
            8
        }
        fn l_bits(&self) -> usize {
            8
        }
        fn tag(&self, key: u64, m: usize, r: u64) -> u64 {
            (key ^ r ^ m as u64).wrapping_mul(29) & 0xff
        }
    }

    #[test]
    fn honest_and_flipped() {
        let s = XorScheme;
        let t = s.tag(3, 4, 5);
        assert!(classical_verify(&s, 3, 4, t, 5).unwrap());
        assert!(!classical_verify(&s, 3, 4, t ^ 1, 5).unwrap());
        assert!(classical_verify(&s, 3, 4, 0x100, 5).is_err());
    }

    #[test]
    fn random_tag_acceptance_rate() {
        let s = XorScheme;
        let mut rng = seeds::rng(1);
        let n = 10_000;
        let hits = (0..n)
            .filter(|_| {
                let (k, m, r) = (rng.random::<u8>(), rng.random::<u8>(), rng.random::<u8>());
                let t = rng.random::<u8>() as u64;
                classical_verify(&s, k as u64, m as usize, t, r as u64).unwrap()
            })
            .count();
        let p = 1.0 / 256.0;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits as f64 - n as f64 * p).abs() <= 3.0 * sd, "{hits}");
    }
}
