use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{OracleInstance, UnitaryFamily};
use crate::qstate::{
    haar_random_state, haar_random_unitary, Complex64, DensityMatrix, Layout, StateVector,
    UnitaryMatrix,
};
use crate::seeds::{self, SimRng};
use crate::verifiers::TestConfig;

/// Fidelity above which a tag is accepted without running the test.
pub const EXACT_ACCEPT: f64 = 1.0 - 1e-6;

/// `r ↦ U_r`, each a seeded Haar draw.
#[derive(Clone, Debug)]
pub struct KeyedUnitaryFamily {
    index_bits: usize,
    dim: usize,
    seed: u64,
}

impl KeyedUnitaryFamily {
    pub fn new(index_bits: usize, dim: usize, seed: u64) -> Result<Self> {
        if index_bits > 32 || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "unitary family l={index_bits}, D={dim} out of range"
            )));
        }
        Ok(KeyedUnitaryFamily {
            index_bits,
            dim,
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index_bits(&self) -> usize {
        self.index_bits
    }
}

impl UnitaryFamily for KeyedUnitaryFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn l_bits(&self) -> usize {
        self.index_bits
    }

    fn unitary(&self, r: usize) -> Result<UnitaryMatrix> {
        haar_random_unitary(self.dim, seeds::derive(self.seed, "unitary-family", r as u64))
    }
}

/// Classical description of a pure message state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateDescription {
    Basis { index: usize },
    Haar { seed: u64 },
    /// Interleaved `re, im` pairs.
    Amplitudes { values: Vec<f64> },
}

impl StateDescription {
    pub fn prepare(&self, layout: Layout) -> Result<StateVector> {
        match self {
            StateDescription::Basis { index } => StateVector::basis(layout, *index),
            StateDescription::Haar { seed } => haar_random_state(layout, *seed),
            StateDescription::Amplitudes { values } => {
                if values.len() != 2 * layout.dim() {
                    return Err(Error::Protocol(format!(
                        "description has {} reals, expected {}",
                        values.len(),
                        2 * layout.dim()
                    )));
                }
                let amps = values
                    .chunks_exact(2)
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect();
                StateVector::new(amps, layout).map_err(|e| Error::Protocol(e.to_string()))
            }
        }
    }

    pub fn of(state: &StateVector) -> Self {
        StateDescription::Amplitudes {
            values: state.to_interleaved(),
        }
    }
}

/// Randomized quantum primitive: fresh `U(r)` per query, `r` returned in the ancilla.
#[derive(Clone, Debug)]
pub struct RandQuantumPrimitive {
    pub family: Arc<KeyedUnitaryFamily>,
    pub test: TestConfig,
    /// Recorded radius for the `μ ≥ 1 − δ²` security statement.
    pub delta: f64,
}

impl RandQuantumPrimitive {
    pub fn message_qubits(&self) -> usize {
        self.family.dim().trailing_zeros() as usize
    }

    pub fn oracle(&self, seed: u64) -> OracleInstance {
        OracleInstance::randomized_unitary(self.family.clone(), seed)
    }

    /// `U(r)|ψ_m⟩` from a classical description.
    pub fn expected_output(&self, m_desc: &StateDescription, r: u64) -> Result<StateVector> {
        let layout = Layout::single("msg", self.message_qubits());
        let psi = m_desc.prepare(layout)?;
        psi.apply_unitary(&self.family.unitary(r as usize)?, &["msg"])
    }

    pub fn verify(
        &self,
        m_desc: &StateDescription,
        r: u64,
        tag: &DensityMatrix,
        rng: &mut SimRng,
    ) -> Result<bool> {
        let expected = self.expected_output(m_desc, r)?.density();
        verify_quantum_tag(&self.test, &expected, tag, rng)
    }
}

/// Deterministic quantum primitive: a single Haar `U_E` behind a minimal oracle.
#[derive(Clone, Debug)]
pub struct DeterministicQuantumPrimitive {
    pub unitary: Arc<UnitaryMatrix>,
    pub test: TestConfig,
}

impl DeterministicQuantumPrimitive {
    pub fn sample(qubits: usize, seed: u64, test: TestConfig) -> Result<Self> {
        Ok(DeterministicQuantumPrimitive {
            unitary: Arc::new(haar_random_unitary(1 << qubits, seed)?),
            test,
        })
    }

    pub fn message_qubits(&self) -> usize {
        self.unitary.dim().trailing_zeros() as usize
    }

    pub fn oracle(&self) -> OracleInstance {
        OracleInstance::minimal(self.unitary.clone())
    }

    pub fn verify(
        &self,
        m_desc: &StateDescription,
        tag: &DensityMatrix,
        rng: &mut SimRng,
    ) -> Result<bool> {
        let psi = m_desc.prepare(Layout::single("msg", self.message_qubits()))?;
        let expected = psi.apply_unitary(&self.unitary, &["msg"])?.density();
        verify_quantum_tag(&self.test, &expected, tag, rng)
    }
}

/// Accept outright when `F ≥ 1 − 1e-6`, otherwise defer to the configured test.
pub fn verify_quantum_tag(
    test: &TestConfig,
    expected: &DensityMatrix,
    tag: &DensityMatrix,
    rng: &mut SimRng,
) -> Result<bool> {
    if expected.dim() != tag.dim() {
        return Err(Error::DimensionMismatch {
            expected: expected.dim(),
            found: tag.dim(),
        });
    }
    if expected.fidelity(tag)? >= EXACT_ACCEPT {
        return Ok(true);
    }
    test.run(expected, tag, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prim() -> RandQuantumPrimitive {
        RandQuantumPrimitive {
            family: Arc::new(KeyedUnitaryFamily::new(4, 8, 11).unwrap()),
            test: TestConfig::default(),
            delta: 0.1,
        }
    }

    #[test]
    fn family_determinism() {
        let f = KeyedUnitaryFamily::new(4, 8, 1).unwrap();
        assert_eq!(f.unitary(3).unwrap(), f.unitary(3).unwrap());
        assert_ne!(f.unitary(3).unwrap(), f.unitary(4).unwrap());
    }

    #[test]
    fn honest_tag_accepted() {
        let p = prim();
        let mut rng = seeds::rng(1);
        let desc = StateDescription::Haar { seed: 4 };
        let mut o = p.oracle(9);
        let mut q = StateVector::zero(Layout::single("anc", 4))
            .unwrap()
            .tensor(&desc.prepare(Layout::single("msg", 3)).unwrap())
            .unwrap();
        let r = o.query(&mut q).unwrap().r.unwrap();
        let tag = q.reduced(&["msg"]).unwrap();
        for _ in 0..50 {
            assert!(p.verify(&desc, r, &tag, &mut rng).unwrap());
        }
    }

    #[test]
    fn orthogonal_tag_rejected() {
        let p = prim();
        let mut rng = seeds::rng(2);
        let desc = StateDescription::Basis { index: 0 };
        let good = p.expected_output(&desc, 5).unwrap();
        // Any vector orthogonal to `good`.
        let a = good.amplitudes();
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[0] = -a[1].conj();
        v[1] = a[0].conj();
        let bad = StateVector::normalized(v, Layout::single("msg", 3)).unwrap();
        for _ in 0..50 {
            assert!(!p.verify(&desc, 5, &bad.density(), &mut rng).unwrap());
        }
    }

    #[test]
    fn haar_wrong_tag_rate() {
        let p = prim();
        let mut rng = seeds::rng(3);
        let desc = StateDescription::Basis { index: 2 };
        let n = 4000;
        let acc = (0..n)
            .filter(|i| {
                let t = haar_random_state(Layout::single("msg", 3), 1000 + i).unwrap();
                p.verify(&desc, 1, &t.density(), &mut rng).unwrap()
            })
            .count() as f64
            / n as f64;
        assert!((acc - 0.125).abs() < 0.02, "{acc}");
    }

    #[test]
    fn malformed_description() {
        let d = StateDescription::Amplitudes {
            values: vec![1.0, 0.0, 0.0],
        };
        assert!(matches!(
            d.prepare(Layout::single("msg", 1)),
            Err(Error::Protocol(_))
        ));
        let s = haar_random_state(Layout::single("msg", 2), 1).unwrap();
        assert_eq!(
            StateDescription::of(&s).prepare(Layout::single("msg", 2)).unwrap(),
            s
        );
    }
}
