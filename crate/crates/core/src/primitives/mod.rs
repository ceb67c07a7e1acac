//! Keyed function/unitary families, the two randomized constructions, and
//! collision probes.

mod classical;
mod probes;
mod quantum;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use classical::{
    construction1_keygen, ConstantFamily, DeterministicMac, FunctionFamily, KeyedFunctionFamily,
    RandMac,
};
pub use probes::{
    inter_function_independence_probe, random_function_collision_rate,
    random_function_pair_collision_rate, CollisionReport,
};
pub use quantum::{
    verify_quantum_tag, DeterministicQuantumPrimitive, KeyedUnitaryFamily, RandQuantumPrimitive,
    StateDescription, EXACT_ACCEPT,
};

use crate::error::{Error, Result};
use crate::oracles::OracleInstance;
use crate::seeds;
use crate::verifiers::TestConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimitiveKind {
    /// `t = F(k, m)` behind a standard oracle.
    DeterministicMac,
    /// Construction 1.
    RandMac,
    /// Haar `U_E` behind a minimal oracle.
    DeterministicUnitary,
    /// Construction 2.
    RandUnitary,
}

/// Serializable family descriptor for experiment manifests. For quantum kinds
/// `n` is the message qubit count and `m` is unused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveDescriptor {
    pub kind: PrimitiveKind,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub seed: u64,
}

/// One instantiated primitive (setup already run).
#[derive(Clone, Debug)]
pub enum Primitive {
    DeterministicMac(DeterministicMac),
    RandMac(RandMac),
    DeterministicUnitary(DeterministicQuantumPrimitive),
    RandUnitary(RandQuantumPrimitive),
}

impl PrimitiveDescriptor {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.kind {
            PrimitiveKind::DeterministicMac | PrimitiveKind::RandMac => {
                if self.n == 0 || self.m == 0 || self.n > 12 || self.m > 16 {
                    return bad(format!("classical widths n={}, m={} out of range", self.n, self.m));
                }
                if self.kind == PrimitiveKind::RandMac && (self.l == 0 || self.l > 16) {
                    return bad(format!("randomness width l={} out of range", self.l));
                }
            }
            PrimitiveKind::DeterministicUnitary | PrimitiveKind::RandUnitary => {
                if self.n == 0 || self.n > 6 {
                    return bad(format!("message qubits n={} out of range", self.n));
                }
                if self.kind == PrimitiveKind::RandUnitary && (self.l == 0 || self.l > 8) {
                    return bad(format!("randomness width l={} out of range", self.l));
                }
            }
        }
        Ok(())
    }

    /// Setup for one trial: family fixed by the descriptor seed, key (or
    /// unitary) drawn from the trial seed.
    pub fn instantiate(&self, trial_seed: u64, test: TestConfig) -> Result<Primitive> {
        self.validate()?;
        let key_bits = self.l.max(self.n);
        Ok(match self.kind {
            PrimitiveKind::DeterministicMac => {
                let family = Arc::new(KeyedFunctionFamily::new(key_bits, self.n, self.m, self.seed)?);
                let key = construction1_keygen(key_bits, trial_seed);
                Primitive::DeterministicMac(DeterministicMac { family, key })
            }
            PrimitiveKind::RandMac => {
                let family = Arc::new(KeyedFunctionFamily::new(self.l, self.n, self.m, self.seed)?);
                let key = construction1_keygen(self.l, trial_seed);
                Primitive::RandMac(RandMac::new(family, key)?)
            }
            PrimitiveKind::DeterministicUnitary => {
                Primitive::DeterministicUnitary(DeterministicQuantumPrimitive::sample(
                    self.n,
                    seeds::derive(self.seed, "unitary", trial_seed),
                    test,
                )?)
            }
            PrimitiveKind::RandUnitary => Primitive::RandUnitary(RandQuantumPrimitive {
                family: Arc::new(KeyedUnitaryFamily::new(
                    self.l,
                    1 << self.n,
                    seeds::derive(self.seed, "unitary-family", trial_seed),
                )?),
                test,
                delta: 0.0,
            }),
        })
    }
}

impl Primitive {
    pub fn is_classical(&self) -> bool {
        matches!(self, Primitive::DeterministicMac(_) | Primitive::RandMac(_))
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Primitive::RandMac(_) | Primitive::RandUnitary(_))
    }

    /// Message width `n` (qubits).
    pub fn n(&self) -> usize {
        match self {
            Primitive::DeterministicMac(p) => p.family.n_in(),
            Primitive::RandMac(p) => p.family.n_in(),
            Primitive::DeterministicUnitary(p) => p.message_qubits(),
            Primitive::RandUnitary(p) => p.message_qubits(),
        }
    }

    /// Ancilla width a query must carry for the oracle output.
    pub fn ancilla_bits(&self) -> usize {
        match self {
            Primitive::DeterministicMac(p) => p.family.m_out(),
            Primitive::RandMac(p) => p.output_bits(),
            Primitive::DeterministicUnitary(_) => 0,
            Primitive::RandUnitary(p) => p.family.index_bits(),
        }
    }

    pub fn oracle(&self, seed: u64) -> OracleInstance {
        match self {
            Primitive::DeterministicMac(p) => OracleInstance::standard(p.table()),
            Primitive::RandMac(p) => OracleInstance::randomized_standard(Arc::new(p.clone()), seed),
            Primitive::DeterministicUnitary(p) => p.oracle(),
            Primitive::RandUnitary(p) => p.oracle(seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{OracleKind, ANC, MSG};
    use crate::qstate::{Layout, StateVector};

    #[test]
    fn descriptor_json() {
        let d = PrimitiveDescriptor {
            kind: PrimitiveKind::RandMac,
            n: 2,
            m: 2,
            l: 2,
            seed: 9,
        };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"rand-mac","n":2,"m":2,"l":2,"seed":9}"#);
        assert_eq!(serde_json::from_str::<PrimitiveDescriptor>(&s).unwrap(), d);
    }

    #[test]
    fn instantiation_kinds() {
        let t = TestConfig::default();
        for (kind, ok) in [
            (PrimitiveKind::DeterministicMac, OracleKind::StandardDeterministic),
            (PrimitiveKind::RandMac, OracleKind::StandardRandomized),
            (PrimitiveKind::DeterministicUnitary, OracleKind::MinimalUnitary),
            (PrimitiveKind::RandUnitary, OracleKind::RandomizedUnitary),
        ] {
            let d = PrimitiveDescriptor {
                kind,
                n: 2,
                m: 2,
                l: 2,
                seed: 1,
            };
            assert_eq!(d.instantiate(3, t).unwrap().oracle(0).kind(), ok);
        }
        let bad = PrimitiveDescriptor {
            kind: PrimitiveKind::RandMac,
            n: 2,
            m: 2,
            l: 0,
            seed: 1,
        };
        assert!(bad.instantiate(0, t).is_err());
    }

    #[test]
    fn construction1_oracle_shares_r_across_branches() {
        let d = PrimitiveDescriptor {
            kind: PrimitiveKind::RandMac,
            n: 2,
            m: 2,
            l: 2,
            seed: 1,
        };
        let Primitive::RandMac(mac) = d.instantiate(5, TestConfig::default()).unwrap() else {
            unreachable!()
        };
        let mut o = Primitive::RandMac(mac.clone()).oracle(17);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![0.0; 64];
        amps[1 << 4] = h;
        amps[3 << 4] = h;
        let mut s = StateVector::from_real(&amps, Layout::new([(MSG, 2), (ANC, 4)])).unwrap();
        let r = o.query(&mut s).unwrap().r.unwrap();
        for m in [1usize, 3] {
            let t = crate::oracles::RandomizedFunction::eval(&mac, m, r as usize);
            let out = ((t << 2) | r) as usize;
            assert!((s.amplitudes()[(m << 4) | out].re - h).abs() < 1e-15);
        }
    }
}
