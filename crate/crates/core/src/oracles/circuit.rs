use super::instance::{UnitaryFamily, ANC, MSG};
use crate::error::{Error, Result};
use crate::qstate::{haar_random_unitary, Layout, StateVector, UnitaryMatrix};
use crate::seeds;

/// Gate-level randomized unitary on two message qubits driven by three
/// randomness bits: `U(r) = G3^{r3} G2^{r2} G1^{r1} G0`, `r = r1 r2 r3`
/// with `r1` the most significant bit.
#[derive(Clone, Debug)]
pub struct ControlledGateFamily {
    gates: [UnitaryMatrix; 4],
}

pub const CIRCUIT_MSG_QUBITS: usize = 2;
pub const CIRCUIT_RAND_BITS: usize = 3;

impl ControlledGateFamily {
    /// Gates drawn Haar-random from the seed at setup.
    pub fn sample(seed: u64) -> Result<Self> {
        let g = |i: u64| haar_random_unitary(4, seeds::derive(seed, "fig3-gate", i));
        Ok(ControlledGateFamily {
            gates: [g(0)?, g(1)?, g(2)?, g(3)?],
        })
    }

    pub fn gates(&self) -> &[UnitaryMatrix; 4] {
        &self.gates
    }

    /// Runs the circuit on `[anc 3 | msg 2]`: the oracle's `|r⟩` register
    /// controls each `G_i`, then `r` is XOR-recorded into the ancilla.
    pub fn run_circuit(&self, query: &StateVector, r: usize) -> Result<StateVector> {
        if r >= 1 << CIRCUIT_RAND_BITS {
            return Err(Error::InvalidParameter(format!("r = {r} needs > 3 bits")));
        }
        let internal = StateVector::basis(
            Layout::new([("r1", 1), ("r2", 1), ("r3", 1)]),
            r,
        )?;
        let mut s = internal.tensor(query)?;
        s.apply_unitary_mut(&self.gates[0], &[MSG])?;
        for (k, bit) in ["r1", "r2", "r3"].iter().enumerate() {
            s.apply_controlled_mut(&self.gates[k + 1], &[MSG], Some((bit, 1)))?;
        }
        s.xor_into(&["r1", "r2", "r3"], ANC, |v| v)?;
        let rec = StateVector::basis(Layout::new([("r1", 1), ("r2", 1), ("r3", 1)]), r)?;
        let (_, rest) = s.condition_on(&rec, &["r1", "r2", "r3"])?;
        rest.ok_or_else(|| Error::Oracle("internal randomness register not in |r⟩".into()))
    }
}

impl UnitaryFamily for ControlledGateFamily {
    fn dim(&self) -> usize {
        1 << CIRCUIT_MSG_QUBITS
    }

    fn l_bits(&self) -> usize {
        CIRCUIT_RAND_BITS
    }

    fn unitary(&self, r: usize) -> Result<UnitaryMatrix> {
        let mut u = self.gates[0].clone();
        for k in 0..3 {
            if (r >> (2 - k)) & 1 == 1 {
                u = self.gates[k + 1].mul(&u)?;
            }
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::OracleInstance;
    use crate::qstate::haar_random_state;
    use std::sync::Arc;

    #[test]
    fn index_binding_matches_gate_circuit() {
        let fam = ControlledGateFamily::sample(4).unwrap();
        let psi = haar_random_state(Layout::single(MSG, 2), 8).unwrap();
        let q = StateVector::zero(Layout::single(ANC, 3)).unwrap().tensor(&psi).unwrap();
        for r in 0..8 {
            let circ = fam.run_circuit(&q, r).unwrap();
            let bound = StateVector::basis(Layout::single(ANC, 3), r)
                .unwrap()
                .tensor(&psi.apply_unitary(&fam.unitary(r).unwrap(), &[MSG]).unwrap())
                .unwrap();
            assert!(circ.fidelity(&bound).unwrap() > 1.0 - 1e-12, "r = {r}");
        }
    }

    #[test]
    fn oracle_with_circuit_family() {
        let fam = Arc::new(ControlledGateFamily::sample(1).unwrap());
        let mut o = OracleInstance::randomized_unitary(fam.clone(), 77);
        let psi = haar_random_state(Layout::single(MSG, 2), 2).unwrap();
        let q = StateVector::zero(Layout::single(ANC, 3)).unwrap().tensor(&psi).unwrap();
        let mut s = q.clone();
        let r = o.query(&mut s).unwrap().r.unwrap() as usize;
        let circ = fam.run_circuit(&q, r).unwrap();
        assert!(s.fidelity(&circ).unwrap() > 1.0 - 1e-12);
    }
}
