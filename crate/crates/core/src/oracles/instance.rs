use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::blinding::BlindingSet;
use super::table::ClassicalFunctionTable;
use crate::error::{Error, Result};
use crate::qstate::{StateVector, UnitaryMatrix};
use crate::seeds::SimRng;

/// Message register name used by every oracle.
pub const MSG: &str = "msg";
/// Ancilla (output / recorded randomness) register name.
pub const ANC: &str = "anc";

/// `f(m; r)` with `l` bits of randomness.
pub trait RandomizedFunction: Send + Sync {
    fn n_in(&self) -> usize;
    fn m_out(&self) -> usize;
    fn l_bits(&self) -> usize;
    fn eval(&self, m: usize, r: usize) -> u64;
}

/// `r ↦ U(r)` on a fixed dimension.
pub trait UnitaryFamily: Send + Sync {
    fn dim(&self) -> usize;
    fn l_bits(&self) -> usize;
    fn unitary(&self, r: usize) -> Result<UnitaryMatrix>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleKind {
    StandardDeterministic,
    StandardRandomized,
    MinimalUnitary,
    RandomizedUnitary,
    Blinded,
}

#[derive(Clone)]
pub enum Binding {
    Function(Arc<ClassicalFunctionTable>),
    Randomized {
        f: Arc<dyn RandomizedFunction>,
        return_r: bool,
    },
    Unitary(Arc<UnitaryMatrix>),
    Family(Arc<dyn UnitaryFamily>),
    Blinded {
        f: Arc<ClassicalFunctionTable>,
        blinding: Arc<BlindingSet>,
    },
}

impl fmt::Debug for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Function(t) => write!(f, "Function(n={}, m={})", t.n_in(), t.m_out()),
            Binding::Randomized { f: g, return_r } => write!(
                f,
                "Randomized(n={}, m={}, l={}, return_r={return_r})",
                g.n_in(),
                g.m_out(),
                g.l_bits()
            ),
            Binding::Unitary(u) => write!(f, "Unitary(D={})", u.dim()),
            Binding::Family(u) => write!(f, "Family(D={}, l={})", u.dim(), u.l_bits()),
            Binding::Blinded { f: t, blinding } => {
                write!(f, "Blinded(n={}, |B|={})", t.n_in(), blinding.len())
            }
        }
    }
}

/// What one oracle call did, for transcripts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub index: u64,
    pub r: Option<u64>,
}

/// Stateful oracle: binding plus per-query randomness stream and counter.
#[derive(Clone, Debug)]
pub struct OracleInstance {
    binding: Binding,
    seed: u64,
    counter: u64,
}

impl OracleInstance {
    pub fn new(binding: Binding, seed: u64) -> Self {
        OracleInstance {
            binding,
            seed,
            counter: 0,
        }
    }

    pub fn standard(f: Arc<ClassicalFunctionTable>) -> Self {
        OracleInstance::new(Binding::Function(f), 0)
    }

    pub fn randomized_standard(f: Arc<dyn RandomizedFunction>, seed: u64) -> Self {
        OracleInstance::new(Binding::Randomized { f, return_r: true }, seed)
    }

    pub fn minimal(u: Arc<UnitaryMatrix>) -> Self {
        OracleInstance::new(Binding::Unitary(u), 0)
    }

    pub fn randomized_unitary(family: Arc<dyn UnitaryFamily>, seed: u64) -> Self {
        OracleInstance::new(Binding::Family(family), seed)
    }

    pub fn blinded(f: Arc<ClassicalFunctionTable>, blinding: Arc<BlindingSet>) -> Self {
        OracleInstance::new(Binding::Blinded { f, blinding }, 0)
    }

    pub fn kind(&self) -> OracleKind {
        match self.binding {
            Binding::Function(_) => OracleKind::StandardDeterministic,
            Binding::Randomized { .. } => OracleKind::StandardRandomized,
            Binding::Unitary(_) => OracleKind::MinimalUnitary,
            Binding::Family(_) => OracleKind::RandomizedUnitary,
            Binding::Blinded { .. } => OracleKind::Blinded,
        }
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Randomness width `l` (0 for deterministic kinds).
    pub fn l_bits(&self) -> usize {
        match &self.binding {
            Binding::Randomized { f, .. } => f.l_bits(),
            Binding::Family(u) => u.l_bits(),
            _ => 0,
        }
    }

    /// The `r` the oracle will draw on query number `index`: counter-mode stream
    /// keyed by the oracle seed.
    pub fn randomness_at(&self, index: u64) -> u64 {
        let l = self.l_bits();
        if l == 0 {
            return 0;
        }
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng.random::<u64>() & ((1u64 << l) - 1)
    }

    fn next_r(&mut self) -> (u64, u64) {
        let index = self.counter;
        self.counter += 1;
        (index, self.randomness_at(index))
    }

    fn require(&self, kinds: &[OracleKind]) -> Result<()> {
        if kinds.contains(&self.kind()) {
            Ok(())
        } else {
            Err(Error::Oracle(format!(
                "operation not available for {:?} oracle",
                self.kind()
            )))
        }
    }

    /// Dispatches to the apply routine of this oracle's kind.
    pub fn query(&mut self, state: &mut StateVector) -> Result<QueryRecord> {
        match self.kind() {
            OracleKind::StandardDeterministic | OracleKind::StandardRandomized => {
                self.standard_oracle_apply(state)
            }
            OracleKind::MinimalUnitary => self.minimal_oracle_apply(state),
            OracleKind::RandomizedUnitary => self.randomized_unitary_oracle_apply(state),
            OracleKind::Blinded => self.blinded_oracle_apply(state),
        }
    }

    fn anc_width(state: &StateVector, needed: usize) -> Result<usize> {
        let w = state.layout().width(ANC)?;
        if w < needed {
            return Err(Error::WidthMismatch(format!(
                "ancilla has {w} qubits, oracle output needs {needed}"
            )));
        }
        Ok(w)
    }

    fn msg_width(state: &StateVector, n: usize) -> Result<()> {
        let w = state.layout().width(MSG)?;
        if w != n {
            return Err(Error::WidthMismatch(format!(
                "message register has {w} qubits, function takes {n}"
            )));
        }
        Ok(())
    }

    /// `|m, y⟩ → |m, y ⊕ out(m)⟩`; for the randomized kind one `r` serves the
    /// whole superposition and `out(m) = f(m; r) ‖ r`.
    pub fn standard_oracle_apply(&mut self, state: &mut StateVector) -> Result<QueryRecord> {
        self.require(&[OracleKind::StandardDeterministic, OracleKind::StandardRandomized])?;
        match self.binding.clone() {
            Binding::Function(t) => {
                Self::msg_width(state, t.n_in())?;
                Self::anc_width(state, t.m_out())?;
                state.xor_into(&[MSG], ANC, |m| t.eval(m) as usize)?;
                let (index, _) = self.next_r();
                Ok(QueryRecord { index, r: None })
            }
            Binding::Randomized { f, return_r } => {
                Self::msg_width(state, f.n_in())?;
                let l = f.l_bits();
                let need = f.m_out() + if return_r { l } else { 0 };
                Self::anc_width(state, need)?;
                let (index, r) = self.next_r();
                let ru = r as usize;
                state.xor_into(&[MSG], ANC, |m| {
                    let t = f.eval(m, ru) as usize;
                    if return_r {
                        (t << l) | ru
                    } else {
                        t
                    }
                })?;
                Ok(QueryRecord { index, r: Some(r) })
            }
            _ => unreachable!(),
        }
    }

    /// `U_E|q⟩` on the message register.
    pub fn minimal_oracle_apply(&mut self, state: &mut StateVector) -> Result<QueryRecord> {
        self.require(&[OracleKind::MinimalUnitary])?;
        let Binding::Unitary(u) = &self.binding else {
            unreachable!()
        };
        state.apply_unitary_mut(u, &[MSG])?;
        let (index, _) = self.next_r();
        Ok(QueryRecord { index, r: None })
    }

    /// `|anc⟩|ψ⟩ → |anc ⊕ r⟩ U(r)|ψ⟩` with a fresh `r`; the oracle's own `|r⟩`
    /// register is never part of the returned state.
    pub fn randomized_unitary_oracle_apply(
        &mut self,
        state: &mut StateVector,
    ) -> Result<QueryRecord> {
        self.require(&[OracleKind::RandomizedUnitary])?;
        let Binding::Family(fam) = self.binding.clone() else {
            unreachable!()
        };
        if !state.layout().contains(ANC) {
            return Err(Error::Oracle("query lacks the randomness ancilla block".into()));
        }
        Self::anc_width(state, fam.l_bits())?;
        let (index, r) = self.next_r();
        let u = fam.unitary(r as usize)?;
        state.apply_unitary_mut(&u, &[MSG])?;
        state.xor_into(&[MSG], ANC, |_| r as usize)?;
        Ok(QueryRecord { index, r: Some(r) })
    }

    /// Branches with `m ∈ B` receive `y ⊕ ⊥` where `⊥` is the flag bit above the
    /// `m`-bit payload; other branches receive `y ⊕ f(m)`.
    pub fn blinded_oracle_apply(&mut self, state: &mut StateVector) -> Result<QueryRecord> {
        self.require(&[OracleKind::Blinded])?;
        let Binding::Blinded { f, blinding } = self.binding.clone() else {
            unreachable!()
        };
        Self::msg_width(state, f.n_in())?;
        Self::anc_width(state, f.m_out() + 1)?;
        let bot = 1usize << f.m_out();
        state.xor_into(&[MSG], ANC, |m| {
            if blinding.contains(m) {
                bot
            } else {
                f.eval(m) as usize
            }
        })?;
        let (index, _) = self.next_r();
        Ok(QueryRecord { index, r: None })
    }
}
