use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{AdversaryStrategy, ChallengeView, Forgery, GameContext, Phase};
use crate::oracles::{QueryRecord, ANC, MSG};
use crate::qstate::{Complex64, Layout, StateVector, UnitaryMatrix};
use crate::seeds::SimRng;

/// The adversary's entangled qubit.
pub const LOCAL: &str = "a";

/// Handling of the `−` outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuaVariant {
    /// Apply `Z` to the first output qubit and submit the result.
    Literal,
    /// Abstain on `−`.
    #[default]
    PostSelected,
}

/// `CNOT` from the first qubit of `psi` onto a fresh local qubit:
/// `[a | msg]` with the message register renamed to `msg`.
fn entangle(psi: &StateVector) -> Result<StateVector> {
    let n = psi.num_qubits();
    if n == 0 {
        return Err(Error::InvalidParameter("challenge needs at least one qubit".into()));
    }
    let mut s = StateVector::zero(Layout::single(LOCAL, 1))?
        .tensor(&psi.clone().relabel(Layout::single(MSG, n))?)?;
    s.xor_into(&[MSG], LOCAL, |v| v >> (n - 1))?;
    Ok(s)
}

/// `F(ρ_ψ, Tr_a |Ψ⟩⟨Ψ|)` by explicit partial trace.
pub fn reduced_challenge_fidelity(psi: &StateVector) -> Result<f64> {
    let s = entangle(psi)?;
    let psi = psi.clone().relabel(Layout::single(MSG, psi.num_qubits()))?;
    s.reduced(&[MSG])?.fidelity(&psi.density())
}

/// `p0² + p1²` with `p_b` the weight of first-qubit value `b`.
pub fn reduced_challenge_fidelity_closed_form(psi: &StateVector) -> f64 {
    let half = psi.dim() / 2;
    let p0: f64 = psi.amplitudes()[..half].iter().map(Complex64::norm_sqr).sum();
    let p1 = psi.amplitudes()[half..].iter().map(Complex64::norm_sqr).sum::<f64>();
    p0 * p0 + p1 * p1
}

/// Printed expression `Σ|α_i|⁴ + Σ_{i<D/2≤j} 2|α_i α_j|²`.
pub fn reduced_challenge_fidelity_printed(psi: &StateVector) -> f64 {
    let w: Vec<f64> = psi.amplitudes().iter().map(Complex64::norm_sqr).collect();
    let half = w.len() / 2;
    let diag: f64 = w.iter().map(|x| x * x).sum();
    let cross: f64 = w[..half]
        .iter()
        .map(|a| w[half..].iter().map(|b| 2.0 * a * b).sum::<f64>())
        .sum();
    diag + cross
}

/// No first-phase queries; entangles the received challenge with a local
/// qubit, queries the challenge half, then measures the local qubit in `±`.
#[derive(Clone, Debug)]
pub struct AuaEntangle {
    pub variant: AuaVariant,
    challenge: Option<StateVector>,
    out: Option<(StateVector, QueryRecord)>,
    plus: Option<bool>,
    sent: bool,
}

impl AuaEntangle {
    pub fn new(variant: AuaVariant) -> Self {
        AuaEntangle {
            variant,
            challenge: None,
            out: None,
            plus: None,
            sent: false,
        }
    }
}

fn first_qubit_z(n: usize) -> Result<UnitaryMatrix> {
    let d = 1usize << n;
    let sign = |i: usize| if i >= d / 2 { -1.0 } else { 1.0 };
    UnitaryMatrix::new(nalgebra::DMatrix::from_fn(d, d, |i, j| {
        Complex64::new(if i == j { sign(i) } else { 0.0 }, 0.0)
    }))
}

impl AdversaryStrategy for AuaEntangle {
    fn next_query(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Option<StateVector>> {
        if ctx.phase != Phase::SecondLearning || self.sent {
            return Ok(None);
        }
        let psi = self
            .challenge
            .as_ref()
            .ok_or_else(|| Error::Protocol("no challenge received".into()))?;
        let mut s = entangle(psi)?;
        if ctx.anc_bits > 0 {
            s = s.tensor(&StateVector::zero(Layout::single(ANC, ctx.anc_bits))?)?;
        }
        self.sent = true;
        Ok(Some(s))
    }

    fn receive(&mut self, out: StateVector, record: QueryRecord, _: &mut SimRng) -> Result<()> {
        self.out = Some((out, record));
        Ok(())
    }

    fn receive_challenge(&mut self, view: ChallengeView, _: &mut SimRng) -> Result<()> {
        match view {
            ChallengeView::Quantum(psi) => {
                self.challenge = Some(psi);
                Ok(())
            }
            ChallengeView::Classical(_) => {
                Err(Error::Protocol("entanglement attack needs a quantum challenge".into()))
            }
        }
    }

    fn guess(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Forgery> {
        let Some((out, record)) = self.out.take() else {
            return Ok(Forgery::Abstain);
        };
        let m = out.measure_pm(LOCAL, rng)?;
        let plus = m.outcome == 0;
        self.plus = Some(plus);
        let mut state = m.state;
        if !plus {
            match self.variant {
                AuaVariant::PostSelected => return Ok(Forgery::Abstain),
                AuaVariant::Literal => state.apply_unitary_mut(&first_qubit_z(ctx.n)?, &[MSG])?,
            }
        }
        Ok(Forgery::Quantum {
            desc: None,
            tag: state.reduced(&[MSG])?,
            r: record.r,
        })
    }

    fn diagnostics(&self) -> Vec<(String, f64)> {
        self.plus
            .map(|p| vec![("plus_branch".to_string(), f64::from(u8::from(p)))])
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::haar_random_state;

    #[test]
    fn partial_trace_agrees_with_closed_form() {
        for s in 0..100 {
            let psi = haar_random_state(Layout::single("c", 3), s).unwrap();
            let a = reduced_challenge_fidelity(&psi).unwrap();
            assert!((a - reduced_challenge_fidelity_closed_form(&psi)).abs() < 1e-9);
        }
    }

    #[test]
    fn basis_and_uniform_values() {
        let l = Layout::single("c", 3);
        for i in 0..8 {
            let b = StateVector::basis(l.clone(), i).unwrap();
            assert!((reduced_challenge_fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
            assert!((reduced_challenge_fidelity_printed(&b) - 1.0).abs() < 1e-12);
        }
        // Uniform ψ: the partial trace gives 1/2; the printed expression
        // gives 1/D + 1/2 (0.625 at D = 8, 0.75 at D = 4).
        for (q, printed) in [(3, 0.625), (2, 0.75)] {
            let u = StateVector::uniform(Layout::single("c", q)).unwrap();
            assert!((reduced_challenge_fidelity(&u).unwrap() - 0.5).abs() < 1e-12);
            assert!((reduced_challenge_fidelity_printed(&u) - printed).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_correction_is_diagonal() {
        let z = first_qubit_z(2).unwrap();
        assert_eq!(z.matrix()[(3, 3)].re, -1.0);
        assert_eq!(z.matrix()[(1, 1)].re, 1.0);
    }
}
