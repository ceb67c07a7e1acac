//! The parameterised unforgeability game, its overlap probabilities and the
//! Monte-Carlo driver.

mod blind;
mod engine;
mod estimate;
mod transcript;

use serde::{Deserialize, Serialize};

pub use blind::{
    run_blindforge, BlindContext, BlindForger, BlindOutcome, FixedForger, ReplayForger,
};
pub use engine::{check_mu_condition, encode_challenge, run_game};
pub use estimate::{
    estimate_win_rate, estimate_win_rate_serial, run_trial, run_trials, trial_seed,
    ExperimentResult,
};
pub use transcript::{GameTranscript, GuessRecord, MuCheck, QueryEntry, Reason, StateDump};

use crate::error::{Error, Result};
use crate::oracles::{QueryRecord, ANC, MSG};
use crate::primitives::{PrimitiveDescriptor, StateDescription};
use crate::qstate::{DensityMatrix, Layout, StateVector};
use crate::seeds::SimRng;
use crate::verifiers::TestConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameMode {
    /// Existential: the adversary names its challenge after learning.
    QEx,
    /// Selective: the challenge is committed before any query.
    QSel,
    /// Universal: the challenger draws the challenge.
    QUni,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub mode: GameMode,
    /// Learning-query budget, shared by both learning phases.
    pub q: usize,
    pub mu: f64,
    /// Include the per-query randomness register in the overlap check.
    #[serde(default)]
    pub strong: bool,
    /// Second learning phase after the challenge (qUni only).
    #[serde(default)]
    pub aua: bool,
    pub primitive: PrimitiveDescriptor,
    #[serde(default)]
    pub test: TestConfig,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub dump_states: bool,
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::InvalidParameter(format!("mu = {} outside (0, 1]", self.mu)));
        }
        if self.aua && self.mode != GameMode::QUni {
            return Err(Error::InvalidParameter("aua requires the qUni mode".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        self.primitive.validate()
    }

    /// Whether the overlap condition gates the verdict.
    pub fn enforces_mu(&self) -> bool {
        self.mode != GameMode::QUni
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Challenge {
    Classical { m: usize },
    Quantum { desc: StateDescription },
}

/// What the adversary sees of a challenger-drawn (qUni) challenge.
#[derive(Clone, Debug)]
pub enum ChallengeView {
    Classical(usize),
    /// One copy of `|ψ_m⟩` on a register named `msg`.
    Quantum(StateVector),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Forgery {
    Classical {
        m: usize,
        t: u64,
        r: Option<u64>,
    },
    /// `desc` may be omitted in qUni, where the challenger knows the message.
    Quantum {
        desc: Option<StateDescription>,
        tag: DensityMatrix,
        r: Option<u64>,
    },
    Abstain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Learning,
    SecondLearning,
}

/// Public game parameters handed to the adversary; never the key.
#[derive(Clone, Debug, PartialEq)]
pub struct GameContext {
    pub mode: GameMode,
    pub q: usize,
    pub mu: f64,
    pub strong: bool,
    pub aua: bool,
    pub classical: bool,
    pub randomized: bool,
    /// Message width in (qu)bits.
    pub n: usize,
    /// Tag width `m` for classical bindings.
    pub m_out: usize,
    /// Randomness width `l` (0 if deterministic).
    pub l: usize,
    /// Ancilla width a query must carry.
    pub anc_bits: usize,
    pub phase: Phase,
    pub queries_used: usize,
}

impl GameContext {
    /// `[msg | anc]`, or `[msg]` when the oracle needs no ancilla.
    pub fn query_layout(&self) -> Layout {
        if self.anc_bits == 0 {
            Layout::single(MSG, self.n)
        } else {
            Layout::new([(MSG, self.n), (ANC, self.anc_bits)])
        }
    }

    pub fn query_registers(&self) -> Vec<&'static str> {
        if self.anc_bits == 0 {
            vec![MSG]
        } else {
            vec![MSG, ANC]
        }
    }

    /// Splits a measured ancilla value into `(t, r)` for the binding.
    pub fn split_tag(&self, anc: u64) -> (u64, Option<u64>) {
        if self.randomized && self.classical {
            (anc >> self.l, Some(anc & ((1u64 << self.l) - 1)))
        } else {
            (anc, None)
        }
    }
}

/// Adversary callbacks. States exchanged with the engine are global pure
/// states `[private… | msg | anc]`; the oracle touches only `msg` and `anc`.
pub trait AdversaryStrategy: Send {
    /// qSel: called before learning and must commit. qEx: called after
    /// learning; `None` defers to the forged message.
    fn select_challenge(&mut self, _ctx: &GameContext, _rng: &mut SimRng) -> Result<Option<Challenge>> {
        Ok(None)
    }

    /// Next query, or `None` to end the current learning phase.
    fn next_query(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<StateVector>>;

    fn receive(&mut self, out: StateVector, record: QueryRecord, rng: &mut SimRng) -> Result<()>;

    /// qUni only.
    fn receive_challenge(&mut self, _view: ChallengeView, _rng: &mut SimRng) -> Result<()> {
        Ok(())
    }

    fn guess(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Forgery>;

    /// Named per-trial figures, averaged by the driver.
    fn diagnostics(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
}

/// Fresh adversary per trial.
pub trait AdversaryFactory: Sync {
    fn create(&self) -> Box<dyn AdversaryStrategy>;
}

impl<F> AdversaryFactory for F
where
    F: Fn() -> Box<dyn AdversaryStrategy> + Sync,
{
    fn create(&self) -> Box<dyn AdversaryStrategy> {
        self()
    }
}

/// `1 − μ^q`.
pub fn p_ov_classical(q: usize, mu: f64) -> f64 {
    1.0 - mu.powi(q as i32)
}

/// Acceptance probability of the configured test on the outputs of the
/// closest query and of the challenge.
pub fn p_ov_quantum(
    max_overlap_query_out: &DensityMatrix,
    true_out: &DensityMatrix,
    test: &TestConfig,
) -> Result<f64> {
    Ok(test.acceptance_probability(max_overlap_query_out.fidelity(true_out)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::PrimitiveKind;
    use crate::qstate::haar_random_state;
    use crate::verifiers::TestKind;

    #[test]
    fn p_ov_examples() {
        assert_eq!(p_ov_classical(0, 0.3), 0.0);
        assert_eq!(p_ov_classical(5, 1.0), 0.0);
        assert!((p_ov_classical(2, 0.75) - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn p_ov_quantum_examples() {
        let l = Layout::single("msg", 3);
        let a = haar_random_state(l.clone(), 1).unwrap();
        let t = TestConfig::default();
        assert!((p_ov_quantum(&a.density(), &a.density(), &t).unwrap() - 1.0).abs() < 1e-9);
        let b = StateVector::basis(l.clone(), 0).unwrap();
        let c = StateVector::basis(l.clone(), 1).unwrap();
        assert!(p_ov_quantum(&b.density(), &c.density(), &t).unwrap().abs() < 1e-12);
        // F = 0.25 survives a common unitary.
        let x = StateVector::from_real(&[0.5, 0.75f64.sqrt(), 0., 0., 0., 0., 0., 0.], l).unwrap();
        let u = crate::qstate::haar_random_unitary(8, 2).unwrap();
        let (bu, xu) = (b.apply_unitary(&u, &["msg"]).unwrap(), x.apply_unitary(&u, &["msg"]).unwrap());
        assert!((p_ov_quantum(&bu.density(), &xu.density(), &t).unwrap() - 0.25).abs() < 1e-9);
        let swap = TestConfig::new(TestKind::SwapTest, 1, 1).unwrap();
        assert!((p_ov_quantum(&bu.density(), &xu.density(), &swap).unwrap() - 0.625).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let mut cfg = GameConfig {
            mode: GameMode::QSel,
            q: 1,
            mu: 0.5,
            strong: false,
            aua: true,
            primitive: PrimitiveDescriptor {
                kind: PrimitiveKind::DeterministicMac,
                n: 2,
                m: 2,
                l: 0,
                seed: 0,
            },
            test: TestConfig::default(),
            trials: 1,
            seed: 0,
            dump_states: false,
        };
        assert!(cfg.validate().is_err());
        cfg.aua = false;
        assert!(cfg.validate().is_ok());
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.mu = 0.0;
        assert!(cfg.validate().is_err());
    }
}
