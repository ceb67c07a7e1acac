use serde::{Deserialize, Serialize};

use super::{Challenge, GameMode, Phase};
use crate::primitives::StateDescription;
use crate::qstate::{Register, StateVector};

/// Register layout of a snapshot, with interleaved `re, im` amplitudes when
/// state dumping is on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub registers: Vec<Register>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amplitudes: Option<Vec<f64>>,
}

impl StateDump {
    pub fn of(state: &StateVector, with_amplitudes: bool) -> Self {
        StateDump {
            registers: state.layout().registers().to_vec(),
            amplitudes: with_amplitudes.then(|| state.to_interleaved()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub index: u64,
    pub phase: Phase,
    pub r: Option<u64>,
    pub in_desc: StateDump,
    pub out_desc: StateDump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GuessRecord {
    Classical {
        m: usize,
        t: u64,
        r: Option<u64>,
    },
    Quantum {
        desc: Option<StateDescription>,
        r: Option<u64>,
        /// Simulator-side fidelity of the tag to the honest output.
        tag_fidelity: f64,
        tag_purity: f64,
    },
    Abstain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Accepted,
    Rejected,
    /// The challenge was too close to a learning query.
    MuViolation,
    Abstained,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuCheck {
    /// `F(challenge, ρ^in_i)` per query, strong factor applied.
    pub fidelities: Vec<f64>,
    pub passed: bool,
    pub enforced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub trial: u64,
    pub seed: u64,
    pub mode: GameMode,
    pub queries: Vec<QueryEntry>,
    pub challenge: Option<Challenge>,
    pub guess: GuessRecord,
    pub mu_check: Option<MuCheck>,
    /// Overlap probability attributable to this trial's queries.
    pub p_ov: f64,
    pub verdict: u8,
    pub reason: Reason,
    pub diagnostics: Vec<(String, f64)>,
}

impl GameTranscript {
    pub fn won(&self) -> bool {
        self.verdict == 1
    }

    /// Largest recorded challenge-to-query fidelity.
    pub fn max_challenge_fidelity(&self) -> Option<f64> {
        self.mu_check
            .as_ref()
            .and_then(|c| c.fidelities.iter().copied().reduce(f64::max))
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == name).map(|d| d.1)
    }
}
