//! Concrete adversaries and the closed forms of their success probabilities.

mod adversaries;
mod aua;
mod emulator;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adversaries::{
    Example1DoubleQea, QEAttackParams, SuperpositionMeasure, Thm5Qea, TrivialOverlap,
};
pub use aua::{
    reduced_challenge_fidelity, reduced_challenge_fidelity_closed_form,
    reduced_challenge_fidelity_printed, AuaEntangle, AuaVariant, LOCAL,
};
pub use emulator::{
    example1_advantage, example1_printed_curve, example1_printed_squared, example1_sqrt_ps1,
    example1_structure, qe_one_block_emulator, qe_stage1_state, qe_stage1_success, thm5_advantage,
    thm5_sqrt_ps1, thm5_structure, EmulationOutcome, CTL, OUT, SPENT,
};

use crate::error::{Error, Result};
use crate::games::{AdversaryFactory, AdversaryStrategy};

/// Stable attack identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackId {
    Thm4Superposition,
    TrivialOverlap,
    Thm5Qea,
    Example1DoubleQea,
    AuaEntangle,
}

impl AttackId {
    pub const ALL: [AttackId; 5] = [
        AttackId::Thm4Superposition,
        AttackId::TrivialOverlap,
        AttackId::Thm5Qea,
        AttackId::Example1DoubleQea,
        AttackId::AuaEntangle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttackId::Thm4Superposition => "thm4-superposition",
            AttackId::TrivialOverlap => "trivial-overlap",
            AttackId::Thm5Qea => "thm5-qea",
            AttackId::Example1DoubleQea => "example1-double-qea",
            AttackId::AuaEntangle => "aua-entangle",
        }
    }
}

impl fmt::Display for AttackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown attack `{s}`")))
    }
}

/// Per-trial adversary constructor for a registered attack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackFactory {
    pub id: AttackId,
    /// Overlap amplitude for the emulation attacks.
    pub gamma: Option<f64>,
    pub aua_variant: AuaVariant,
}

impl AttackFactory {
    pub fn new(id: AttackId) -> Self {
        AttackFactory {
            id,
            gamma: None,
            aua_variant: AuaVariant::default(),
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.id == AttackId::Example1DoubleQea {
            Example1DoubleQea::new(self.gamma.unwrap_or(std::f64::consts::FRAC_1_SQRT_2))?;
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidParameter(format!("γ = {g} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

impl AdversaryFactory for AttackFactory {
    fn create(&self) -> Box<dyn AdversaryStrategy> {
        match self.id {
            AttackId::Thm4Superposition => Box::new(SuperpositionMeasure::default()),
            AttackId::TrivialOverlap => Box::new(TrivialOverlap::default()),
            AttackId::Thm5Qea => Box::new(Thm5Qea::new(QEAttackParams { gamma: self.gamma })),
            AttackId::Example1DoubleQea => Box::new(
                Example1DoubleQea::new(self.gamma.unwrap_or(std::f64::consts::FRAC_1_SQRT_2))
                    .expect("validated by AttackFactory::validate"),
            ),
            AttackId::AuaEntangle => Box::new(AuaEntangle::new(self.aua_variant)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in AttackId::ALL {
            assert_eq!(id.as_str().parse::<AttackId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("thm6".parse::<AttackId>().is_err());
    }
}
