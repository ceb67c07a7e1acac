use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qunforge::attacks::{AttackFactory, AttackId, AuaVariant};
use qunforge::games::{GameConfig, GameMode};
use qunforge::primitives::{PrimitiveDescriptor, PrimitiveKind};
use qunforge::verifiers::TestConfig;

use crate::error::{CliError, Result};
use crate::experiments;

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_FAMILY_SEED: u64 = 11;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mu: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<f64>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.mu.is_empty() && self.gamma.is_empty()
    }
}

/// Everything that determines a run. Unset fields fall back to the
/// experiment's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub experiment: AttackId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<GameMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<PrimitiveKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub strong: bool,
    #[serde(default)]
    pub aua_variant: AuaVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<TestConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_family_seed")]
    pub family_seed: u64,
    #[serde(default)]
    pub dump_states: bool,
    #[serde(default, skip_serializing_if = "SweepAxes::is_empty")]
    pub sweep: SweepAxes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_family_seed() -> u64 {
    DEFAULT_FAMILY_SEED
}

/// A fully resolved point: game configuration plus adversary.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub game: GameConfig,
    pub attack: AttackFactory,
    /// Overlap amplitude the attack will actually use.
    pub effective_gamma: f64,
}

impl ExperimentManifest {
    pub fn new(experiment: AttackId) -> Self {
        ExperimentManifest {
            experiment,
            mode: None,
            primitive: None,
            n: None,
            m: None,
            l: None,
            q: None,
            mu: None,
            gamma: None,
            strong: false,
            aua_variant: AuaVariant::default(),
            test: None,
            trials: None,
            seed: DEFAULT_SEED,
            family_seed: DEFAULT_FAMILY_SEED,
            dump_states: false,
            sweep: SweepAxes::default(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }

    /// Game and attack for one `(μ, γ)` point; `None` takes the manifest value.
    pub fn resolve_at(&self, mu: Option<f64>, gamma: Option<f64>) -> Result<Resolved> {
        let id = self.experiment;
        let d = experiments::defaults(id);
        let gamma = gamma.or(self.gamma);
        let mu = mu.or(self.mu).unwrap_or(match (id, gamma) {
            (AttackId::Example1DoubleQea, Some(g)) => 1.0 - g * g,
            (AttackId::Thm5Qea, Some(g)) => 1.0 - g * g,
            _ => d.mu,
        });
        let effective_gamma = gamma.unwrap_or((1.0 - mu).max(0.0).sqrt());
        let mut attack = AttackFactory::new(id);
        attack.aua_variant = self.aua_variant;
        if id == AttackId::Example1DoubleQea || gamma.is_some() {
            attack.gamma = Some(effective_gamma);
        }
        let game = GameConfig {
            mode: self.mode.unwrap_or(d.mode),
            q: self.q.unwrap_or(d.q),
            mu,
            strong: self.strong,
            aua: d.aua && self.mode.is_none_or(|m| m == GameMode::QUni),
            primitive: PrimitiveDescriptor {
                kind: self.primitive.unwrap_or(d.primitive),
                n: self.n.unwrap_or(d.n),
                m: self.m.unwrap_or(d.m),
                l: self.l.unwrap_or(d.l),
                seed: self.family_seed,
            },
            test: self.test.unwrap_or_default(),
            trials: self.trials.unwrap_or(d.trials),
            seed: self.seed,
            dump_states: self.dump_states,
        };
        let invalid = |e: qunforge::Error| CliError::Manifest(e.to_string());
        game.validate().map_err(invalid)?;
        attack.validate().map_err(invalid)?;
        Ok(Resolved {
            game,
            attack,
            effective_gamma,
        })
    }

    pub fn resolve(&self) -> Result<Resolved> {
        self.resolve_at(None, None)
    }

    /// Sweep points in axis order, `μ` outermost. An empty axis contributes
    /// the manifest's own value.
    pub fn sweep_points(&self) -> Vec<(Option<f64>, Option<f64>)> {
        let mus: Vec<Option<f64>> = if self.sweep.mu.is_empty() {
            vec![None]
        } else {
            self.sweep.mu.iter().copied().map(Some).collect()
        };
        let gammas: Vec<Option<f64>> = if self.sweep.gamma.is_empty() {
            vec![None]
        } else {
            self.sweep.gamma.iter().copied().map(Some).collect()
        };
        mus.iter()
            .flat_map(|&m| gammas.iter().map(move |&g| (m, g)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        for id in AttackId::ALL {
            let r = ExperimentManifest::new(id).resolve().unwrap();
            assert_eq!(r.game.seed, DEFAULT_SEED);
            assert_eq!(r.attack.id, id);
        }
        let r = ExperimentManifest::new(AttackId::Thm4Superposition).resolve().unwrap();
        assert_eq!((r.game.primitive.n, r.game.primitive.m), (6, 8));
    }

    #[test]
    fn example1_gamma_sets_boundary_mu() {
        let mut m = ExperimentManifest::new(AttackId::Example1DoubleQea);
        m.gamma = Some(0.5);
        let r = m.resolve().unwrap();
        assert!((r.game.mu - 0.75).abs() < 1e-15);
        assert_eq!(r.attack.gamma, Some(0.5));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let text = r#"{"experiment": "thm5-qea", "mu": 0.6, "trials": 10, "sweep": {"mu": [0.4, 0.5]}}"#;
        let m = ExperimentManifest::from_json(text).unwrap();
        assert_eq!(m.seed, DEFAULT_SEED);
        assert_eq!(m.sweep_points(), vec![(Some(0.4), None), (Some(0.5), None)]);
        let back = ExperimentManifest::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(ExperimentManifest::from_json(r#"{"experiment": "thm9"}"#).is_err());
        assert!(ExperimentManifest::from_json(r#"{"experiment": "thm5-qea", "bogus": 1}"#).is_err());
    }

    #[test]
    fn invalid_points_are_manifest_errors() {
        let mut m = ExperimentManifest::new(AttackId::Thm5Qea);
        m.mu = Some(1.5);
        assert_eq!(m.resolve().unwrap_err().exit_code(), 2);
        let mut m = ExperimentManifest::new(AttackId::Example1DoubleQea);
        m.gamma = Some(0.9);
        assert_eq!(m.resolve().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn grid_is_mu_major() {
        let mut m = ExperimentManifest::new(AttackId::Thm5Qea);
        m.sweep.mu = vec![0.4, 0.6];
        m.sweep.gamma = vec![0.1, 0.2];
        assert_eq!(
            m.sweep_points(),
            vec![
                (Some(0.4), Some(0.1)),
                (Some(0.4), Some(0.2)),
                (Some(0.6), Some(0.1)),
                (Some(0.6), Some(0.2))
            ]
        );
    }
}
