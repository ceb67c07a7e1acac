//! Named experiments: default game setup and closed-form predictions per attack.

use qunforge::attacks::{
    example1_advantage, example1_printed_curve, example1_printed_squared, example1_sqrt_ps1,
    thm5_sqrt_ps1, AttackId,
};
use qunforge::games::{p_ov_classical, GameMode};
use qunforge::primitives::PrimitiveKind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defaults {
    pub mode: GameMode,
    pub primitive: PrimitiveKind,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub q: usize,
    pub mu: f64,
    pub aua: bool,
    pub trials: usize,
}

pub fn defaults(id: AttackId) -> Defaults {
    let base = Defaults {
        mode: GameMode::QSel,
        primitive: PrimitiveKind::DeterministicMac,
        n: 2,
        m: 2,
        l: 2,
        q: 2,
        mu: 0.5,
        aua: false,
        trials: 10_000,
    };
    match id {
        AttackId::Thm4Superposition => Defaults {
            mode: GameMode::QEx,
            n: 6,
            m: 8,
            q: 1,
            ..base
        },
        AttackId::TrivialOverlap => Defaults {
            n: 3,
            m: 4,
            mu: 0.75,
            ..base
        },
        AttackId::Thm5Qea => base,
        AttackId::Example1DoubleQea => Defaults {
            q: 3,
            mu: 0.75,
            ..base
        },
        AttackId::AuaEntangle => Defaults {
            mode: GameMode::QUni,
            primitive: PrimitiveKind::DeterministicUnitary,
            n: 3,
            m: 0,
            q: 1,
            aua: true,
            ..base
        },
    }
}

/// Closed-form columns for one parameter point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Analytic {
    pub advantage: Option<f64>,
    /// Per-target `√P_s1` (Example 1 only).
    pub sqrt_ps1: Option<f64>,
    pub printed_curve: Option<f64>,
    pub printed_squared: Option<f64>,
}

/// Predicted advantage of `id` in the given setup, where one is known.
/// `gamma` is the effective overlap amplitude the attack uses.
pub fn analytic(id: AttackId, primitive: PrimitiveKind, q: usize, mu: f64, gamma: f64) -> Analytic {
    let det = primitive == PrimitiveKind::DeterministicMac;
    match id {
        AttackId::Thm4Superposition if det => Analytic {
            advantage: Some(1.0 - p_ov_classical(q, mu)),
            ..Analytic::default()
        },
        AttackId::TrivialOverlap => Analytic {
            advantage: Some(0.0),
            ..Analytic::default()
        },
        AttackId::Thm5Qea if det => Analytic {
            advantage: Some(thm5_sqrt_ps1(gamma) - p_ov_classical(q, mu)),
            ..Analytic::default()
        },
        AttackId::Example1DoubleQea => Analytic {
            advantage: det.then(|| {
                if (mu - (1.0 - gamma * gamma)).abs() < 1e-12 && q == 3 {
                    example1_advantage(gamma)
                } else {
                    example1_sqrt_ps1(gamma) - p_ov_classical(q, mu)
                }
            }),
            sqrt_ps1: Some(example1_sqrt_ps1(gamma)),
            printed_curve: Some(example1_printed_curve(gamma)),
            printed_squared: Some(example1_printed_squared(gamma)),
        },
        AttackId::AuaEntangle if primitive == PrimitiveKind::DeterministicUnitary => Analytic {
            advantage: Some(0.5),
            ..Analytic::default()
        },
        _ => Analytic::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm5_prediction_at_boundary() {
        let a = analytic(AttackId::Thm5Qea, PrimitiveKind::DeterministicMac, 2, 0.5, 0.5f64.sqrt());
        assert!((a.advantage.unwrap() - 0.25).abs() < 1e-12);
        assert!(analytic(AttackId::Thm5Qea, PrimitiveKind::RandMac, 2, 0.5, 0.5).advantage.is_none());
    }

    #[test]
    fn example1_columns() {
        let g = 0.5;
        let a = analytic(AttackId::Example1DoubleQea, PrimitiveKind::DeterministicMac, 3, 0.75, g);
        assert!((a.advantage.unwrap() - example1_advantage(g)).abs() < 1e-15);
        assert!(a.printed_curve.is_some() && a.printed_squared.is_some());
    }
}
