use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracles::{generate_blinding, OracleInstance, ANC, MSG};
use crate::primitives::{DeterministicMac, FunctionFamily};
use crate::qstate::{Layout, StateVector};
use crate::seeds::{self, SimRng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlindContext {
    pub n: usize,
    pub m_out: usize,
    pub epsilon: f64,
}

impl BlindContext {
    /// `[msg n | anc m+1]`: the extra top ancilla bit carries `⊥`.
    pub fn query_layout(&self) -> Layout {
        Layout::new([(MSG, self.n), (ANC, self.m_out + 1)])
    }
}

/// Adversary for the blind-unforgeability game; it only ever sees the
/// blinded oracle.
pub trait BlindForger {
    fn next_query(&mut self, ctx: &BlindContext, rng: &mut SimRng) -> Result<Option<StateVector>>;
    fn receive(&mut self, out: StateVector, ctx: &BlindContext, rng: &mut SimRng) -> Result<()>;
    fn forge(&mut self, ctx: &BlindContext, rng: &mut SimRng) -> Result<Option<(usize, u64)>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindOutcome {
    pub verdict: bool,
    pub valid_tag: bool,
    pub in_blinding: bool,
    pub queries: usize,
    pub blinding_size: usize,
}

/// Blinding draw, oracle interaction, forgery, then `1` iff the tag verifies
/// and the message lies in `B_ε`.
pub fn run_blindforge(
    mac: &DeterministicMac,
    epsilon: f64,
    adv: &mut dyn BlindForger,
    seed: u64,
) -> Result<BlindOutcome> {
    let n = mac.family.n_in();
    let blinding = Arc::new(generate_blinding(epsilon, n, seeds::derive(seed, "blindforge", 0))?);
    let mut oracle = OracleInstance::blinded(mac.table(), blinding.clone());
    let ctx = BlindContext {
        n,
        m_out: mac.family.m_out(),
        epsilon,
    };
    let mut rng = seeds::rng_for(seed, "blind-adversary", 0);
    let mut queries = 0;
    while let Some(mut q) = adv.next_query(&ctx, &mut rng)? {
        oracle.query(&mut q)?;
        queries += 1;
        adv.receive(q, &ctx, &mut rng)?;
    }
    let (valid_tag, in_blinding) = match adv.forge(&ctx, &mut rng)? {
        Some((m, t)) => (mac.verify(m, t)?, blinding.contains(m)),
        None => (false, false),
    };
    Ok(BlindOutcome {
        verdict: valid_tag && in_blinding,
        valid_tag,
        in_blinding,
        queries,
        blinding_size: blinding.len(),
    })
}

/// Makes no queries and outputs a fixed pair.
#[derive(Clone, Copy, Debug)]
pub struct FixedForger {
    pub m: usize,
    pub t: u64,
}

impl BlindForger for FixedForger {
    fn next_query(&mut self, _: &BlindContext, _: &mut SimRng) -> Result<Option<StateVector>> {
        Ok(None)
    }
    fn receive(&mut self, _: StateVector, _: &BlindContext, _: &mut SimRng) -> Result<()> {
        Ok(())
    }
    fn forge(&mut self, _: &BlindContext, _: &mut SimRng) -> Result<Option<(usize, u64)>> {
        Ok(Some((self.m, self.t)))
    }
}

/// Queries `|m, 0⟩` once and replays the answer; on `⊥` it guesses a tag.
#[derive(Clone, Debug)]
pub struct ReplayForger {
    pub m: usize,
    pub answer: Option<u64>,
    pub saw_bottom: bool,
    asked: bool,
}

impl ReplayForger {
    pub fn new(m: usize) -> Self {
        ReplayForger {
            m,
            answer: None,
            saw_bottom: false,
            asked: false,
        }
    }
}

impl BlindForger for ReplayForger {
    fn next_query(&mut self, ctx: &BlindContext, _: &mut SimRng) -> Result<Option<StateVector>> {
        if self.asked {
            return Ok(None);
        }
        self.asked = true;
        Ok(Some(StateVector::basis(ctx.query_layout(), self.m << (ctx.m_out + 1))?))
    }

    fn receive(&mut self, out: StateVector, ctx: &BlindContext, rng: &mut SimRng) -> Result<()> {
        let y = out.measure_computational(&[ANC], rng)?.outcome as u64;
        if y >> ctx.m_out == 1 {
            self.saw_bottom = true;
        } else {
            self.answer = Some(y);
        }
        Ok(())
    }

    fn forge(&mut self, ctx: &BlindContext, rng: &mut SimRng) -> Result<Option<(usize, u64)>> {
        let t = match self.answer {
            Some(t) => t,
            None => rng.random::<u64>() & ((1u64 << ctx.m_out) - 1),
        };
        Ok(Some((self.m, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{construction1_keygen, KeyedFunctionFamily};

    fn mac(seed: u64) -> DeterministicMac {
        let family = Arc::new(KeyedFunctionFamily::new(6, 6, 4, 3).unwrap());
        DeterministicMac {
            family,
            key: construction1_keygen(6, seed),
        }
    }

    #[test]
    fn zero_epsilon_never_wins() {
        for s in 0..200 {
            let mac = mac(s);
            let mut f = FixedForger { m: 5, t: mac.tag(5) };
            assert!(!run_blindforge(&mac, 0.0, &mut f, s).unwrap().verdict);
        }
    }

    #[test]
    fn fixed_forger_rate() {
        // A valid tag for m* wins exactly when m* is blinded: rate ε.
        let n = 4000;
        let (mut valid, mut wrong) = (0, 0);
        for s in 0..n {
            let mac = mac(s);
            let mut good = FixedForger { m: 9, t: mac.tag(9) };
            valid += usize::from(run_blindforge(&mac, 0.25, &mut good, s).unwrap().verdict);
            let mut bad = FixedForger { m: 9, t: mac.tag(9) ^ 1 };
            wrong += usize::from(run_blindforge(&mac, 0.25, &mut bad, s).unwrap().verdict);
        }
        let rate = valid as f64 / n as f64;
        assert!((rate - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / n as f64).sqrt(), "{rate}");
        assert_eq!(wrong, 0);
    }

    #[test]
    fn replay_loses_when_unblinded() {
        for s in 0..300 {
            let mac = mac(s);
            let mut f = ReplayForger::new(3);
            let out = run_blindforge(&mac, 0.5, &mut f, s).unwrap();
            assert_eq!(out.queries, 1);
            assert_eq!(f.saw_bottom, out.in_blinding);
            if !out.in_blinding {
                assert!(out.valid_tag);
                assert!(!out.verdict);
            }
        }
    }
}
