use rand::Rng;
use serde::{Deserialize, Serialize};

use super::emulator::{qe_one_block_emulator, qe_stage1_success, OUT};
use crate::error::{Error, Result};
use crate::games::{AdversaryStrategy, Challenge, Forgery, GameContext};
use crate::oracles::{QueryRecord, ANC, MSG};
use crate::qstate::StateVector;
use crate::seeds::SimRng;

const Q: &str = "q";

fn distinct_messages<const K: usize>(n: usize, rng: &mut SimRng) -> Result<[usize; K]> {
    let d = 1usize << n;
    if d < K {
        return Err(Error::InvalidParameter(format!(
            "attack needs {K} distinct messages, only {d} exist"
        )));
    }
    let mut out = [0usize; K];
    for i in 0..K {
        loop {
            let m = rng.random_range(0..d);
            if !out[..i].contains(&m) {
                out[i] = m;
                break;
            }
        }
    }
    Ok(out)
}

/// Query-register state `Σ_m a_m |m⟩|0⟩`.
fn message_superposition(ctx: &GameContext, amps: &[(usize, f64)]) -> Result<StateVector> {
    let layout = ctx.query_layout();
    let mut v = vec![0.0; layout.dim()];
    for &(m, a) in amps {
        v[m << ctx.anc_bits] += a;
    }
    StateVector::from_real(&v, layout)
}

/// The query registers viewed as one register `q`.
fn flatten(state: StateVector, ctx: &GameContext) -> Result<StateVector> {
    if ctx.anc_bits == 0 {
        state.rename_register(MSG, Q)
    } else {
        state.merge_registers(&[MSG, ANC], Q)
    }
}

fn forge_from(ctx: &GameContext, value: usize) -> (usize, u64, Option<u64>) {
    let m = value >> ctx.anc_bits;
    let anc = (value & ((1usize << ctx.anc_bits) - 1)) as u64;
    let (t, r) = ctx.split_tag(anc);
    (m, t, r)
}

/// One uniform-superposition query; the measured `(m, f(m))` is the forgery.
#[derive(Clone, Debug, Default)]
pub struct SuperpositionMeasure {
    sent: bool,
    seen: Option<usize>,
}

impl AdversaryStrategy for SuperpositionMeasure {
    fn next_query(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Option<StateVector>> {
        if self.sent || ctx.q == 0 {
            return Ok(None);
        }
        self.sent = true;
        let d = 1usize << ctx.n;
        let a = (1.0 / d as f64).sqrt();
        let amps: Vec<(usize, f64)> = (0..d).map(|m| (m, a)).collect();
        Ok(Some(message_superposition(ctx, &amps)?))
    }

    fn receive(&mut self, out: StateVector, _: QueryRecord, rng: &mut SimRng) -> Result<()> {
        let regs = if out.layout().contains(ANC) { vec![MSG, ANC] } else { vec![MSG] };
        self.seen = Some(out.measure_computational(&regs, rng)?.outcome);
        Ok(())
    }

    fn guess(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Forgery> {
        Ok(match self.seen {
            Some(v) => {
                let (m, t, r) = forge_from(ctx, v);
                Forgery::Classical { m, t, r }
            }
            None => Forgery::Abstain,
        })
    }
}

/// `q` queries `√μ|m′⟩ + √(1−μ)|m*⟩`, each measured; forges `m*` if any
/// measurement lands on it.
#[derive(Clone, Debug, Default)]
pub struct TrivialOverlap {
    pair: Option<[usize; 2]>,
    issued: usize,
    found: Option<usize>,
}

impl TrivialOverlap {
    fn pair(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<[usize; 2]> {
        if self.pair.is_none() {
            self.pair = Some(distinct_messages::<2>(ctx.n, rng)?);
        }
        Ok(self.pair.expect("set above"))
    }
}

impl AdversaryStrategy for TrivialOverlap {
    fn select_challenge(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<Challenge>> {
        Ok(Some(Challenge::Classical {
            m: self.pair(ctx, rng)?[0],
        }))
    }

    fn next_query(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<StateVector>> {
        if self.issued >= ctx.q {
            return Ok(None);
        }
        let [target, helper] = self.pair(ctx, rng)?;
        self.issued += 1;
        Ok(Some(message_superposition(
            ctx,
            &[(helper, ctx.mu.sqrt()), (target, (1.0 - ctx.mu).sqrt())],
        )?))
    }

    fn receive(&mut self, out: StateVector, _: QueryRecord, rng: &mut SimRng) -> Result<()> {
        let regs = if out.layout().contains(ANC) { vec![MSG, ANC] } else { vec![MSG] };
        let v = out.measure_computational(&regs, rng)?.outcome;
        let anc = out.layout().width(ANC).unwrap_or(0);
        if self.found.is_none() && Some(v >> anc) == self.pair.map(|p| p[0]) {
            self.found = Some(v);
        }
        Ok(())
    }

    fn guess(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Forgery> {
        Ok(match self.found {
            Some(v) => {
                let (m, t, r) = forge_from(ctx, v);
                Forgery::Classical { m, t, r }
            }
            None => Forgery::Abstain,
        })
    }
}

/// Target/helper messages and overlap amplitude of an emulation attack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QEAttackParams {
    /// `None`: `γ = √(1−μ)`, the largest overlap the game allows.
    pub gamma: Option<f64>,
}

/// Commits `m`, queries `|m′,0⟩` and `√(1−γ²)|m′,0⟩ + γ|m,0⟩`, emulates the
/// oracle on `|m,0⟩` with one block and measures the output.
#[derive(Clone, Debug)]
pub struct Thm5Qea {
    pub params: QEAttackParams,
    pair: Option<[usize; 2]>,
    outputs: Vec<StateVector>,
    diag: Vec<(String, f64)>,
}

impl Thm5Qea {
    pub fn new(params: QEAttackParams) -> Self {
        Thm5Qea {
            params,
            pair: None,
            outputs: Vec::new(),
            diag: Vec::new(),
        }
    }

    fn gamma(&self, ctx: &GameContext) -> f64 {
        self.params.gamma.unwrap_or_else(|| (1.0 - ctx.mu).max(0.0).sqrt())
    }

    fn pair(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<[usize; 2]> {
        if self.pair.is_none() {
            self.pair = Some(distinct_messages::<2>(ctx.n, rng)?);
        }
        Ok(self.pair.expect("set above"))
    }

    fn queries(&self, ctx: &GameContext) -> Result<[StateVector; 2]> {
        let [m, helper] = self.pair.ok_or_else(|| Error::Protocol("no target chosen".into()))?;
        let g = self.gamma(ctx);
        Ok([
            message_superposition(ctx, &[(helper, 1.0)])?,
            message_superposition(ctx, &[(helper, (1.0 - g * g).sqrt()), (m, g)])?,
        ])
    }
}

impl AdversaryStrategy for Thm5Qea {
    fn select_challenge(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<Challenge>> {
        Ok(Some(Challenge::Classical {
            m: self.pair(ctx, rng)?[0],
        }))
    }

    fn next_query(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<StateVector>> {
        let k = self.outputs.len();
        if k >= 2 || ctx.queries_used >= ctx.q {
            return Ok(None);
        }
        self.pair(ctx, rng)?;
        Ok(Some(self.queries(ctx)?[k].clone()))
    }

    fn receive(&mut self, out: StateVector, _: QueryRecord, _: &mut SimRng) -> Result<()> {
        self.outputs.push(out);
        Ok(())
    }

    fn guess(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Forgery> {
        if self.outputs.len() < 2 {
            return Ok(Forgery::Abstain);
        }
        let [m, _] = self.pair.expect("queries were issued");
        let [phi1, phir] = self.queries(ctx)?;
        let psi = message_superposition(ctx, &[(m, 1.0)])?;
        let (phi1, phir, psi) = (flatten(phi1, ctx)?, flatten(phir, ctx)?, flatten(psi, ctx)?);
        let u1 = flatten(self.outputs[0].clone(), ctx)?;
        let ur = flatten(self.outputs[1].clone(), ctx)?;
        let e = qe_one_block_emulator((&phi1, &u1), (&phir, &ur), &psi, rng.random())?;
        let v = e.state.measure_computational(&[OUT], rng)?.outcome;
        self.diag = vec![
            ("sqrt_ps1".into(), qe_stage1_success(&phi1, &phir, &psi)?.sqrt()),
            ("post_select_probability".into(), e.success_probability),
            ("post_select_success".into(), f64::from(u8::from(e.success))),
        ];
        let (mm, t, r) = forge_from(ctx, v);
        Ok(if mm == m {
            Forgery::Classical { m, t, r }
        } else {
            Forgery::Abstain
        })
    }

    fn diagnostics(&self) -> Vec<(String, f64)> {
        self.diag.clone()
    }
}

/// Queries `|m1,0⟩` and two copies of `δ|m1,0⟩ + γ|m2,0⟩ + γ|m3,0⟩`, then
/// runs one emulation per target. Commits to and forges `m2`; the `m3`
/// emulation is reported through diagnostics.
#[derive(Clone, Debug)]
pub struct Example1DoubleQea {
    pub gamma: f64,
    msgs: Option<[usize; 3]>,
    outputs: Vec<StateVector>,
    diag: Vec<(String, f64)>,
}

impl Example1DoubleQea {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= std::f64::consts::FRAC_1_SQRT_2 + 1e-12) {
            return Err(Error::InvalidParameter(format!("γ = {gamma} outside (0, 1/√2]")));
        }
        Ok(Example1DoubleQea {
            gamma,
            msgs: None,
            outputs: Vec::new(),
            diag: Vec::new(),
        })
    }

    fn msgs(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<[usize; 3]> {
        if self.msgs.is_none() {
            self.msgs = Some(distinct_messages::<3>(ctx.n, rng)?);
        }
        Ok(self.msgs.expect("set above"))
    }

    fn phi(&self, ctx: &GameContext) -> Result<(StateVector, StateVector)> {
        let [m1, m2, m3] = self.msgs.ok_or_else(|| Error::Protocol("no messages chosen".into()))?;
        let g = self.gamma;
        let delta = (1.0 - 2.0 * g * g).max(0.0).sqrt();
        Ok((
            message_superposition(ctx, &[(m1, 1.0)])?,
            message_superposition(ctx, &[(m1, delta), (m2, g), (m3, g)])?,
        ))
    }
}

impl AdversaryStrategy for Example1DoubleQea {
    fn select_challenge(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<Challenge>> {
        Ok(Some(Challenge::Classical {
            m: self.msgs(ctx, rng)?[1],
        }))
    }

    fn next_query(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Option<StateVector>> {
        let k = self.outputs.len();
        if k >= 3 || ctx.queries_used >= ctx.q {
            return Ok(None);
        }
        self.msgs(ctx, rng)?;
        let (phi1, phir) = self.phi(ctx)?;
        Ok(Some(if k == 0 { phi1 } else { phir }))
    }

    fn receive(&mut self, out: StateVector, _: QueryRecord, _: &mut SimRng) -> Result<()> {
        self.outputs.push(out);
        Ok(())
    }

    fn guess(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Forgery> {
        if self.outputs.len() < 3 {
            return Ok(Forgery::Abstain);
        }
        let [_, m2, m3] = self.msgs.expect("queries were issued");
        let (phi1, phir) = self.phi(ctx)?;
        let (phi1, phir) = (flatten(phi1, ctx)?, flatten(phir, ctx)?);
        let u1 = flatten(self.outputs[0].clone(), ctx)?;
        let mut hits = [0.0; 2];
        let mut forged = None;
        let mut sqrt_ps1 = 0.0;
        for (k, target) in [m2, m3].into_iter().enumerate() {
            let psi = flatten(message_superposition(ctx, &[(target, 1.0)])?, ctx)?;
            let ur = flatten(self.outputs[1 + k].clone(), ctx)?;
            sqrt_ps1 = qe_stage1_success(&phi1, &phir, &psi)?.sqrt();
            let e = qe_one_block_emulator((&phi1, &u1), (&phir, &ur), &psi, rng.random())?;
            let v = e.state.measure_computational(&[OUT], rng)?.outcome;
            let (mm, t, r) = forge_from(ctx, v);
            if mm == target {
                hits[k] = 1.0;
                if k == 0 {
                    forged = Some(Forgery::Classical { m: mm, t, r });
                }
            }
        }
        self.diag = vec![
            ("sqrt_ps1".into(), sqrt_ps1),
            ("target_m2_hit".into(), hits[0]),
            ("target_m3_hit".into(), hits[1]),
            ("both_hit".into(), hits[0] * hits[1]),
        ];
        Ok(forged.unwrap_or(Forgery::Abstain))
    }

    fn diagnostics(&self) -> Vec<(String, f64)> {
        self.diag.clone()
    }
}
