use rand::Rng;

use super::transcript::{GameTranscript, GuessRecord, MuCheck, QueryEntry, Reason, StateDump};
use super::{
    p_ov_classical, AdversaryStrategy, Challenge, ChallengeView, Forgery, GameConfig,
    GameContext, GameMode, Phase,
};
use crate::error::{Error, Result};
use crate::oracles::{OracleInstance, ANC, MSG};
use crate::primitives::{verify_quantum_tag, FunctionFamily, Primitive, StateDescription};
use crate::qstate::{Layout, StateVector, TOL};
use crate::seeds::{self, SimRng};

/// Pure challenge state on the query registers: `|m⟩|0…0⟩` for classical
/// messages, `|ψ_m⟩|0…0⟩` for quantum ones.
pub fn encode_challenge(challenge: &Challenge, ctx: &GameContext) -> Result<StateVector> {
    match challenge {
        Challenge::Classical { m } => {
            if *m >> ctx.n != 0 {
                return Err(Error::WidthMismatch(format!(
                    "message {m} wider than {} bits",
                    ctx.n
                )));
            }
            StateVector::basis(ctx.query_layout(), m << ctx.anc_bits)
        }
        Challenge::Quantum { desc } => {
            let psi = desc.prepare(Layout::single(MSG, ctx.n))?;
            if ctx.anc_bits == 0 {
                Ok(psi)
            } else {
                psi.tensor(&StateVector::zero(Layout::single(ANC, ctx.anc_bits))?)
            }
        }
    }
}

/// `F(challenge, ρ^in_i) ≤ 1 − μ` for every recorded input. With `strong`,
/// the compared states also carry the randomness register, so a query whose
/// `r_i` differs from the forgery's `r*` is orthogonal to the challenge.
pub fn check_mu_condition(
    challenge: &StateVector,
    inputs: &[StateVector],
    randomness: &[Option<u64>],
    mu: f64,
    strong: bool,
    r_star: Option<u64>,
) -> Result<MuCheck> {
    let names: Vec<String> = challenge
        .layout()
        .registers()
        .iter()
        .map(|r| r.name.clone())
        .collect();
    let regs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut fidelities = Vec::with_capacity(inputs.len());
    for (i, input) in inputs.iter().enumerate() {
        let mut f = input.overlap_on(challenge, &regs)?;
        if strong && randomness.get(i).copied().flatten() != r_star {
            f = 0.0;
        }
        fidelities.push(f);
    }
    let passed = fidelities.iter().all(|&f| f <= 1.0 - mu + TOL);
    Ok(MuCheck {
        fidelities,
        passed,
        enforced: true,
    })
}

struct Learning<'a> {
    cfg: &'a GameConfig,
    oracle: OracleInstance,
    entries: Vec<QueryEntry>,
    inputs: Vec<StateVector>,
    randomness: Vec<Option<u64>>,
}

impl Learning<'_> {
    fn phase(
        &mut self,
        ctx: &mut GameContext,
        adv: &mut dyn AdversaryStrategy,
        rng: &mut SimRng,
    ) -> Result<()> {
        while let Some(mut state) = adv.next_query(ctx, rng)? {
            if ctx.queries_used >= self.cfg.q {
                return Err(Error::QueryBudgetExceeded { limit: self.cfg.q });
            }
            check_query_widths(&state, ctx)?;
            let input = state.clone();
            let rec = self.oracle.query(&mut state)?;
            self.entries.push(QueryEntry {
                index: rec.index,
                phase: ctx.phase,
                r: rec.r,
                in_desc: StateDump::of(&input, self.cfg.dump_states),
                out_desc: StateDump::of(&state, self.cfg.dump_states),
            });
            self.inputs.push(input);
            self.randomness.push(rec.r);
            ctx.queries_used += 1;
            adv.receive(state, rec, rng)?;
        }
        Ok(())
    }
}

fn check_query_widths(state: &StateVector, ctx: &GameContext) -> Result<()> {
    let w = state.layout().width(MSG)?;
    if w != ctx.n {
        return Err(Error::WidthMismatch(format!(
            "query message register has {w} qubits, game uses {}",
            ctx.n
        )));
    }
    if ctx.anc_bits > 0 {
        let a = state.layout().width(ANC)?;
        if a != ctx.anc_bits {
            return Err(Error::WidthMismatch(format!(
                "query ancilla has {a} qubits, game uses {}",
                ctx.anc_bits
            )));
        }
    }
    Ok(())
}

pub(super) fn context(cfg: &GameConfig, prim: &Primitive) -> GameContext {
    let (m_out, l) = match prim {
        Primitive::DeterministicMac(p) => (p.family.m_out(), 0),
        Primitive::RandMac(p) => (p.family.m_out(), p.l()),
        Primitive::DeterministicUnitary(_) => (0, 0),
        Primitive::RandUnitary(p) => (0, p.family.index_bits()),
    };
    GameContext {
        mode: cfg.mode,
        q: cfg.q,
        mu: cfg.mu,
        strong: cfg.strong,
        aua: cfg.aua,
        classical: prim.is_classical(),
        randomized: prim.is_randomized(),
        n: prim.n(),
        m_out,
        l,
        anc_bits: prim.ancilla_bits(),
        phase: Phase::Learning,
        queries_used: 0,
    }
}

fn expected_quantum_output(
    prim: &Primitive,
    desc: &StateDescription,
    r: Option<u64>,
) -> Result<Option<StateVector>> {
    match prim {
        Primitive::DeterministicUnitary(p) => {
            let psi = desc.prepare(Layout::single(MSG, p.message_qubits()))?;
            Ok(Some(psi.apply_unitary(&p.unitary, &[MSG])?))
        }
        Primitive::RandUnitary(p) => match r {
            Some(r) => Ok(Some(p.expected_output(desc, r)?)),
            None => Ok(None),
        },
        _ => Err(Error::Protocol("quantum forgery against a classical binding".into())),
    }
}

fn selective_mismatch(committed: &Challenge, guessed: &Challenge) -> Error {
    match (committed, guessed) {
        (Challenge::Classical { m: a }, Challenge::Classical { m: b }) => Error::SelectiveMismatch {
            committed: *a as u64,
            guessed: *b as u64,
        },
        _ => Error::Protocol("forged message differs from the committed challenge".into()),
    }
}

/// One complete game: setup, learning, challenge, optional second learning
/// phase, guess and verdict. All randomness derives from `trial_seed`.
pub fn run_game(
    cfg: &GameConfig,
    adv: &mut dyn AdversaryStrategy,
    trial_seed: u64,
) -> Result<GameTranscript> {
    cfg.validate()?;
    let prim = cfg.primitive.instantiate(trial_seed, cfg.test)?;
    let mut arng = seeds::rng_for(trial_seed, "adversary", 0);
    let mut crng = seeds::rng_for(trial_seed, "challenger", 0);
    let mut vrng = seeds::rng_for(trial_seed, "verifier", 0);
    let mut ctx = context(cfg, &prim);
    let mut learning = Learning {
        cfg,
        oracle: prim.oracle(seeds::derive(trial_seed, "oracle", 0)),
        entries: Vec::new(),
        inputs: Vec::new(),
        randomness: Vec::new(),
    };

    let committed = if cfg.mode == GameMode::QSel {
        Some(
            adv.select_challenge(&ctx, &mut arng)?
                .ok_or_else(|| Error::Protocol("selective adversary must commit a challenge".into()))?,
        )
    } else {
        None
    };
    learning.phase(&mut ctx, adv, &mut arng)?;

    let challenge = match cfg.mode {
        GameMode::QSel => committed,
        GameMode::QEx => adv.select_challenge(&ctx, &mut arng)?,
        GameMode::QUni => {
            let (ch, view) = if ctx.classical {
                let m = crng.random_range(0..1usize << ctx.n);
                (Challenge::Classical { m }, ChallengeView::Classical(m))
            } else {
                let desc = StateDescription::Haar { seed: crng.random() };
                let psi = desc.prepare(Layout::single(MSG, ctx.n))?;
                (Challenge::Quantum { desc }, ChallengeView::Quantum(psi))
            };
            adv.receive_challenge(view, &mut arng)?;
            Some(ch)
        }
    };
    if cfg.aua {
        ctx.phase = Phase::SecondLearning;
        learning.phase(&mut ctx, adv, &mut arng)?;
    }

    let forgery = adv.guess(&ctx, &mut arng)?;
    let (effective, guess, accepted, r_star) = match forgery {
        Forgery::Abstain => (challenge, GuessRecord::Abstain, None, None),
        Forgery::Classical { m, t, r } => {
            let guessed = Challenge::Classical { m };
            let accept = match (&prim, cfg.mode, &challenge) {
                (_, GameMode::QUni, Some(c)) if *c != guessed => false,
                (Primitive::DeterministicMac(mac), ..) => mac.verify(m, t)?,
                (Primitive::RandMac(mac), ..) => match r {
                    Some(r) => mac.verify(m, t, r)?,
                    None => false,
                },
                _ => {
                    return Err(Error::Protocol(
                        "classical forgery against a quantum binding".into(),
                    ))
                }
            };
            if let Some(c) = &challenge {
                if cfg.mode != GameMode::QUni && *c != guessed {
                    return Err(selective_mismatch(c, &guessed));
                }
            }
            let eff = if cfg.mode == GameMode::QUni { challenge } else { Some(guessed) };
            (eff, GuessRecord::Classical { m, t, r }, Some(accept), r)
        }
        Forgery::Quantum { desc, tag, r } => {
            let resolved = match (cfg.mode, &challenge, desc) {
                (GameMode::QUni, Some(Challenge::Quantum { desc: d }), _) => d.clone(),
                (_, Some(Challenge::Quantum { desc: d }), Some(g)) => {
                    if *d != g {
                        return Err(Error::Protocol(
                            "forged state differs from the committed challenge".into(),
                        ));
                    }
                    g
                }
                (_, Some(Challenge::Quantum { desc: d }), None) => d.clone(),
                (_, None, Some(g)) => g,
                (_, Some(Challenge::Classical { .. }), _) | (_, None, None) => {
                    return Err(Error::Protocol("quantum forgery without a quantum challenge".into()))
                }
            };
            let expected = expected_quantum_output(&prim, &resolved, r)?;
            let (accept, fid) = match expected {
                Some(e) => {
                    let e = e.density();
                    let f = e.fidelity(&tag)?;
                    (verify_quantum_tag(&cfg.test, &e, &tag, &mut vrng)?, f)
                }
                None => (false, 0.0),
            };
            let rec = GuessRecord::Quantum {
                desc: Some(resolved.clone()),
                r,
                tag_fidelity: fid,
                tag_purity: tag.purity(),
            };
            (Some(Challenge::Quantum { desc: resolved }), rec, Some(accept), r)
        }
    };

    let mu_check = match &effective {
        Some(c) => {
            let state = encode_challenge(c, &ctx)?;
            let mut chk = check_mu_condition(
                &state,
                &learning.inputs,
                &learning.randomness,
                cfg.mu,
                cfg.strong,
                r_star,
            )?;
            chk.enforced = cfg.enforces_mu();
            Some(chk)
        }
        None => None,
    };

    let p_ov = if !cfg.enforces_mu() {
        0.0
    } else if ctx.classical {
        p_ov_classical(cfg.q, cfg.mu)
    } else {
        let max_f = match &effective {
            Some(c) if !learning.inputs.is_empty() => max_plain_fidelity(c, &ctx, &learning.inputs)?,
            _ => 0.0,
        };
        if learning.inputs.is_empty() {
            0.0
        } else {
            cfg.test.acceptance_probability(max_f)
        }
    };

    let (verdict, reason) = match accepted {
        None => (0, Reason::Abstained),
        Some(_) if mu_check.as_ref().is_some_and(|c| c.enforced && !c.passed) => {
            (0, Reason::MuViolation)
        }
        Some(true) => (1, Reason::Accepted),
        Some(false) => (0, Reason::Rejected),
    };

    Ok(GameTranscript {
        trial: 0,
        seed: trial_seed,
        mode: cfg.mode,
        queries: learning.entries,
        challenge: effective,
        guess,
        mu_check,
        p_ov,
        verdict,
        reason,
        diagnostics: adv.diagnostics(),
    })
}

// Fidelity of the challenge to the closest query, without the strong factor:
// the unitary preserves it, so it equals the output-side overlap.
fn max_plain_fidelity(c: &Challenge, ctx: &GameContext, inputs: &[StateVector]) -> Result<f64> {
    let state = encode_challenge(c, ctx)?;
    let regs = ctx.query_registers();
    let mut best = 0.0f64;
    for s in inputs {
        best = best.max(s.overlap_on(&state, &regs)?);
    }
    Ok(best)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{estimate_win_rate, run_trial, AdversaryFactory};
    use crate::oracles::QueryRecord;
    use crate::primitives::{PrimitiveDescriptor, PrimitiveKind};
    use crate::verifiers::TestConfig;

    fn cfg(kind: PrimitiveKind, mode: GameMode, q: usize, mu: f64) -> GameConfig {
        GameConfig {
            mode,
            q,
            mu,
            strong: false,
            aua: false,
            primitive: PrimitiveDescriptor {
                kind,
                n: 3,
                m: 8,
                l: 3,
                seed: 4,
            },
            test: TestConfig::default(),
            trials: 1,
            seed: 77,
            dump_states: false,
        }
    }

    /// Queries `|m⟩` classically `count` times, then forges `m` with the answer.
    struct Replay {
        m: usize,
        count: usize,
        commit: Option<usize>,
        seen: Option<u64>,
    }

    impl AdversaryStrategy for Replay {
        fn select_challenge(&mut self, _: &GameContext, _: &mut SimRng) -> Result<Option<Challenge>> {
            Ok(self.commit.map(|m| Challenge::Classical { m }))
        }
        fn next_query(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Option<StateVector>> {
            if self.count == 0 {
                return Ok(None);
            }
            self.count -= 1;
            Ok(Some(StateVector::basis(ctx.query_layout(), self.m << ctx.anc_bits)?))
        }
        fn receive(&mut self, out: StateVector, _: QueryRecord, rng: &mut SimRng) -> Result<()> {
            self.seen = Some(out.measure_computational(&[ANC], rng)?.outcome as u64);
            Ok(())
        }
        fn guess(&mut self, ctx: &GameContext, _: &mut SimRng) -> Result<Forgery> {
            let (t, r) = ctx.split_tag(self.seen.unwrap_or(0));
            Ok(Forgery::Classical { m: self.m, t, r })
        }
    }

    /// No queries; uniformly random `(t, r)` for message 0.
    struct Null;

    impl AdversaryStrategy for Null {
        fn next_query(&mut self, _: &GameContext, _: &mut SimRng) -> Result<Option<StateVector>> {
            Ok(None)
        }
        fn receive(&mut self, _: StateVector, _: QueryRecord, _: &mut SimRng) -> Result<()> {
            Ok(())
        }
        fn guess(&mut self, ctx: &GameContext, rng: &mut SimRng) -> Result<Forgery> {
            let (t, r) = ctx.split_tag(rng.random::<u64>() & ((1u64 << ctx.anc_bits) - 1));
            Ok(Forgery::Classical { m: 0, t, r })
        }
    }

    fn replay(m: usize, count: usize, commit: Option<usize>) -> Box<dyn AdversaryStrategy> {
        Box::new(Replay {
            m,
            count,
            commit,
            seen: None,
        })
    }

    #[test]
    fn replayed_query_violates_mu() {
        let c = cfg(PrimitiveKind::DeterministicMac, GameMode::QEx, 1, 0.3);
        let t = run_trial(&c, &|| replay(5, 1, None), 0).unwrap();
        assert_eq!(t.reason, Reason::MuViolation);
        assert_eq!(t.verdict, 0);
        assert!((t.max_challenge_fidelity().unwrap() - 1.0).abs() < 1e-12);
        // The tag itself was valid: only the overlap condition failed.
        let mut uni = c.clone();
        uni.mode = GameMode::QUni;
        let t = run_trial(&uni, &|| replay(5, 1, None), 0).unwrap();
        assert!(!t.mu_check.unwrap().enforced);
    }

    #[test]
    fn budget_and_selective_errors() {
        let c = cfg(PrimitiveKind::DeterministicMac, GameMode::QEx, 1, 0.5);
        assert!(matches!(
            run_trial(&c, &|| replay(1, 2, None), 0),
            Err(Error::QueryBudgetExceeded { limit: 1 })
        ));
        let s = cfg(PrimitiveKind::DeterministicMac, GameMode::QSel, 1, 0.5);
        assert!(matches!(
            run_trial(&s, &|| replay(1, 1, Some(2)), 0),
            Err(Error::SelectiveMismatch { committed: 2, guessed: 1 })
        ));
        assert!(matches!(
            run_trial(&s, &|| replay(1, 1, None), 0),
            Err(Error::Protocol(_))
        ));
    }

    #[test]
    fn mu_condition_cases() {
        let l = Layout::new([(MSG, 2), (ANC, 1)]);
        let ch = StateVector::basis(l.clone(), 0b010).unwrap();
        assert!(check_mu_condition(&ch, &[], &[], 1.0, false, None).unwrap().passed);
        let orth = StateVector::basis(l.clone(), 0b100).unwrap();
        assert!(check_mu_condition(&ch, std::slice::from_ref(&orth), &[None], 1.0, false, None).unwrap().passed);
        let h = 0.5f64.sqrt();
        let mut a = vec![0.0; 8];
        a[0b010] = h;
        a[0b100] = h;
        let mixed = StateVector::from_real(&a, l).unwrap();
        let chk = check_mu_condition(&ch, std::slice::from_ref(&mixed), &[Some(1)], 0.5, false, None).unwrap();
        assert!(chk.passed && (chk.fidelities[0] - 0.5).abs() < 1e-12);
        assert!(!check_mu_condition(&ch, std::slice::from_ref(&mixed), &[Some(1)], 0.6, false, None).unwrap().passed);
        // Strong condition: different randomness makes the states orthogonal.
        assert!(check_mu_condition(&ch, std::slice::from_ref(&mixed), &[Some(1)], 0.6, true, Some(2)).unwrap().passed);
        assert!(!check_mu_condition(&ch, &[mixed], &[Some(1)], 0.6, true, Some(1)).unwrap().passed);
    }

    #[test]
    fn null_adversary_against_construction1() {
        let mut c = cfg(PrimitiveKind::RandMac, GameMode::QEx, 0, 0.5);
        c.trials = 10_000;
        let factory: &dyn AdversaryFactory = &|| Box::new(Null) as Box<dyn AdversaryStrategy>;
        let r = estimate_win_rate(&c, factory).unwrap();
        let p: f64 = 1.0 / 256.0;
        let sd = (p * (1.0 - p) / 1e4).sqrt();
        assert!((r.win_rate - p).abs() < 4.0 * sd, "{}", r.win_rate);
        assert_eq!(r.p_ov, 0.0);
    }

    #[test]
    fn replay_is_bit_exact() {
        let c = cfg(PrimitiveKind::RandMac, GameMode::QEx, 1, 0.3);
        let a = run_trial(&c, &|| replay(2, 1, None), 3).unwrap();
        let b = run_trial(&c, &|| replay(2, 1, None), 3).unwrap();
        assert_eq!(a, b);
    }
}
