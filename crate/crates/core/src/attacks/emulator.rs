use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Layout, StateVector, UnitaryMatrix};
use crate::seeds;

pub const OUT: &str = "out";
pub const CTL: &str = "ctl";
pub const SPENT: &str = "spent";
const MAIN: &str = "main";
const HELD: &str = "held";

fn qubits_of(states: &[&StateVector]) -> Result<usize> {
    let d = states[0].dim();
    for s in &states[1..] {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
    }
    Ok(d.trailing_zeros() as usize)
}

// W = cR(φ1)·X·H·cR(φr)·H on [main | ctl], reflections controlled on ctl = 1.
fn apply_block(s: &mut StateVector, main: &str, phi1: &StateVector, phir: &StateVector) -> Result<()> {
    let h = UnitaryMatrix::hadamard();
    s.apply_unitary_mut(&h, &[CTL])?;
    s.reflect_mut(phir, &[main], Some((CTL, 1)))?;
    s.apply_unitary_mut(&h, &[CTL])?;
    s.apply_unitary_mut(&UnitaryMatrix::pauli_x(), &[CTL])?;
    s.reflect_mut(phi1, &[main], Some((CTL, 1)))
}

fn apply_block_inverse(
    s: &mut StateVector,
    main: &str,
    phi1: &StateVector,
    phir: &StateVector,
) -> Result<()> {
    let h = UnitaryMatrix::hadamard();
    s.reflect_mut(phi1, &[main], Some((CTL, 1)))?;
    s.apply_unitary_mut(&UnitaryMatrix::pauli_x(), &[CTL])?;
    s.apply_unitary_mut(&h, &[CTL])?;
    s.reflect_mut(phir, &[main], Some((CTL, 1)))?;
    s.apply_unitary_mut(&h, &[CTL])
}

/// One emulation block applied to `|ψ⟩|0⟩` on `[main | ctl]`:
/// `P_r|ψ⟩|0⟩ + R_1(I − P_r)|ψ⟩|1⟩` with `P_r = |φr⟩⟨φr|`, `R_1 = I − 2|φ1⟩⟨φ1|`.
pub fn qe_stage1_state(
    phi1: &StateVector,
    phir: &StateVector,
    psi: &StateVector,
) -> Result<StateVector> {
    let w = qubits_of(&[phi1, phir, psi])?;
    let mut s = psi
        .clone()
        .relabel(Layout::single(MAIN, w))?
        .tensor(&StateVector::zero(Layout::single(CTL, 1))?)?;
    apply_block(&mut s, MAIN, phi1, phir)?;
    Ok(s)
}

/// `|⟨φr| Tr_ctl(|χ⟩⟨χ|) |φr⟩|²`.
pub fn qe_stage1_success(phi1: &StateVector, phir: &StateVector, psi: &StateVector) -> Result<f64> {
    let chi = qe_stage1_state(phi1, phir, psi)?;
    Ok(chi.overlap_on(phir, &[MAIN])?.powi(2))
}

/// Full circuit state `[out | ctl | spent]` plus the post-selection on the
/// spent register.
#[derive(Clone, Debug)]
pub struct EmulationOutcome {
    pub state: StateVector,
    /// `⟨φr|ρ_spent|φr⟩`.
    pub success_probability: f64,
    pub success: bool,
    /// `[out | ctl]` given success.
    pub conditioned: Option<StateVector>,
}

impl EmulationOutcome {
    /// `⟨Uψ|ρ_out|Uψ⟩` after successful post-selection.
    pub fn conditioned_fidelity(&self, target: &StateVector) -> Result<Option<f64>> {
        self.conditioned
            .as_ref()
            .map(|c| c.overlap_on(target, &[OUT]))
            .transpose()
    }

    /// Same overlap with the post-selection flag ignored.
    pub fn unconditioned_fidelity(&self, target: &StateVector) -> Result<f64> {
        self.state.overlap_on(target, &[OUT])
    }

    /// The emulated output: conditioned on success when it occurred.
    pub fn output(&self) -> Result<DensityMatrix> {
        match (&self.conditioned, self.success) {
            (Some(c), true) => c.reduced(&[OUT]),
            _ => self.state.reduced(&[OUT]),
        }
    }
}

/// One-block emulator of an unknown `U` from the sample pair `(φ1, Uφ1)` and
/// one consumed copy of `Uφr`. Stage one maps `|ψ⟩|0⟩` with the block built
/// from `φr, φ1`; the main register is then swapped for the held `Uφr`; the
/// inverse block built from `Uφr, Uφ1` follows; finally the spent register
/// is tested against `|φr⟩`.
pub fn qe_one_block_emulator(
    sample: (&StateVector, &StateVector),
    reference: (&StateVector, &StateVector),
    psi: &StateVector,
    rng_seed: u64,
) -> Result<EmulationOutcome> {
    let (phi1, u_phi1) = sample;
    let (phir, u_phir) = reference;
    let w = qubits_of(&[phi1, u_phi1, phir, u_phir, psi])?;
    let chi = qe_stage1_state(phi1, phir, psi)?;
    let mut s = chi.tensor(&u_phir.clone().relabel(Layout::single(HELD, w))?)?;
    s.swap_registers(MAIN, HELD)?;
    let mut s = s.rename_register(MAIN, OUT)?.rename_register(HELD, SPENT)?;
    apply_block_inverse(&mut s, OUT, u_phi1, u_phir)?;
    let (p, conditioned) = s.condition_on(phir, &[SPENT])?;
    let mut rng = seeds::rng(rng_seed);
    let success = rng.random::<f64>() < p;
    Ok(EmulationOutcome {
        state: s,
        success_probability: p,
        success,
        conditioned,
    })
}

/// `√P_s1` for `⟨φr|ψ⟩ = γ`, `⟨φ1|ψ⟩ = 0`, `⟨φr|φ1⟩ = √(1−γ²)`.
pub fn thm5_sqrt_ps1(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    g2 * (1.0 + 4.0 * (1.0 - g2).powi(2))
}

/// `μ(1−μ)(4μ−1)`: win rate `thm5_sqrt_ps1(√(1−μ))` minus `1 − μ²`.
pub fn thm5_advantage(mu: f64) -> f64 {
    mu * (1.0 - mu) * (4.0 * mu - 1.0)
}

/// Per-target `√P_s1` when `⟨φr|φ1⟩ = √(1−2γ²)`.
pub fn example1_sqrt_ps1(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    g2 * (1.0 + 4.0 * (1.0 - 2.0 * g2).powi(2))
}

/// `example1_sqrt_ps1(γ) − (1 − (1−γ²)³) = γ²(2 − 13γ² + 15γ⁴)`.
pub fn example1_advantage(gamma: f64) -> f64 {
    example1_sqrt_ps1(gamma) - (1.0 - (1.0 - gamma * gamma).powi(3))
}

/// Printed closed form `γ²(2 − 5γ² + 3γ⁴)`.
pub fn example1_printed_curve(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    g2 * (2.0 - 5.0 * g2 + 3.0 * g2 * g2)
}

/// Printed intermediate `γ⁴(1 + 4(1−2γ²)²)² − (1 − (1−γ²)³)`.
pub fn example1_printed_squared(gamma: f64) -> f64 {
    example1_sqrt_ps1(gamma).powi(2) - (1.0 - (1.0 - gamma * gamma).powi(3))
}

/// Structured query states on a `qubits`-wide register: `φ1 = |a⟩`,
/// `φr = √(1−γ²)|a⟩ + γ|b⟩`, `ψ = |b⟩`.
pub fn thm5_structure(
    qubits: usize,
    gamma: f64,
    a: usize,
    b: usize,
) -> Result<(StateVector, StateVector, StateVector)> {
    let l = Layout::single("q", qubits);
    let d = l.dim();
    if a == b || a >= d || b >= d || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "structure needs distinct a, b < {d} and γ in [0, 1]"
        )));
    }
    let mut r = vec![0.0; d];
    r[a] = (1.0 - gamma * gamma).sqrt();
    r[b] = gamma;
    Ok((
        StateVector::basis(l.clone(), a)?,
        StateVector::from_real(&r, l.clone())?,
        StateVector::basis(l, b)?,
    ))
}

/// `φ1 = |m1⟩`, `φr = δ|m1⟩ + γ|m2⟩ + γ|m3⟩` with `δ = √(1−2γ²)`; returns
/// `(φ1, φr, |m2⟩, |m3⟩)`.
pub fn example1_structure(
    qubits: usize,
    gamma: f64,
    m: [usize; 3],
) -> Result<(StateVector, StateVector, StateVector, StateVector)> {
    let l = Layout::single("q", qubits);
    let d = l.dim();
    if m[0] == m[1] || m[1] == m[2] || m[0] == m[2] || m.iter().any(|&x| x >= d) {
        return Err(Error::InvalidParameter(format!("need three distinct messages below {d}")));
    }
    if !(0.0..=std::f64::consts::FRAC_1_SQRT_2 + 1e-12).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1/√2]")));
    }
    let mut r = vec![0.0; d];
    r[m[0]] = (1.0 - 2.0 * gamma * gamma).max(0.0).sqrt();
    r[m[1]] = gamma;
    r[m[2]] = gamma;
    Ok((
        StateVector::basis(l.clone(), m[0])?,
        StateVector::from_real(&r, l.clone())?,
        StateVector::basis(l.clone(), m[1])?,
        StateVector::basis(l, m[2])?,
    ))
}
