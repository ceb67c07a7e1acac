use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Layout, StateVector, UnitaryMatrix};
use crate::seeds::SimRng;

/// A test taking `κ1` copies of `ρ` and `κ2` copies of `σ` and accepting them as equal.
pub trait QuantumTest: Send + Sync {
    fn name(&self) -> &'static str;
    /// Exact `f(κ1, κ2, F)`.
    fn acceptance_probability(&self, kappa1: usize, kappa2: usize, fidelity: f64) -> f64;
    fn run(
        &self,
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
        kappa1: usize,
        kappa2: usize,
        rng: &mut SimRng,
    ) -> Result<bool>;
    fn err(&self, kappa1: usize, kappa2: usize) -> f64 {
        self.acceptance_probability(kappa1, kappa2, 0.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    #[default]
    IdealFidelity,
    SwapTest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestConfig {
    pub kind: TestKind,
    pub kappa1: usize,
    pub kappa2: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            kind: TestKind::IdealFidelity,
            kappa1: 1,
            kappa2: 1,
        }
    }
}

impl TestConfig {
    pub fn new(kind: TestKind, kappa1: usize, kappa2: usize) -> Result<Self> {
        if kappa1 == 0 || kappa2 == 0 {
            return Err(Error::InvalidParameter("copy counts must be at least 1".into()));
        }
        Ok(TestConfig {
            kind,
            kappa1,
            kappa2,
        })
    }

    pub fn test(&self) -> &'static dyn QuantumTest {
        match self.kind {
            TestKind::IdealFidelity => &IdealFidelity,
            TestKind::SwapTest => &SwapTest,
        }
    }

    pub fn acceptance_probability(&self, fidelity: f64) -> f64 {
        self.test()
            .acceptance_probability(self.kappa1, self.kappa2, fidelity)
    }

    pub fn err(&self) -> f64 {
        self.test().err(self.kappa1, self.kappa2)
    }

    pub fn run(&self, rho: &DensityMatrix, sigma: &DensityMatrix, rng: &mut SimRng) -> Result<bool> {
        self.test().run(rho, sigma, self.kappa1, self.kappa2, rng)
    }
}

/// Accepts with probability exactly `F(ρ, σ)` whatever the copy counts.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdealFidelity;

impl QuantumTest for IdealFidelity {
    fn name(&self) -> &'static str {
        "ideal-fidelity"
    }

    fn acceptance_probability(&self, _k1: usize, _k2: usize, fidelity: f64) -> f64 {
        fidelity.clamp(0.0, 1.0)
    }

    fn run(
        &self,
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
        _k1: usize,
        _k2: usize,
        rng: &mut SimRng,
    ) -> Result<bool> {
        ideal_fidelity_test(rho, sigma, rng)
    }
}

pub fn ideal_fidelity_test(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rng: &mut SimRng,
) -> Result<bool> {
    let f = rho.fidelity(sigma)?;
    Ok(rng.random::<f64>() < f)
}

/// `κ = min(κ1, κ2)` rounds of the SWAP-test circuit, accepting iff all pass.
#[derive(Clone, Copy, Debug, Default)]
pub struct SwapTest;

impl QuantumTest for SwapTest {
    fn name(&self) -> &'static str {
        "swap-test"
    }

    fn acceptance_probability(&self, k1: usize, k2: usize, fidelity: f64) -> f64 {
        ((1.0 + fidelity.clamp(0.0, 1.0)) / 2.0).powi(k1.min(k2) as i32)
    }

    fn run(
        &self,
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
        k1: usize,
        k2: usize,
        rng: &mut SimRng,
    ) -> Result<bool> {
        Ok(swap_test_mixed(rho, sigma, k1.min(k2), rng)?.accept)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapOutcome {
    pub accept: bool,
    pub pass_count: usize,
}

/// Output of one SWAP-test circuit: `H_a · CSWAP · H_a |0⟩_a|ψ⟩|φ⟩`.
fn swap_circuit(psi: &StateVector, phi: &StateVector) -> Result<StateVector> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    let n = psi.num_qubits();
    let a = StateVector::zero(Layout::single("a", 1))?;
    let x = psi.clone().relabel(Layout::single("x", n))?;
    let y = phi.clone().relabel(Layout::single("y", n))?;
    let mut s = a.tensor(&x)?.tensor(&y)?;
    let h = UnitaryMatrix::hadamard();
    s.apply_unitary_mut(&h, &["a"])?;
    let (fx, fy) = (s.layout().field("x")?, s.layout().field("y")?);
    let fa = s.layout().field("a")?;
    s.permute_basis(|i| {
        if fa.get(i) == 1 {
            fy.set(fx.set(i, fy.get(i)), fx.get(i))
        } else {
            i
        }
    })?;
    s.apply_unitary_mut(&h, &["a"])?;
    Ok(s)
}

/// Pure-state SWAP test; each round measures a fresh circuit output's ancilla.
pub fn swap_test(
    psi: &StateVector,
    phi: &StateVector,
    kappa: usize,
    rng: &mut SimRng,
) -> Result<SwapOutcome> {
    let out = swap_circuit(psi, phi)?;
    let mut pass = 0;
    for _ in 0..kappa {
        if out.measure_computational(&["a"], rng)?.outcome == 0 {
            pass += 1;
        }
    }
    Ok(SwapOutcome {
        accept: pass == kappa,
        pass_count: pass,
    })
}

/// Mixed inputs: each round draws fresh pure copies from the eigen-ensembles.
pub fn swap_test_mixed(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    kappa: usize,
    rng: &mut SimRng,
) -> Result<SwapOutcome> {
    let (sr, ss) = (rho.spectrum(), sigma.spectrum());
    let draw = |spec: &[(f64, StateVector)], rng: &mut SimRng| -> StateVector {
        let u: f64 = rng.random::<f64>() * spec.iter().map(|p| p.0).sum::<f64>();
        let mut acc = 0.0;
        for (w, s) in spec {
            acc += w;
            if u < acc {
                return s.clone();
            }
        }
        spec[spec.len() - 1].1.clone()
    };
    let mut pass = 0;
    for _ in 0..kappa {
        let a = draw(&sr, rng);
        let b = draw(&ss, rng);
        if swap_test(&a, &b, 1, rng)?.accept {
            pass += 1;
        }
    }
    Ok(SwapOutcome {
        accept: pass == kappa,
        pass_count: pass,
    })
}
