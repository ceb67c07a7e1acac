use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::layout::{BitField, Layout, MultiField, MAX_QUBITS};
use super::unitary::UnitaryMatrix;
use super::TOL;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense pure state over a named register layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amps: Vec<Complex64>,
    layout: Layout,
}

/// Result of a projective measurement.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: usize,
    pub probability: f64,
    pub state: StateVector,
}

pub(crate) fn check_width(layout: &Layout) -> Result<()> {
    let n = layout.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Pack the bits of `index` selected by `mask` into a dense integer (order preserved).
pub(crate) fn compact(index: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if index & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        m ^= low;
    }
    out
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `Σ conj(a_i) b_i`
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, p) in probs.iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

impl StateVector {
    /// Checked constructor: length must match the layout and the norm must be 1.
    pub fn new(amps: Vec<Complex64>, layout: Layout) -> Result<Self> {
        check_width(&layout)?;
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: amps.len(),
            });
        }
        let n = norm_sqr(&amps);
        if (n - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector { amps, layout })
    }

    /// Normalizes the given amplitudes; fails on the zero vector.
    pub fn normalized(mut amps: Vec<Complex64>, layout: Layout) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if n < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut amps {
            *a /= n;
        }
        StateVector::new(amps, layout)
    }

    pub fn from_real(amps: &[f64], layout: Layout) -> Result<Self> {
        StateVector::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(), layout)
    }

    pub fn basis(layout: Layout, index: usize) -> Result<Self> {
        check_width(&layout)?;
        if index >= layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {}",
                layout.dim()
            )));
        }
        let mut amps = vec![ZERO; layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, layout })
    }

    pub fn zero(layout: Layout) -> Result<Self> {
        StateVector::basis(layout, 0)
    }

    /// Equal-weight superposition of every basis state.
    pub fn uniform(layout: Layout) -> Result<Self> {
        check_width(&layout)?;
        let d = layout.dim();
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Ok(StateVector {
            amps: vec![a; d],
            layout,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Interleaved `[re0, im0, re1, im1, ...]` for serialization.
    pub fn to_interleaved(&self) -> Vec<f64> {
        self.amps.iter().flat_map(|a| [a.re, a.im]).collect()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout);
        check_width(&layout)?;
        let mut amps = Vec::with_capacity(layout.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { amps, layout })
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_dim(other)?;
        Ok(dot(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    fn same_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Same amplitudes under a layout of equal total width.
    pub fn relabel(mut self, layout: Layout) -> Result<StateVector> {
        if layout.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: layout.dim(),
            });
        }
        self.layout = layout;
        Ok(self)
    }

    pub fn split_register(self, name: &str, parts: &[(&str, usize)]) -> Result<StateVector> {
        let layout = self.layout.split(name, parts)?;
        self.relabel(layout)
    }

    pub fn merge_registers(self, names: &[&str], into: &str) -> Result<StateVector> {
        let layout = self.layout.merge(names, into)?;
        self.relabel(layout)
    }

    pub fn rename_register(self, from: &str, to: &str) -> Result<StateVector> {
        let layout = self.layout.rename(from, to)?;
        self.relabel(layout)
    }

    fn target(&self, regs: &[&str]) -> Result<MultiField> {
        self.layout.fields(regs)
    }

    fn control(&self, control: Option<(&str, usize)>) -> Result<Option<(BitField, usize)>> {
        control
            .map(|(name, value)| Ok((self.layout.field(name)?, value)))
            .transpose()
    }

    /// Gather each fiber of `regs` into a buffer, let `f` transform it, scatter back.
    fn for_each_fiber<F>(
        &mut self,
        regs: &[&str],
        control: Option<(&str, usize)>,
        mut f: F,
    ) -> Result<()>
    where
        F: FnMut(&mut [Complex64]),
    {
        let field = self.target(regs)?;
        let ctrl = self.control(control)?;
        let offsets = field.offsets();
        let mut buf = vec![ZERO; offsets.len()];
        let dim = self.dim();
        for base in field.bases(dim) {
            if let Some((cf, cv)) = ctrl {
                if cf.get(base) != cv {
                    continue;
                }
            }
            for (b, off) in buf.iter_mut().zip(&offsets) {
                *b = self.amps[base | off];
            }
            f(&mut buf);
            for (b, off) in buf.iter().zip(&offsets) {
                self.amps[base | off] = *b;
            }
        }
        Ok(())
    }

    fn check_target_dim(&self, regs: &[&str], dim: usize) -> Result<()> {
        let expected = self.target(regs)?.dim();
        if expected != dim {
            return Err(Error::DimensionMismatch {
                expected,
                found: dim,
            });
        }
        Ok(())
    }

    /// `(I ⊗ u ⊗ I)|self⟩` with `u` acting on the listed registers (first most significant).
    pub fn apply_unitary(&self, u: &UnitaryMatrix, regs: &[&str]) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_unitary_mut(u, regs)?;
        Ok(out)
    }

    pub fn apply_unitary_mut(&mut self, u: &UnitaryMatrix, regs: &[&str]) -> Result<()> {
        self.apply_controlled_mut(u, regs, None)
    }

    /// Applies `u` only on branches where the control register holds `control.1`.
    pub fn apply_controlled_mut(
        &mut self,
        u: &UnitaryMatrix,
        regs: &[&str],
        control: Option<(&str, usize)>,
    ) -> Result<()> {
        self.check_target_dim(regs, u.dim())?;
        let m = u.matrix();
        let d = u.dim();
        let mut out = vec![ZERO; d];
        self.for_each_fiber(regs, control, |v| {
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (j, x) in v.iter().enumerate() {
                    acc += m[(i, j)] * x;
                }
                *o = acc;
            }
            v.copy_from_slice(&out);
        })
    }

    /// `(I − 2|φ⟩⟨φ|)` on `regs`, optionally controlled.
    pub fn reflect_mut(
        &mut self,
        phi: &StateVector,
        regs: &[&str],
        control: Option<(&str, usize)>,
    ) -> Result<()> {
        self.check_target_dim(regs, phi.dim())?;
        let p = &phi.amps;
        self.for_each_fiber(regs, control, |v| {
            let c = dot(p, v) * 2.0;
            for (x, pk) in v.iter_mut().zip(p) {
                *x -= pk * c;
            }
        })
    }

    /// Unnormalized projection onto `|φ⟩⟨φ| ⊗ I`; returns the Born weight and
    /// the renormalized post-measurement state (if the weight is nonzero).
    pub fn project_onto(
        &self,
        phi: &StateVector,
        regs: &[&str],
    ) -> Result<(f64, Option<StateVector>)> {
        self.check_target_dim(regs, phi.dim())?;
        let mut out = self.clone();
        let p = &phi.amps;
        out.for_each_fiber(regs, None, |v| {
            let c = dot(p, v);
            for (x, pk) in v.iter_mut().zip(p) {
                *x = pk * c;
            }
        })?;
        let w = norm_sqr(&out.amps);
        if w < 1e-24 {
            return Ok((w, None));
        }
        let s = w.sqrt();
        for a in &mut out.amps {
            *a /= s;
        }
        Ok((w, Some(out)))
    }

    /// Projects `regs` onto `|φ⟩` and drops them, returning the state of the rest.
    pub fn condition_on(
        &self,
        phi: &StateVector,
        regs: &[&str],
    ) -> Result<(f64, Option<StateVector>)> {
        self.check_target_dim(regs, phi.dim())?;
        let field = self.target(regs)?;
        let offsets = field.offsets();
        let layout = self.layout.without(regs);
        let mut amps = vec![ZERO; layout.dim()];
        let rest_mask = (self.dim() - 1) & !field.mask();
        for base in field.bases(self.dim()) {
            let mut c = ZERO;
            for (pk, off) in phi.amps.iter().zip(&offsets) {
                c += pk.conj() * self.amps[base | off];
            }
            amps[compact(base, rest_mask)] = c;
        }
        let w = norm_sqr(&amps);
        if w < 1e-24 {
            return Ok((w, None));
        }
        Ok((w, Some(StateVector::normalized(amps, layout)?)))
    }

    /// `⟨φ|ρ_regs|φ⟩` without forming the reduced density matrix.
    pub fn overlap_on(&self, phi: &StateVector, regs: &[&str]) -> Result<f64> {
        self.check_target_dim(regs, phi.dim())?;
        let field = self.target(regs)?;
        let offsets = field.offsets();
        let mut total = 0.0;
        for base in field.bases(self.dim()) {
            let mut c = ZERO;
            for (pk, off) in phi.amps.iter().zip(&offsets) {
                c += pk.conj() * self.amps[base | off];
            }
            total += c.norm_sqr();
        }
        Ok(total.min(1.0))
    }

    /// Maps basis index `i` to `f(i)`; `f` must be a bijection on `0..dim`.
    pub fn permute_basis<F: Fn(usize) -> usize>(&mut self, f: F) -> Result<()> {
        let d = self.dim();
        let mut out = vec![ZERO; d];
        let mut hit = vec![false; d];
        for (i, a) in self.amps.iter().enumerate() {
            let j = f(i);
            if j >= d || hit[j] {
                return Err(Error::NotUnitary(1.0));
            }
            hit[j] = true;
            out[j] = *a;
        }
        self.amps = out;
        Ok(())
    }

    /// `|…a…b…⟩ → |…b…a…⟩` for two registers of equal width.
    pub fn swap_registers(&mut self, a: &str, b: &str) -> Result<()> {
        let fa = self.layout.field(a)?;
        let fb = self.layout.field(b)?;
        if fa.width != fb.width {
            return Err(Error::WidthMismatch(format!(
                "cannot swap `{a}` ({}) with `{b}` ({})",
                fa.width, fb.width
            )));
        }
        if fa == fb {
            return Ok(());
        }
        self.permute_basis(|i| {
            let (va, vb) = (fa.get(i), fb.get(i));
            fb.set(fa.set(i, vb), va)
        })
    }

    /// `y ← y ⊕ g(x)` where `x` is read from `src` registers and `y` is the `dst` register.
    pub fn xor_into<F: Fn(usize) -> usize>(&mut self, src: &[&str], dst: &str, g: F) -> Result<()> {
        let fs = self.target(src)?;
        let fd = self.layout.field(dst)?;
        if fs.mask() & fd.mask() != 0 {
            return Err(Error::InvalidParameter(format!(
                "xor target `{dst}` overlaps its source"
            )));
        }
        let lim = 1usize << fd.width;
        self.permute_basis(|i| {
            let v = g(fs.get(i));
            if v >= lim {
                return usize::MAX;
            }
            fd.set(i, fd.get(i) ^ v)
        })
    }

    /// Born distribution of the listed registers read as one integer.
    pub fn probabilities(&self, regs: &[&str]) -> Result<Vec<f64>> {
        let field = self.target(regs)?;
        let mut p = vec![0.0; field.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            p[field.get(i)] += a.norm_sqr();
        }
        Ok(p)
    }

    pub fn measure_computational<R: Rng + ?Sized>(
        &self,
        regs: &[&str],
        rng: &mut R,
    ) -> Result<Measurement> {
        let field = self.target(regs)?;
        let probs = self.probabilities(regs)?;
        let outcome = sample_index(&probs, rng);
        let probability = probs[outcome];
        let s = probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if field.get(i) == outcome { a / s } else { ZERO })
            .collect();
        Ok(Measurement {
            outcome,
            probability,
            state: StateVector {
                amps,
                layout: self.layout.clone(),
            },
        })
    }

    /// Measures a single-qubit register in `{|+⟩, |−⟩}`; outcome 0 is `+`.
    pub fn measure_pm<R: Rng + ?Sized>(&self, reg: &str, rng: &mut R) -> Result<Measurement> {
        if self.layout.width(reg)? != 1 {
            return Err(Error::WidthMismatch(format!(
                "±-basis measurement needs a single qubit, `{reg}` has {}",
                self.layout.width(reg)?
            )));
        }
        let h = UnitaryMatrix::hadamard();
        let rotated = self.apply_unitary(&h, &[reg])?;
        let mut m = rotated.measure_computational(&[reg], rng)?;
        m.state.apply_unitary_mut(&h, &[reg])?;
        Ok(m)
    }

    /// Reduced density matrix on `keep` (in the order given).
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let kf = self.target(keep)?;
        let layout = self.layout.select(keep)?;
        let koff = kf.offsets();
        let dk = koff.len();
        let bases: Vec<usize> = kf.bases(self.dim()).collect();
        let mut rho = nalgebra::DMatrix::<Complex64>::zeros(dk, dk);
        for i in 0..dk {
            for j in i..dk {
                let mut acc = ZERO;
                for b in &bases {
                    acc += self.amps[b | koff[i]] * self.amps[b | koff[j]].conj();
                }
                rho[(i, j)] = acc;
                rho[(j, i)] = acc.conj();
            }
        }
        Ok(DensityMatrix::from_parts(rho, layout))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}
