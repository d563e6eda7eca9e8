//! Brute-force truncated Fock-space oracle.
//!
//! States are dense amplitude vectors over `d` levels per mode in mode-major
//! order: the index of |n₀, n₁, …⟩ is Σ n_k d^(N-1-k). Everything here is
//! deliberately direct so it can check the Gaussian and closed-form models.

mod ops;
mod protocol;

pub use ops::{
    apply_beamsplitter, apply_ladder, apply_on_mode, amplifier_g, amplifier_gn,
    beamsplitter_blocks, coherent_amplitudes, coherent_state, displacement_matrix, tmsv_state,
    LadderKind,
};
pub use protocol::{
    metrics_fock, photon_addition_teleport_demo, prepare_resource_fock, teleport_fock,
    windowed_teleport_fock, ClickStatistics, Detector, FockResource, TeleportOutcome,
    WindowedOutcome, BRANCH_CUTOFF,
};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, to_f64, Real};

/// Largest weight tolerated on the top Fock level of any mode.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// Pure (possibly unnormalised) state of `n_modes` truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVec<T: Real> {
    n_modes: usize,
    dim: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> FockVec<T> {
    pub fn new(n_modes: usize, dim: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        if n_modes == 0 || dim == 0 {
            return Err(Error::Shape("Fock state needs at least one mode and level".into()));
        }
        let len = dim.checked_pow(n_modes as u32).ok_or_else(|| {
            Error::Shape(format!("{dim}^{n_modes} amplitudes overflow usize"))
        })?;
        if amps.len() != len {
            return Err(Error::Shape(format!(
                "{} amplitudes supplied for {n_modes} modes of dimension {dim}",
                amps.len()
            )));
        }
        Ok(Self { n_modes, dim, amps })
    }

    pub fn zeros(n_modes: usize, dim: usize) -> Self {
        Self {
            n_modes,
            dim,
            amps: vec![Complex::new(T::zero(), T::zero()); dim.pow(n_modes as u32)],
        }
    }

    /// Product Fock state |n₀, n₁, …⟩.
    pub fn basis(dim: usize, occupation: &[usize]) -> Result<Self> {
        let mut v = Self::zeros(occupation.len(), dim);
        let idx = v.index(occupation)?;
        v.amps[idx] = Complex::new(T::one(), T::zero());
        Ok(v)
    }

    /// Single-mode state from real amplitudes.
    pub fn from_real(amps: &[T]) -> Self {
        Self {
            n_modes: 1,
            dim: amps.len(),
            amps: amps.iter().map(|&a| Complex::new(a, T::zero())).collect(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    /// Distance between consecutive levels of `mode` in the flat index.
    pub fn stride(&self, mode: usize) -> usize {
        self.dim.pow((self.n_modes - 1 - mode) as u32)
    }

    pub fn index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.n_modes {
            return Err(Error::Shape(format!(
                "{} occupation numbers for {} modes",
                occupation.len(),
                self.n_modes
            )));
        }
        let mut idx = 0;
        for &n in occupation {
            if n >= self.dim {
                return Err(Error::Truncation(format!("level {n} outside dimension {}", self.dim)));
            }
            idx = idx * self.dim + n;
        }
        Ok(idx)
    }

    /// Occupation number of `mode` at flat index `idx`.
    pub fn level(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % self.dim
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes {
            Ok(())
        } else {
            Err(Error::Shape(format!("mode {mode} of a {}-mode state", self.n_modes)))
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_modes != other.n_modes || self.dim != other.dim {
            return Err(Error::Shape("inner product of mismatched Fock spaces".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// |⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩).
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let o = self.inner(other)?;
        Ok(o.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    pub fn scale(&mut self, s: Complex<T>) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    /// Returns the squared norm and the normalised state.
    pub fn normalized(&self) -> Result<(T, Self)> {
        let n2 = self.norm_sqr();
        if !(n2 > T::zero()) {
            return Err(Error::ZeroWeight);
        }
        let mut out = self.clone();
        out.scale(Complex::new(T::one() / n2.sqrt(), T::zero()));
        Ok((n2, out))
    }

    /// Weight on the top level of `mode`, relative to the total norm.
    pub fn top_level_weight(&self, mode: usize) -> T {
        let total = self.norm_sqr();
        if !(total > T::zero()) {
            return T::zero();
        }
        let top = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.level(*i, mode) == self.dim - 1)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr());
        top / total
    }

    pub fn max_top_level_weight(&self) -> T {
        (0..self.n_modes)
            .map(|m| self.top_level_weight(m))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn check_truncation(&self, context: &str) -> Result<()> {
        let w = to_f64(self.max_top_level_weight());
        if w >= TRUNCATION_TOL {
            return Err(Error::Truncation(format!(
                "{context}: top-level weight {w:e} at dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("tensor product of different truncations".into()));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self {
            n_modes: self.n_modes + other.n_modes,
            dim: self.dim,
            amps,
        })
    }

    /// Unnormalised ⟨n|_mode |self⟩; the projected mode is removed.
    pub fn project(&self, mode: usize, n: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.n_modes == 1 {
            return Err(Error::Shape("cannot project the only mode".into()));
        }
        if n >= self.dim {
            return Err(Error::Truncation(format!("level {n} outside dimension {}", self.dim)));
        }
        let amps = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.level(*i, mode) == n)
            .map(|(_, a)| *a)
            .collect();
        Ok(Self {
            n_modes: self.n_modes - 1,
            dim: self.dim,
            amps,
        })
    }

    /// Copy into a larger truncation (zero padding) or a smaller one.
    pub fn resized(&self, dim: usize) -> Self {
        let mut out = Self::zeros(self.n_modes, dim);
        for (i, a) in self.amps.iter().enumerate() {
            let occ: Vec<usize> = (0..self.n_modes).map(|m| self.level(i, m)).collect();
            if let Ok(j) = out.index(&occ) {
                out.amps[j] = *a;
            }
        }
        out
    }

    /// Unnormalised single-mode moments (⟨a⟩, ⟨a²⟩, ⟨a†a⟩).
    pub fn single_mode_moments(&self) -> Result<(Complex<T>, Complex<T>, T)> {
        if self.n_modes != 1 {
            return Err(Error::Shape("moments need a single-mode state".into()));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let (mut a1, mut a2, mut n) = (zero, zero, T::zero());
        for k in 1..self.dim {
            let kf = from_usize::<T>(k);
            a1 += self.amps[k - 1].conj() * self.amps[k] * kf.sqrt();
            n += kf * self.amps[k].norm_sqr();
            if k >= 2 {
                let f = (kf * (kf - T::one())).sqrt();
                a2 += self.amps[k - 2].conj() * self.amps[k] * f;
            }
        }
        Ok((a1, a2, n))
    }

    /// Husimi function ∏|⟨β_k|…⟩|² / π^N.
    pub fn q_function(&self, points: &[Complex<T>]) -> Result<T> {
        if points.len() != self.n_modes {
            return Err(Error::Shape("one phase-space point per mode required".into()));
        }
        let bras: Vec<Vec<Complex<T>>> =
            points.iter().map(|&b| coherent_amplitudes(b, self.dim)).collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, a) in self.amps.iter().enumerate() {
            let mut c = *a;
            for (m, bra) in bras.iter().enumerate() {
                c *= bra[self.level(i, m)].conj();
            }
            acc += c;
        }
        Ok(acc.norm_sqr() / T::pi().powi(self.n_modes as i32))
    }
}

/// Mixed state Σ w_i |ψ_i⟩⟨ψ_i| with normalised members.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMix<T: Real> {
    members: Vec<(T, FockVec<T>)>,
}

impl<T: Real> FockMix<T> {
    pub fn new() -> Self {
        Self { members: Vec::new() }
    }

    pub fn pure(state: FockVec<T>) -> Result<Self> {
        let mut m = Self::new();
        m.push_unnormalized(state)?;
        Ok(m)
    }

    /// Adds a member with weight `w`; `state` is normalised on the way in.
    pub fn push(&mut self, w: T, state: &FockVec<T>) -> Result<()> {
        if !(w >= T::zero()) {
            return Err(Error::NonPositiveProbability {
                context: "mixture weight",
                value: to_f64(w),
            });
        }
        let (_, s) = state.normalized()?;
        self.members.push((w, s));
        Ok(())
    }

    /// Adds |ψ⟩⟨ψ| with weight ⟨ψ|ψ⟩; zero vectors are skipped.
    pub fn push_unnormalized(&mut self, state: FockVec<T>) -> Result<()> {
        match state.normalized() {
            Ok((w, s)) => {
                self.members.push((w, s));
                Ok(())
            }
            Err(Error::ZeroWeight) => Ok(()),
            Err(e) => Err(e),
        }
    }

    pub fn members(&self) -> &[(T, FockVec<T>)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.members.iter().fold(T::zero(), |acc, (w, _)| acc + *w)
    }

    /// Same members with weights rescaled to sum to one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_weight();
        if !(total > T::zero()) {
            return Err(Error::ZeroWeight);
        }
        Ok(Self {
            members: self.members.iter().map(|(w, s)| (*w / total, s.clone())).collect(),
        })
    }

    pub fn max_top_level_weight(&self) -> T {
        self.members
            .iter()
            .map(|(_, s)| s.max_top_level_weight())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Weighted mean of |⟨target|ψ_i⟩|².
    pub fn fidelity_with(&self, target: &FockVec<T>) -> Result<T> {
        let total = self.total_weight();
        if !(total > T::zero()) {
            return Err(Error::ZeroWeight);
        }
        let (_, t) = target.normalized()?;
        let mut acc = T::zero();
        for (w, s) in &self.members {
            acc += *w * t.inner(s)?.norm_sqr();
        }
        Ok(acc / total)
    }
}

impl<T: Real> Default for FockMix<T> {
    fn default() -> Self {
        Self::new()
    }
}
