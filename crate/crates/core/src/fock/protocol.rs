//! Heralded resource preparation and teleportation in Fock space.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rayon::prelude::*;

use super::ops::{
    apply_beamsplitter, apply_ladder, beamsplitter_blocks, coherent_amplitudes,
    displacement_matrix, tmsv_state, LadderKind,
};
use super::{FockMix, FockVec, TRUNCATION_TOL};
use crate::error::{domain, Error, Result};
use crate::params::{variances_from_moments, FidelityTarget, Metrics};
use crate::quadrature::PolarGrid;
use crate::scalar::{lit, nan, to_f64, Real};

/// On-off branches are dropped smallest-first while their summed weight,
/// relative to the heralding probability, stays below this bound.
pub const BRANCH_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detector {
    /// Photon-number resolving: herald on exactly one photon in C and D.
    Pnr,
    /// Click / no-click: herald on at least one photon in each of C and D.
    #[default]
    OnOff,
}

/// Outcome probabilities of the two on-off detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickStatistics<T: Real> {
    pub both: T,
    pub c_only: T,
    pub d_only: T,
    pub neither: T,
}

impl<T: Real> ClickStatistics<T> {
    pub fn total(&self) -> T {
        self.both + self.c_only + self.d_only + self.neither
    }
}

/// Conditional state of modes (A, B) with its heralding probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FockResource<T: Real> {
    /// Members normalised, weights summing to `p_ab` minus `omitted_weight`.
    pub state: FockMix<T>,
    pub p_ab: T,
    pub clicks: ClickStatistics<T>,
    pub omitted_weight: T,
}

impl<T: Real> FockResource<T> {
    /// Two-mode Schmidt coefficients of a pure (PNR) resource: amplitudes of
    /// |n, n⟩ of the normalised state.
    pub fn diagonal(&self) -> Result<Vec<T>> {
        let (_, s) = self.state.members().first().ok_or(Error::ZeroWeight)?;
        let d = s.dim();
        Ok((0..d).map(|n| s.amplitudes()[n * d + n].re).collect())
    }
}

/// TMSV(λ)_AB ⊗ TMSV(μ)_CD, beam splitters (A,C) and (B,D) of transmittance
/// T, then heralding on the detectors in C and D.
pub fn prepare_resource_fock<T: Real>(
    lambda: T,
    mu: T,
    transmittance: T,
    d: usize,
    detector: Detector,
) -> Result<FockResource<T>> {
    if !(transmittance >= T::zero() && transmittance <= T::one()) {
        return Err(domain("transmittance", to_f64(transmittance), "0 <= T <= 1"));
    }
    let input = tmsv_state(lambda, d)?.tensor(&tmsv_state(mu, d)?)?;
    let blocks = beamsplitter_blocks(transmittance, 2 * d - 2)?;
    let mixed = apply_beamsplitter(&apply_beamsplitter(&input, (0, 2), &blocks)?, (1, 3), &blocks)?;
    let lost = to_f64(T::one() - mixed.norm_sqr());
    if lost > TRUNCATION_TOL {
        return Err(Error::Truncation(format!("beam splitters pushed {lost:e} beyond d = {d}")));
    }

    // Bucket amplitudes by the (C, D) photon numbers.
    let dd = d * d;
    let src = mixed.amplitudes();
    let mut weights = vec![T::zero(); dd];
    for (i, a) in src.iter().enumerate() {
        weights[i % dd] += a.norm_sqr();
    }
    let mut clicks = ClickStatistics {
        both: T::zero(),
        c_only: T::zero(),
        d_only: T::zero(),
        neither: T::zero(),
    };
    for (j, &w) in weights.iter().enumerate() {
        match (j / d > 0, j % d > 0) {
            (true, true) => clicks.both += w,
            (true, false) => clicks.c_only += w,
            (false, true) => clicks.d_only += w,
            (false, false) => clicks.neither += w,
        }
    }
    let branch = |j: usize| -> Result<FockVec<T>> {
        FockVec::new(2, d, (0..dd).map(|ab| src[ab * dd + j]).collect())
    };

    let mut state = FockMix::new();
    let (p_ab, omitted) = match detector {
        Detector::Pnr => {
            let j = d + 1;
            state.push_unnormalized(branch(j)?)?;
            (weights[j], T::zero())
        }
        Detector::OnOff => {
            let mut order: Vec<usize> = (0..dd).filter(|j| j / d > 0 && j % d > 0).collect();
            order.sort_by(|&x, &y| {
                weights[y]
                    .partial_cmp(&weights[x])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.cmp(&y))
            });
            let mut omitted = T::zero();
            let mut keep = order.len();
            let budget = to_f64(clicks.both) * BRANCH_CUTOFF;
            while keep > 0 && to_f64(omitted + weights[order[keep - 1]]) < budget {
                omitted += weights[order[keep - 1]];
                keep -= 1;
            }
            for &j in &order[..keep] {
                state.push_unnormalized(branch(j)?)?;
            }
            (clicks.both, omitted)
        }
    };
    if !(p_ab > T::zero()) {
        return Err(Error::NonPositiveProbability {
            context: "heralding",
            value: to_f64(p_ab),
        });
    }
    let leak = to_f64(state.max_top_level_weight());
    if leak >= TRUNCATION_TOL {
        return Err(Error::Truncation(format!("resource top-level weight {leak:e} at d = {d}")));
    }
    Ok(FockResource {
        state,
        p_ab,
        clicks,
        omitted_weight: omitted,
    })
}

/// Output of mode B at one dual-homodyne outcome β.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome<T: Real> {
    /// Members weighted so that the total weight is `density`.
    pub state: FockMix<T>,
    /// Probability density of β.
    pub density: T,
}

fn check_two_mode<T: Real>(resource: &FockMix<T>) -> Result<usize> {
    let (_, first) = resource.members().first().ok_or(Error::ZeroWeight)?;
    if resource.members().iter().any(|(_, s)| s.n_modes() != 2 || s.dim() != first.dim()) {
        return Err(Error::Shape("teleportation needs a two-mode (A, B) resource".into()));
    }
    Ok(first.dim())
}

/// Teleportation at a single β, returning the (unnormalised) state and the
/// largest top-level weight of its members.
fn teleport_raw<T: Real>(
    resource: &FockMix<T>,
    d: usize,
    alpha: Complex<T>,
    beta: Complex<T>,
    k: T,
) -> Result<(FockMix<T>, T)> {
    let total = resource.total_weight();
    if !(total > T::zero()) {
        return Err(Error::ZeroWeight);
    }
    let bra = coherent_amplitudes(alpha + beta, d);
    let shift = beta * k;
    let disp = (shift.norm_sqr() > T::zero()).then(|| displacement_matrix(-shift, d));
    let pref = T::one() / T::pi().sqrt();
    let mut out = FockMix::new();
    let mut leak = T::zero();
    for (w, psi) in resource.members() {
        let amps = psi.amplitudes();
        let scale = pref * (*w / total).sqrt();
        let mut b = vec![Complex::new(T::zero(), T::zero()); d];
        for (a, c) in bra.iter().enumerate() {
            let row = &amps[a * d..(a + 1) * d];
            for (bb, x) in b.iter_mut().zip(row) {
                *bb += c * x;
            }
        }
        for x in &mut b {
            *x *= scale;
        }
        let v = match &disp {
            Some(m) => {
                let col = nalgebra::DVector::from_vec(b);
                FockVec::new(1, d, (m * col).iter().copied().collect())?
            }
            None => FockVec::new(1, d, b)?,
        };
        leak = leak.max(v.max_top_level_weight());
        out.push_unnormalized(v)?;
    }
    Ok((out, leak))
}

/// Projects the input |α⟩ and mode A onto the displaced EPR state for outcome
/// β, contracting A with (1/√π)⟨(α+β)*|, then displaces B by -kβ.
///
/// Resource weights are renormalised first, so the density is conditional on
/// heralding.
pub fn teleport_fock<T: Real>(
    resource: &FockMix<T>,
    alpha: Complex<T>,
    beta: Complex<T>,
    k: T,
) -> Result<TeleportOutcome<T>> {
    let d = check_two_mode(resource)?;
    let (state, leak) = teleport_raw(resource, d, alpha, beta, k)?;
    if to_f64(leak) >= TRUNCATION_TOL {
        return Err(Error::Truncation(format!(
            "teleported state top-level weight {:e} at d = {d}",
            to_f64(leak)
        )));
    }
    let density = state.total_weight();
    Ok(TeleportOutcome { state, density })
}

/// Window-averaged teleportation output.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedOutcome<T: Real> {
    /// Eigen-decomposed output with total weight `p_tele`.
    pub state: FockMix<T>,
    /// ∫ e^{-|β|²/σ²} P(β) d²β; for σ = 0 the density at β = 0.
    pub p_tele: T,
}

/// Outcomes accepted with probability e^{-|β|²/σ²}, integrated on `grid`.
pub fn windowed_teleport_fock<T: Real>(
    resource: &FockMix<T>,
    alpha: Complex<T>,
    sigma: T,
    k: T,
    grid: &PolarGrid,
) -> Result<WindowedOutcome<T>> {
    let d = check_two_mode(resource)?;
    if !(sigma >= T::zero()) {
        return Err(domain("sigma", to_f64(sigma), "sigma >= 0"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    if sigma == T::zero() {
        let out = teleport_fock(resource, alpha, zero, k)?;
        return Ok(WindowedOutcome {
            p_tele: out.density,
            state: out.state,
        });
    }
    let s = to_f64(sigma);
    if grid.radius < PolarGrid::RADIUS_IN_SIGMA * s * (1.0 - 1e-12) {
        return Err(Error::Grid(format!("radius {} below 5 sigma = {}", grid.radius, 5.0 * s)));
    }
    let spacing = grid.max_radial_spacing();
    if spacing > s / 6.0 {
        return Err(Error::Grid(format!("radial spacing {spacing} exceeds sigma/6 = {}", s / 6.0)));
    }
    let inv_s2 = T::one() / (sigma * sigma);
    let contributions: Vec<(DMatrix<Complex<T>>, T)> = grid
        .points()
        .par_iter()
        .map(|&(re, im, qw)| {
            let beta = Complex::new(lit::<T>(re), lit::<T>(im));
            let (mix, leak) = teleport_raw(resource, d, alpha, beta, k)?;
            let accept = (-beta.norm_sqr() * inv_s2).exp() * lit::<T>(qw);
            let mut rho = DMatrix::from_element(d, d, zero);
            for (w, v) in mix.members() {
                let col = nalgebra::DVector::from_column_slice(v.amplitudes());
                rho += &col * col.adjoint() * Complex::new(*w * accept, T::zero());
            }
            Ok((rho, leak * mix.total_weight() * accept))
        })
        .collect::<Result<_>>()?;
    let mut rho = DMatrix::from_element(d, d, zero);
    let mut leaked = T::zero();
    for (r, l) in &contributions {
        rho += r;
        leaked += *l;
    }
    let p_tele = (0..d).fold(T::zero(), |acc, i| acc + rho[(i, i)].re);
    if !(p_tele > T::zero()) {
        return Err(Error::NonPositiveProbability {
            context: "acceptance window",
            value: to_f64(p_tele),
        });
    }
    if to_f64(leaked / p_tele) >= TRUNCATION_TOL {
        return Err(Error::Truncation(format!(
            "windowed output top-level weight {:e} at d = {d}",
            to_f64(leaked / p_tele)
        )));
    }
    Ok(WindowedOutcome {
        state: mix_from_density(rho, p_tele)?,
        p_tele,
    })
}

fn mix_from_density<T: Real>(rho: DMatrix<Complex<T>>, trace: T) -> Result<FockMix<T>> {
    let d = rho.nrows();
    let herm = (&rho + rho.adjoint()) * Complex::new(lit::<T>(0.5), T::zero());
    let eig = SymmetricEigen::new(herm);
    let floor = trace * lit(1e-15);
    let mut out = FockMix::new();
    for (i, &w) in eig.eigenvalues.iter().enumerate() {
        if w > floor {
            let v = FockVec::new(1, d, eig.eigenvectors.column(i).iter().copied().collect())?;
            out.push(w, &v)?;
        }
    }
    Ok(out)
}

/// Teleports `input` with β = 0 through a resource with one photon
/// subtracted from mode A; the output is ∝ b̂† λ^n̂ |ψ⟩.
pub fn photon_addition_teleport_demo<T: Real>(lambda: T, input: &FockVec<T>, d: usize) -> Result<FockVec<T>> {
    if input.n_modes() != 1 {
        return Err(Error::Shape("input must be a single mode".into()));
    }
    let dropped = input
        .amplitudes()
        .iter()
        .skip(d)
        .fold(T::zero(), |acc, a| acc + a.norm_sqr());
    if to_f64(dropped) > TRUNCATION_TOL {
        return Err(Error::Truncation(format!("input weight {:e} above d = {d}", to_f64(dropped))));
    }
    let psi = input.resized(d);
    let resource = apply_ladder(&tmsv_state(lambda, d)?, 0, LadderKind::Annihilate)?;
    let r = resource.amplitudes();
    let mut out = vec![Complex::new(T::zero(), T::zero()); d];
    for (m, p) in psi.amplitudes().iter().enumerate() {
        for (b, o) in out.iter_mut().enumerate() {
            *o += p * r[m * d + b];
        }
    }
    let v = FockVec::new(1, d, out)?;
    v.check_truncation("photon-addition output")?;
    Ok(v.normalized()?.1)
}

/// Gain, variances and fidelity of a single-mode output mixture.
///
/// The gain is Re(⟨a⟩ α*)/|α|² and is NaN at α = 0.
pub fn metrics_fock<T: Real>(
    state: &FockMix<T>,
    alpha: Complex<T>,
    target: FidelityTarget<T>,
) -> Result<Metrics<T>> {
    let total = state.total_weight();
    if !(total > T::zero()) {
        return Err(Error::ZeroWeight);
    }
    let zero = Complex::new(T::zero(), T::zero());
    let (mut a1, mut a2, mut n) = (zero, zero, T::zero());
    for (w, s) in state.members() {
        let (x1, x2, xn) = s.single_mode_moments()?;
        a1 += x1 * *w;
        a2 += x2 * *w;
        n += xn * *w;
    }
    let (a1, a2, n) = (a1 / total, a2 / total, n / total);
    let (v_x, v_p) = variances_from_moments(a1, a2, n);
    let amp2 = alpha.norm_sqr();
    let gain = if amp2 > T::zero() {
        (a1 * alpha.conj()).re / amp2
    } else {
        nan()
    };
    let gamma = match target {
        FidelityTarget::Fixed(g) => alpha * g,
        FidelityTarget::MeasuredGain if amp2 > T::zero() => alpha * gain,
        FidelityTarget::MeasuredGain => zero,
    };
    let d = state.members()[0].1.dim();
    let bra = FockVec::new(1, d, coherent_amplitudes(gamma, d))?;
    let mut fid = T::zero();
    for (w, s) in state.members() {
        fid += *w * bra.inner(s)?.norm_sqr();
    }
    Ok(Metrics {
        gain,
        fidelity: fid / total,
        v_x,
        v_p,
        p_ab: None,
        p_tele: None,
        p_tot: None,
    })
}
