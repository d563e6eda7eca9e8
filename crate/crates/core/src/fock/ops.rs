use nalgebra::DMatrix;
use num_complex::Complex;

use super::FockVec;
use crate::error::{domain, Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Amplitudes e^{-|z|²/2} zⁿ/√n! for n < d, by stable recursion.
pub fn coherent_amplitudes<T: Real>(z: Complex<T>, d: usize) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(d);
    if d == 0 {
        return out;
    }
    out.push(Complex::new((-z.norm_sqr() * lit(0.5)).exp(), T::zero()));
    for n in 1..d {
        let prev = out[n - 1];
        out.push(prev * z / from_usize::<T>(n).sqrt());
    }
    out
}

/// Coherent state |α⟩ truncated to `d` levels.
pub fn coherent_state<T: Real>(alpha: Complex<T>, d: usize) -> Result<FockVec<T>> {
    let a = to_f64(alpha.norm_sqr()).sqrt();
    if a * a + 5.0 * a + 10.0 >= d as f64 {
        return Err(Error::Truncation(format!(
            "coherent amplitude {a} needs more than {d} levels"
        )));
    }
    let v = FockVec::new(1, d, coherent_amplitudes(alpha, d))?;
    v.check_truncation("coherent state")?;
    Ok(v)
}

/// Two-mode squeezed vacuum √(1-λ²) Σ λⁿ |n, n⟩.
pub fn tmsv_state<T: Real>(lambda: T, d: usize) -> Result<FockVec<T>> {
    if !(lambda.abs() < T::one()) {
        return Err(domain("lambda", to_f64(lambda), "|lambda| < 1"));
    }
    if to_f64(lambda.abs()).powi(d as i32) >= 1e-8 {
        return Err(Error::Truncation(format!(
            "lambda^d = {:e} at d = {d}",
            to_f64(lambda.abs()).powi(d as i32)
        )));
    }
    let mut v = FockVec::zeros(2, d);
    let c = (T::one() - lambda * lambda).sqrt();
    let mut amp = c;
    for n in 0..d {
        v.amplitudes_mut()[n * d + n] = Complex::new(amp, T::zero());
        amp *= lambda;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Annihilate,
    Create,
}

/// Largest top-level amplitude allowed before a creation operator.
const CREATE_HEADROOM: f64 = 1e-10;

/// â or â† on one mode; the result is not renormalised.
pub fn apply_ladder<T: Real>(state: &FockVec<T>, mode: usize, kind: LadderKind) -> Result<FockVec<T>> {
    state.check_mode(mode)?;
    let d = state.dim();
    let stride = state.stride(mode);
    let src = state.amplitudes();
    if kind == LadderKind::Create {
        let worst = src
            .iter()
            .enumerate()
            .filter(|(i, _)| state.level(*i, mode) == d - 1)
            .map(|(_, a)| to_f64(a.norm_sqr()).sqrt())
            .fold(0.0, f64::max);
        if worst >= CREATE_HEADROOM {
            return Err(Error::Truncation(format!(
                "creation on mode {mode} with top-level amplitude {worst:e}"
            )));
        }
    }
    let mut out = FockVec::zeros(state.n_modes(), d);
    let dst = out.amplitudes_mut();
    for (i, a) in src.iter().enumerate() {
        let n = state.level(i, mode);
        match kind {
            LadderKind::Annihilate if n > 0 => {
                dst[i - stride] = *a * from_usize::<T>(n).sqrt();
            }
            LadderKind::Create if n + 1 < d => {
                dst[i + stride] = *a * from_usize::<T>(n + 1).sqrt();
            }
            _ => {}
        }
    }
    Ok(out)
}

fn apply_diagonal<T: Real>(state: &FockVec<T>, mode: usize, f: impl Fn(usize) -> T) -> Result<FockVec<T>> {
    state.check_mode(mode)?;
    let table: Vec<T> = (0..state.dim()).map(f).collect();
    let mut out = state.clone();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        *a *= table[state.level(i, mode)];
    }
    Ok(out)
}

/// Ĝ = ââ† + (g-2)â†â = (g-1)n̂ + 1 on one mode.
pub fn amplifier_g<T: Real>(state: &FockVec<T>, mode: usize, g: T) -> Result<FockVec<T>> {
    apply_diagonal(state, mode, |n| (g - T::one()) * from_usize::<T>(n) + T::one())
}

/// Ĝ_N: g^(n-N) for n ≤ N, 1 above the cut.
pub fn amplifier_gn<T: Real>(state: &FockVec<T>, mode: usize, g: T, cutoff: usize) -> Result<FockVec<T>> {
    if !(g > T::zero()) {
        return Err(domain("g", to_f64(g), "g > 0"));
    }
    apply_diagonal(state, mode, |n| {
        if n <= cutoff {
            g.powi(n as i32 - cutoff as i32)
        } else {
            T::one()
        }
    })
}

/// Matrix elements ⟨m|D(z)|n⟩ for m, n < d.
///
/// Columns follow D|n⟩ = (â† - z*)ⁿ/√n! |z⟩, built in a padded space so the
/// kept block is unaffected by the truncation of the recursion.
pub fn displacement_matrix<T: Real>(z: Complex<T>, d: usize) -> DMatrix<Complex<T>> {
    let r = to_f64(z.norm_sqr()).sqrt();
    let dp = d + (r * r + 8.0 * r).ceil() as usize + 24;
    let zc = z.conj();
    let mut col = coherent_amplitudes(z, dp);
    let mut out = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for n in 0..d {
        if n > 0 {
            let inv = T::one() / from_usize::<T>(n).sqrt();
            let mut next = vec![Complex::new(T::zero(), T::zero()); dp];
            for m in 0..dp {
                let mut v = -zc * col[m];
                if m > 0 {
                    v += col[m - 1] * from_usize::<T>(m).sqrt();
                }
                next[m] = v * inv;
            }
            col = next;
        }
        for m in 0..d {
            out[(m, n)] = col[m];
        }
    }
    out
}

/// Applies a d×d single-mode operator to one mode.
pub fn apply_on_mode<T: Real>(
    state: &FockVec<T>,
    mode: usize,
    op: &DMatrix<Complex<T>>,
) -> Result<FockVec<T>> {
    state.check_mode(mode)?;
    let d = state.dim();
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::Shape(format!("{}x{} operator on dimension {d}", op.nrows(), op.ncols())));
    }
    let stride = state.stride(mode);
    let src = state.amplitudes();
    let mut out = FockVec::zeros(state.n_modes(), d);
    let dst = out.amplitudes_mut();
    for base in 0..src.len() {
        if state.level(base, mode) != 0 {
            continue;
        }
        for m in 0..d {
            let mut acc = Complex::new(T::zero(), T::zero());
            for n in 0..d {
                acc += op[(m, n)] * src[base + n * stride];
            }
            dst[base + m * stride] = acc;
        }
    }
    Ok(out)
}

/// Photon-number blocks of the beam splitter with U a† U† = √T a† - √R c†
/// and U c† U† = √R a† + √T c†.
///
/// Block `N` has entry (k', k) = ⟨k', N-k'|U|k, N-k⟩. The Heisenberg-picture
/// output is a ↦ √T a + √R c, matching the forward Gaussian convention.
pub fn beamsplitter_blocks<T: Real>(t: T, n_max: usize) -> Result<Vec<DMatrix<T>>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(domain("transmittance", to_f64(t), "0 <= T <= 1"));
    }
    let st = t.sqrt();
    let sr = (T::one() - t).sqrt();
    let mut blocks: Vec<DMatrix<T>> = vec![DMatrix::from_element(1, 1, T::one())];
    for n in 1..=n_max {
        let prev = &blocks[n - 1];
        let mut b = DMatrix::zeros(n + 1, n + 1);
        // k = 0 from |0, N-1⟩ by (√R a† + √T c†)/√N, k ≥ 1 from
        // |k-1, N-k⟩ by (√T a† - √R c†)/√k.
        for k in 0..=n {
            let (src, ca, cc, norm) = if k == 0 {
                (0, sr, st, from_usize::<T>(n))
            } else {
                (k - 1, st, -sr, from_usize::<T>(k))
            };
            let inv = T::one() / norm.sqrt();
            for kp in 0..n {
                let v = prev[(kp, src)];
                if v == T::zero() {
                    continue;
                }
                // a†: |kp, N-1-kp⟩ → √(kp+1) |kp+1, N-1-kp⟩
                b[(kp + 1, k)] += ca * v * from_usize::<T>(kp + 1).sqrt() * inv;
                // c†: → √(N-kp) |kp, N-kp⟩
                b[(kp, k)] += cc * v * from_usize::<T>(n - kp).sqrt() * inv;
            }
        }
        blocks.push(b);
    }
    Ok(blocks)
}

/// Beam splitter on modes (a, c); population pushed beyond the truncation is
/// dropped and shows up as lost norm.
pub fn apply_beamsplitter<T: Real>(
    state: &FockVec<T>,
    (ma, mc): (usize, usize),
    blocks: &[DMatrix<T>],
) -> Result<FockVec<T>> {
    state.check_mode(ma)?;
    state.check_mode(mc)?;
    if ma == mc {
        return Err(Error::Shape("beam splitter needs two distinct modes".into()));
    }
    let d = state.dim();
    if blocks.len() < 2 * d - 1 {
        return Err(Error::Shape(format!(
            "{} beam-splitter blocks for dimension {d}",
            blocks.len()
        )));
    }
    let (sa, sc) = (state.stride(ma), state.stride(mc));
    let src = state.amplitudes();
    let mut out = FockVec::zeros(state.n_modes(), d);
    let dst = out.amplitudes_mut();
    let zero = Complex::new(T::zero(), T::zero());
    let mut buf = vec![zero; 2 * d];
    for base in 0..src.len() {
        if state.level(base, ma) != 0 || state.level(base, mc) != 0 {
            continue;
        }
        for n in 0..=2 * (d - 1) {
            let lo = n.saturating_sub(d - 1);
            let hi = n.min(d - 1);
            let block = &blocks[n];
            for k in lo..=hi {
                buf[k] = src[base + k * sa + (n - k) * sc];
            }
            for kp in lo..=hi {
                let mut acc = zero;
                for k in lo..=hi {
                    acc += buf[k] * block[(kp, k)];
                }
                dst[base + kp * sa + (n - kp) * sc] = acc;
            }
        }
    }
    Ok(out)
}
