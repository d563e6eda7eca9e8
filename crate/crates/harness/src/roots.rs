//! Bracketing root finder: regula falsi steps, falling back to bisection
//! whenever the bracket fails to halve.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    /// The function has the same sign at both ends; `samples` is the curve
    /// across the bracket (NaN where evaluation failed).
    #[error("no sign change on [{lo}, {hi}]; samples (x, f): {samples:?}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        samples: Vec<(f64, f64)>,
    },

    #[error("evaluation failed at x = {x}: {message}")]
    Evaluation { x: f64, message: String },

    #[error("no convergence after {iterations} iterations (x = {x}, f = {fx:e})")]
    NotConverged { iterations: usize, x: f64, fx: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Stop once |f(x)| is below this.
    pub f: f64,
    /// ... or the bracket is narrower than this.
    pub x: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            f: 1e-10,
            x: 1e-14,
            max_iter: 200,
        }
    }
}

const SAMPLES: usize = 9;

pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root, RootError>
where
    F: FnMut(f64) -> Result<f64, String>,
{
    let mut eval = |x: f64| f(x).map_err(|message| RootError::Evaluation { x, message });
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        let samples = (0..SAMPLES)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64;
                (x, eval(x).unwrap_or(f64::NAN))
            })
            .collect();
        return Err(RootError::NoSignChange { lo, hi, samples });
    }

    // Regula falsi while it keeps halving the bracket, otherwise bisection;
    // at worst every other step halves it.
    let mut secant_ok = true;
    let mut x = a;
    let mut fx = fa;
    for it in 1..=tol.max_iter {
        let width = (b - a).abs();
        let secant = b - fb * (b - a) / (fb - fa);
        x = if secant_ok && secant > a.min(b) && secant < a.max(b) {
            secant
        } else {
            0.5 * (a + b)
        };
        fx = eval(x)?;
        if fx.abs() < tol.f || fx == 0.0 {
            return Ok(Root { x, fx, iterations: it });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() < tol.x {
            return Ok(Root { x, fx, iterations: it });
        }
        secant_ok = (b - a).abs() <= 0.5 * width;
    }
    Err(RootError::NotConverged {
        iterations: tol.max_iter,
        x,
        fx,
    })
}
