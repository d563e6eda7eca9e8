//! Calibration of the auxiliary squeezing μ to a target small-signal gain.

use num_complex::Complex;
use serde::Serialize;
use teleamp_core::FidelityTarget;

use crate::config::{ModelKind, PureResource, RunConfig};
use crate::error::{config, Result};
use crate::models::Evaluator;
use crate::roots::{find_root, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuSolution {
    pub mu: f64,
    /// Gain at the probe amplitude for the returned μ.
    pub gain: f64,
    pub target: f64,
    pub iterations: usize,
}

/// Gain of the configured model at α = `solve.probe_alpha` with μ replaced.
pub fn probe_gain(cfg: &RunConfig, mu: f64) -> Result<f64> {
    let mut c = cfg.clone();
    c.params.mu = mu;
    c.amplifier_params().validate()?;
    let eval = Evaluator::prepare(&c)?;
    let m = eval.point(Complex::new(cfg.solve.probe_alpha, 0.0), FidelityTarget::MeasuredGain)?;
    Ok(m.gain)
}

/// Root of gain(μ) − target inside [solve.mu_lo, solve.mu_hi].
pub fn solve_mu(cfg: &RunConfig, target: f64) -> Result<MuSolution> {
    if cfg.model.kind == ModelKind::Pure && cfg.model.resource == PureResource::Nominal {
        return Err(config("mu does not enter the nominal pure model; use resource = \"engineered\""));
    }
    if !(target.is_finite() && target > 0.0) {
        return Err(config(format!("target gain {target} must be positive")));
    }
    let s = &cfg.solve;
    let tol = Tolerance {
        f: s.tolerance,
        ..Tolerance::default()
    };
    let root = find_root(
        |mu| probe_gain(cfg, mu).map(|g| g - target).map_err(|e| e.to_string()),
        s.mu_lo,
        s.mu_hi,
        tol,
    )?;
    Ok(MuSolution {
        mu: root.x,
        gain: root.fx + target,
        target,
        iterations: root.iterations,
    })
}
