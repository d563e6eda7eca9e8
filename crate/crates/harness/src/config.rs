//! TOML run configuration.
//!
//! ```toml
//! [model]
//! kind = "phase"          # pure | phase | fock
//!
//! [params]
//! lambda = 0.5
//! mu = -0.015
//! transmittance = 0.95
//! eta_ab = 0.9
//! eta_cd = 0.9
//! eta_apd = 0.85
//!
//! [sweep]
//! alpha_start = 0.0
//! alpha_stop = 1.0
//! count = 21
//! ```

use std::path::Path;

use serde::Deserialize;
use teleamp_core::{AmplifierParams, Detector, FidelityTarget};

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Closed forms for a Ĝ-modified squeezed-vacuum resource.
    Pure,
    /// Lossy Gaussian-mixture model.
    Phase,
    /// Truncated Fock space; lossless only.
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PureResource {
    /// λ and the nominal gain g are given directly.
    #[default]
    Nominal,
    /// λ_eff and g follow from (λ, μ, T) by photon subtraction.
    Engineered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Pnr,
    #[default]
    Onoff,
}

impl From<DetectorKind> for Detector {
    fn from(d: DetectorKind) -> Self {
        match d {
            DetectorKind::Pnr => Detector::Pnr,
            DetectorKind::Onoff => Detector::OnOff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default)]
    pub resource: PureResource,
    #[serde(default)]
    pub detector: DetectorKind,
    /// Fock cutoff per mode.
    #[serde(default = "default_fock_dim")]
    pub fock_dim: usize,
    /// Fidelity against |g α⟩ for this fixed g; absent means the measured g(α).
    pub fidelity_gain: Option<f64>,
}

fn default_fock_dim() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub lambda: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "one")]
    pub transmittance: f64,
    #[serde(default = "two")]
    pub gain: f64,
    #[serde(default)]
    pub cutoff: usize,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "one")]
    pub eta_ab: f64,
    #[serde(default = "one")]
    pub eta_cd: f64,
    #[serde(default = "one")]
    pub eta_apd: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha_start: f64,
    pub alpha_stop: f64,
    pub count: usize,
    /// Phase of α in radians.
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(default = "default_mu_lo")]
    pub mu_lo: f64,
    #[serde(default)]
    pub mu_hi: f64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_probe")]
    pub probe_alpha: f64,
}

fn default_mu_lo() -> f64 {
    -0.022
}

fn default_tol() -> f64 {
    1e-7
}

fn default_probe() -> f64 {
    1e-4
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            mu_lo: default_mu_lo(),
            mu_hi: 0.0,
            tolerance: default_tol(),
            probe_alpha: default_probe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub params: ParamsSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub solve: SolveSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn amplifier_params(&self) -> AmplifierParams<f64> {
        let p = &self.params;
        let mut out = AmplifierParams::new(p.lambda, p.mu, p.transmittance)
            .with_efficiencies(p.eta_ab, p.eta_cd, p.eta_apd)
            .with_window(p.sigma, p.k);
        out.gain = p.gain;
        out.cutoff = p.cutoff;
        out
    }

    pub fn fidelity_target(&self) -> FidelityTarget<f64> {
        match self.model.fidelity_gain {
            Some(g) => FidelityTarget::Fixed(g),
            None => FidelityTarget::MeasuredGain,
        }
    }

    pub fn alphas(&self) -> Result<Vec<f64>> {
        let s = self.sweep.as_ref().ok_or_else(|| config("missing [sweep] section"))?;
        let step = (s.alpha_stop - s.alpha_start) / (s.count - 1) as f64;
        Ok((0..s.count).map(|i| s.alpha_start + step * i as f64).collect())
    }

    pub(crate) fn check(&self) -> Result<()> {
        self.amplifier_params().validate()?;
        if let Some(s) = &self.sweep {
            if s.count < 2 {
                return Err(config(format!("sweep.count = {} (need at least 2)", s.count)));
            }
            if !(s.alpha_start.is_finite() && s.alpha_stop.is_finite() && s.alpha_start >= 0.0) {
                return Err(config("sweep range must be finite with alpha_start >= 0"));
            }
        }
        if self.model.kind == ModelKind::Fock {
            let p = &self.params;
            if p.eta_ab != 1.0 || p.eta_cd != 1.0 || p.eta_apd != 1.0 {
                return Err(config("the fock model is lossless: all efficiencies must be 1"));
            }
            if self.model.fock_dim < 2 {
                return Err(config("model.fock_dim must be at least 2"));
            }
        }
        let s = &self.solve;
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        let bad = !(s.mu_lo < s.mu_hi) || !(s.tolerance > 0.0);
        if bad {
            return Err(config("solve needs mu_lo < mu_hi and tolerance > 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [model]
        kind = "pure"
        [params]
        lambda = 0.5
        gain = 3.0
        [sweep]
        alpha_start = 0.0
        alpha_stop = 2.0
        count = 5
    "#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.model.kind, ModelKind::Pure);
        assert_eq!(cfg.params.eta_apd, 1.0);
        assert_eq!(cfg.alphas().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(cfg.solve, SolveSection::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_domains() {
        let typo = MINIMAL.replace("gain = 3.0", "gian = 3.0");
        assert!(RunConfig::from_toml(&typo).is_err());
        let bad = MINIMAL.replace("lambda = 0.5", "lambda = 1.5");
        assert!(RunConfig::from_toml(&bad).is_err());
        let short = MINIMAL.replace("count = 5", "count = 1");
        assert!(RunConfig::from_toml(&short).is_err());
    }

    #[test]
    fn lossy_fock_is_refused() {
        let cfg = MINIMAL.replace("kind = \"pure\"", "kind = \"fock\"").replace("gain = 3.0", "eta_ab = 0.9");
        assert!(RunConfig::from_toml(&cfg).is_err());
    }
}
