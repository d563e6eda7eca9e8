//! One evaluator per model kind, prepared once and then queried per α.

use num_complex::Complex;
use teleamp_core::fock::{prepare_resource_fock, teleport_fock, windowed_teleport_fock, metrics_fock};
use teleamp_core::phase_space::{phase_space_metrics, resource_q};
use teleamp_core::pure::{ideal_metrics, ptele_window, resource_engineering};
use teleamp_core::quadrature::PolarGrid;
use teleamp_core::{AmplifierParams, FidelityTarget, FockMix, Metrics, ResourceQ};

use crate::config::{ModelKind, PureResource, RunConfig};
use crate::error::Result;

/// Amplitude at which moment-based gains stand in for α = 0.
pub const FOCK_GAIN_PROBE: f64 = 1e-6;

pub enum Evaluator {
    Pure {
        lambda: f64,
        g: f64,
        cutoff: usize,
        sigma: f64,
        p_ab: Option<f64>,
    },
    Phase {
        params: AmplifierParams<f64>,
        resource: ResourceQ<f64>,
    },
    Fock {
        resource: FockMix<f64>,
        p_ab: f64,
        sigma: f64,
        k: f64,
    },
}

impl Evaluator {
    pub fn prepare(cfg: &RunConfig) -> Result<Self> {
        let p = cfg.amplifier_params();
        Ok(match cfg.model.kind {
            ModelKind::Pure => match cfg.model.resource {
                PureResource::Nominal => Evaluator::Pure {
                    lambda: p.lambda,
                    g: p.gain,
                    cutoff: p.cutoff,
                    sigma: p.sigma,
                    p_ab: None,
                },
                PureResource::Engineered => {
                    let r = resource_engineering(p.lambda, p.mu, p.transmittance)?;
                    Evaluator::Pure {
                        lambda: r.lambda_eff,
                        g: r.g,
                        cutoff: p.cutoff,
                        sigma: p.sigma,
                        p_ab: Some(r.p_s),
                    }
                }
            },
            ModelKind::Phase => Evaluator::Phase {
                resource: resource_q(&p)?,
                params: p,
            },
            ModelKind::Fock => {
                let r = prepare_resource_fock(
                    p.lambda,
                    p.mu,
                    p.transmittance,
                    cfg.model.fock_dim,
                    cfg.model.detector.into(),
                )?;
                Evaluator::Fock {
                    resource: r.state,
                    p_ab: r.p_ab,
                    sigma: p.sigma,
                    k: p.k,
                }
            }
        })
    }

    pub fn point(&self, alpha: Complex<f64>, target: FidelityTarget<f64>) -> Result<Metrics<f64>> {
        match self {
            Evaluator::Pure {
                lambda,
                g,
                cutoff,
                sigma,
                p_ab,
            } => {
                let mut m = ideal_metrics(*lambda, *g, alpha, target);
                m.p_ab = *p_ab;
                if *sigma > 0.0 && *cutoff > 0 {
                    let w = ptele_window(*lambda, *g, *cutoff, *sigma, alpha.norm())?;
                    if w.valid() {
                        m.p_tele = Some(w.p_tele);
                        m.p_tot = p_ab.map(|p| p * w.p_tele);
                    }
                }
                Ok(m)
            }
            Evaluator::Phase { params, resource } => {
                Ok(phase_space_metrics(params, resource, alpha, target)?)
            }
            Evaluator::Fock {
                resource,
                p_ab,
                sigma,
                k,
            } => {
                let run = |a: Complex<f64>| -> Result<(Metrics<f64>, Option<f64>)> {
                    if *sigma > 0.0 {
                        let w = windowed_teleport_fock(resource, a, *sigma, *k, &PolarGrid::for_window(*sigma))?;
                        Ok((metrics_fock(&w.state, a, target)?, Some(w.p_tele)))
                    } else {
                        let out = teleport_fock(resource, a, Complex::new(0.0, 0.0), *k)?;
                        Ok((metrics_fock(&out.state, a, target)?, None))
                    }
                };
                let (mut m, p_tele) = run(alpha)?;
                if alpha.norm() == 0.0 {
                    m.gain = run(Complex::new(FOCK_GAIN_PROBE, 0.0))?.0.gain;
                }
                m.p_ab = Some(*p_ab);
                m.p_tele = p_tele;
                m.p_tot = p_tele.map(|t| t * p_ab);
                Ok(m)
            }
        }
    }
}
