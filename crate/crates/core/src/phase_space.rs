//! Realistic model: the heralded resource as a signed mixture of four
//! Gaussian Husimi functions, teleported at β = 0 or through a Gaussian
//! acceptance window.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::{
    build_effective_cov, gauss_condition, gauss_window, ConditionedGaussian, QExponent,
    RealPhaseVector,
};
use crate::linalg::{signed_exp_sum, SpdFactor};
use crate::params::{AmplifierParams, FidelityTarget, Metrics};
use crate::quadrature::gauss_legendre_on;
use crate::scalar::{lit, nan, to_f64, Real};

/// Probe half-width and resolution for the Husimi non-negativity check.
pub const PROBE_HALF_WIDTH: f64 = 4.0;
pub const PROBE_POINTS: usize = 41;

/// One signed Gaussian term C · K · √det Γ/π^N · exp(-(r-m)ᵀ Γ (r-m)).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussTerm<T: Real> {
    /// Inclusion-exclusion sign C_j = ±1.
    pub coeff: i32,
    /// ln K_j.
    pub log_weight: T,
    pub exponent: QExponent<T>,
    log_det: T,
    /// Displacement map D_j taking the input amplitude to the mean, if any.
    pub map: Option<DMatrix<T>>,
    pub mean: DVector<T>,
}

impl<T: Real> GaussTerm<T> {
    fn new(
        coeff: i32,
        log_weight: T,
        exponent: QExponent<T>,
        map: Option<DMatrix<T>>,
        mean: DVector<T>,
    ) -> Result<Self> {
        let log_det = exponent.log_det()?;
        Ok(Self {
            coeff,
            log_weight,
            exponent,
            log_det,
            map,
            mean,
        })
    }

    /// Normalised Gaussian density at `r`.
    pub fn density(&self, r: &DVector<T>) -> T {
        let dr = r - &self.mean;
        let q = dr.dot(&(self.exponent.matrix() * &dr));
        let n = self.exponent.n_modes() as i32;
        (self.log_det * lit(0.5) - q).exp() / T::pi().powi(n)
    }
}

/// Signed Gaussian mixture Q(r) = Σ C_j K_j G_j(r) / total.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussMixQ<T: Real> {
    pub terms: Vec<GaussTerm<T>>,
    /// Input amplitude the means were evaluated at (zero for the resource).
    pub amplitude: RealPhaseVector<T>,
}

impl<T: Real> GaussMixQ<T> {
    pub fn n_modes(&self) -> usize {
        self.terms.first().map_or(0, |t| t.exponent.n_modes())
    }

    /// Σ C_j K_j, assembled from log-magnitudes.
    pub fn total(&self) -> T {
        let parts: Vec<(i32, T)> = self.terms.iter().map(|t| (t.coeff, t.log_weight)).collect();
        signed_exp_sum(&parts)
    }

    /// Term weights C_j K_j / total; they sum to one.
    pub fn normalized_weights(&self) -> Result<Vec<T>> {
        let total = self.total();
        if !(total > T::zero()) {
            return Err(Error::NonPositiveProbability {
                context: "Gaussian mixture normalisation",
                value: to_f64(total),
            });
        }
        let ln_total = total.ln();
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let w = (t.log_weight - ln_total).exp();
                if t.coeff >= 0 {
                    w
                } else {
                    -w
                }
            })
            .collect())
    }

    /// Normalised Husimi function at `r` = [Re ω₁, Im ω₁, …].
    pub fn q(&self, r: &DVector<T>) -> Result<T> {
        let w = self.normalized_weights()?;
        Ok(self
            .terms
            .iter()
            .zip(w)
            .fold(T::zero(), |acc, (t, w)| acc + w * t.density(r)))
    }

    /// Mean amplitude d̄ as [Re, Im, …].
    pub fn mean(&self) -> Result<DVector<T>> {
        let w = self.normalized_weights()?;
        let mut out = DVector::zeros(2 * self.n_modes());
        for (t, w) in self.terms.iter().zip(w) {
            out += &t.mean * w;
        }
        Ok(out)
    }

    /// Covariance γ = Σ w_j (2Γ_j⁻¹ + 4 m_j m_jᵀ) - 4 d̄ d̄ᵀ - I.
    pub fn covariance(&self) -> Result<DMatrix<T>> {
        let w = self.normalized_weights()?;
        let n = 2 * self.n_modes();
        let mut acc = DMatrix::zeros(n, n);
        let mut mean = DVector::zeros(n);
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        for (t, w) in self.terms.iter().zip(w) {
            let inv = SpdFactor::new(t.exponent.matrix(), "output Q exponent")?.inverse();
            acc += (inv * two + &t.mean * t.mean.transpose() * four) * w;
            mean += &t.mean * w;
        }
        Ok(acc - &mean * mean.transpose() * four - DMatrix::identity(n, n))
    }

    /// Small-amplitude gain Σ w_j (D_j)_xx with weights at zero amplitude.
    fn linear_gain(&self) -> Option<T> {
        let w = self.normalized_weights().ok()?;
        let mut g = T::zero();
        for (t, w) in self.terms.iter().zip(w) {
            g += t.map.as_ref()?[(0, 0)] * w;
        }
        Some(g)
    }

    /// Integral of Q over phase space by tensor Gauss-Legendre quadrature on
    /// [-L, L]^(2N); used as a spot check of the closed-form normalisation.
    pub fn quadrature_norm(&self, half_width: f64, nodes: usize) -> Result<T> {
        let rule = gauss_legendre_on(nodes, -half_width, half_width);
        let dim = 2 * self.n_modes();
        let mut idx = vec![0usize; dim];
        let mut acc = T::zero();
        loop {
            let mut r = DVector::zeros(dim);
            let mut w = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                r[k] = lit::<T>(rule[i].0);
                w *= rule[i].1;
            }
            acc += self.q(&r)? * lit::<T>(w);
            let mut k = 0;
            loop {
                if k == dim {
                    return Ok(acc);
                }
                idx[k] += 1;
                if idx[k] < nodes {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Smallest Q value on the 41×41 probe grid over |Re ω|, |Im ω| ≤ 4.
    ///
    /// For two modes the grid runs over ω_A with ω_B ∈ {0, ω_A, ω_A*}.
    pub fn probe_min(&self) -> Result<T> {
        let n = self.n_modes();
        let step = 2.0 * PROBE_HALF_WIDTH / (PROBE_POINTS - 1) as f64;
        let mut min = T::max_value().unwrap_or_else(T::one);
        for i in 0..PROBE_POINTS {
            for j in 0..PROBE_POINTS {
                let x = lit::<T>(-PROBE_HALF_WIDTH + i as f64 * step);
                let y = lit::<T>(-PROBE_HALF_WIDTH + j as f64 * step);
                let points: Vec<DVector<T>> = match n {
                    1 => vec![DVector::from_vec(vec![x, y])],
                    _ => [(T::zero(), T::zero()), (x, y), (x, -y)]
                        .iter()
                        .map(|&(bx, by)| {
                            let mut r = DVector::zeros(2 * n);
                            r[0] = x;
                            r[1] = y;
                            r[2] = bx;
                            r[3] = by;
                            r
                        })
                        .collect(),
                };
                for r in &points {
                    min = min.min(self.q(r)?);
                }
            }
        }
        Ok(min)
    }
}

/// Heralded (A, B) resource with its preparation probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceQ<T: Real> {
    /// Unnormalised: `mix.total()` equals `p_ab`.
    pub mix: GaussMixQ<T>,
    pub p_ab: T,
}

/// Inclusion-exclusion expansion of the two on-off clicks:
/// Tr_CD − ⟨0_C| · |0_C⟩ − ⟨0_D| · |0_D⟩ + ⟨0_C 0_D| · |0_C 0_D⟩.
const CLICK_TERMS: [(i32, &[usize]); 4] = [
    (1, &[0, 1]),
    (-1, &[0, 1, 2]),
    (-1, &[0, 1, 3]),
    (1, &[0, 1, 2, 3]),
];

/// Four-term Husimi mixture of the resource conditioned on clicks of both
/// on-off detectors.
pub fn resource_q<T: Real>(params: &AmplifierParams<T>) -> Result<ResourceQ<T>> {
    let gamma = build_effective_cov(params)?;
    let mut terms = Vec::with_capacity(4);
    for (coeff, modes) in CLICK_TERMS {
        let full = gamma.reduced(modes).q_exponent()?;
        let ab = full.reduced(&[0, 1]);
        let log_k = (full.log_det()? - ab.log_det()?) * lit(0.5);
        terms.push(GaussTerm::new(coeff, log_k, ab, None, DVector::zeros(4))?);
    }
    let mix = GaussMixQ {
        terms,
        amplitude: RealPhaseVector::zeros(1),
    };
    let p_ab = mix.total();
    if !(p_ab > T::zero()) {
        return Err(Error::NonPositiveProbability {
            context: "resource heralding",
            value: to_f64(p_ab),
        });
    }
    Ok(ResourceQ { mix, p_ab })
}

fn teleport_terms<T: Real>(
    resource: &GaussMixQ<T>,
    alpha: Complex<T>,
    condition: impl Fn(&QExponent<T>) -> Result<ConditionedGaussian<T>>,
) -> Result<GaussMixQ<T>> {
    if resource.n_modes() != 2 {
        return Err(Error::Shape("teleportation needs a two-mode resource".into()));
    }
    let d = RealPhaseVector::single(alpha);
    let mut terms = Vec::with_capacity(resource.terms.len());
    for t in &resource.terms {
        let c = condition(&t.exponent)?;
        let mean = c.mean(&d);
        terms.push(GaussTerm::new(
            t.coeff,
            t.log_weight + c.log_weight(&d),
            c.exponent,
            Some(c.map),
            mean,
        )?);
    }
    Ok(GaussMixQ { terms, amplitude: d })
}

/// Output of mode B conditioned on the outcome β = 0.
///
/// `total()` of the result is the outcome density P_0, conditional on
/// heralding.
pub fn teleamp_beta0<T: Real>(resource: &ResourceQ<T>, alpha: Complex<T>) -> Result<GaussMixQ<T>> {
    let mut out = teleport_terms(&resource.mix, alpha, |g| gauss_condition(g, 0))?;
    let ln_p = resource.p_ab.ln();
    for t in &mut out.terms {
        t.log_weight -= ln_p;
    }
    let p0 = out.total();
    if !(p0 > T::zero()) {
        return Err(Error::NonPositiveProbability {
            context: "beta = 0 outcome density",
            value: to_f64(p0),
        });
    }
    Ok(out)
}

/// Window-integrated output with its success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedQ<T: Real> {
    /// Unnormalised: `state.total()` equals `p_tot`.
    pub state: GaussMixQ<T>,
    pub p_ab: T,
    pub p_tele: T,
    pub p_tot: T,
}

/// Relative tolerance of the assembled P_tot = P_AB · P_tele identity.
pub const PRODUCT_TOL: f64 = 1e-12;

/// Output integrated over β with acceptance e^{-|β|²/σ²} and corrective
/// displacement -kβ.
pub fn teleamp_windowed<T: Real>(
    resource: &ResourceQ<T>,
    alpha: Complex<T>,
    sigma: T,
    k: T,
) -> Result<WindowedQ<T>> {
    let state = teleport_terms(&resource.mix, alpha, |g| gauss_window(g, 0, sigma, k))?;
    let p_tot = state.total();
    if !(p_tot > T::zero()) {
        return Err(Error::NonPositiveProbability {
            context: "windowed success probability",
            value: to_f64(p_tot),
        });
    }
    let p_tele = p_tot / resource.p_ab;
    let defect = to_f64(((p_tot - resource.p_ab * p_tele) / p_tot).abs());
    if defect > PRODUCT_TOL {
        return Err(Error::NonPositiveProbability {
            context: "P_tot = P_AB * P_tele identity",
            value: defect,
        });
    }
    Ok(WindowedQ {
        state,
        p_ab: resource.p_ab,
        p_tele,
        p_tot,
    })
}

/// Gain, fidelity and variances of a single-mode output mixture.
///
/// The gain is Re(d̄ α*)/|α|²; at α = 0 its small-amplitude limit
/// Σ w_j (D_j)_xx is reported.
pub fn metrics_q<T: Real>(
    state: &GaussMixQ<T>,
    alpha: Complex<T>,
    target: FidelityTarget<T>,
) -> Result<Metrics<T>> {
    if state.n_modes() != 1 {
        return Err(Error::Shape("metrics need a single-mode output".into()));
    }
    let mean = state.mean()?;
    let amp2 = alpha.norm_sqr();
    let gain = if amp2 > T::zero() {
        (mean[0] * alpha.re + mean[1] * alpha.im) / amp2
    } else {
        state.linear_gain().unwrap_or_else(nan)
    };
    let gamma = state.covariance()?;
    let min_eig = gamma.symmetric_eigenvalues().min();
    if to_f64(min_eig) < -1e-9 {
        return Err(Error::Unphysical {
            min_eigenvalue: to_f64(min_eig),
        });
    }
    let amp = match target {
        FidelityTarget::Fixed(g) => alpha * g,
        FidelityTarget::MeasuredGain => alpha * gain,
    };
    let fidelity = T::pi() * state.q(&RealPhaseVector::single(amp).0)?;
    Ok(Metrics {
        gain,
        fidelity,
        v_x: gamma[(0, 0)] * lit(0.5),
        v_p: gamma[(1, 1)] * lit(0.5),
        p_ab: None,
        p_tele: None,
        p_tot: None,
    })
}

/// Full chain for one input amplitude: resource, teleportation (β = 0 when
/// σ = 0, windowed otherwise) and metrics with the probabilities filled in.
pub fn phase_space_metrics<T: Real>(
    params: &AmplifierParams<T>,
    resource: &ResourceQ<T>,
    alpha: Complex<T>,
    target: FidelityTarget<T>,
) -> Result<Metrics<T>> {
    if params.sigma > T::zero() {
        let w = teleamp_windowed(resource, alpha, params.sigma, params.k)?;
        let mut m = metrics_q(&w.state, alpha, target)?;
        m.p_ab = Some(w.p_ab);
        m.p_tele = Some(w.p_tele);
        m.p_tot = Some(w.p_tot);
        Ok(m)
    } else {
        let out = teleamp_beta0(resource, alpha)?;
        let mut m = metrics_q(&out, alpha, target)?;
        m.p_ab = Some(resource.p_ab);
        Ok(m)
    }
}
