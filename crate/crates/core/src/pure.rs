//! Closed-form pure-state model of the teleportation-based amplifier.
//!
//! The resource is Ĝ applied to one arm of a two-mode squeezed vacuum, with
//! Ĝ = ââ† + (g-2)â†â = (g-1)n̂ + 1. Conditioning the teleporter on β = 0
//! outputs Ĝ|λα⟩, so every figure of merit reduces to Poisson moments of
//! |λα⟩.

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::params::{variances_from_moments, FidelityTarget, Metrics};
use crate::scalar::{from_usize, lit, to_f64, Real};

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda.abs() < T::one() {
        Ok(())
    } else {
        Err(domain("lambda", to_f64(lambda), "|lambda| < 1"))
    }
}

/// Amplitude-dependent gain g(α) of the normalised output Ĝ|λα⟩.
pub fn gain_alpha<T: Real>(lambda: T, g: T, alpha: T) -> T {
    let h = g - T::one();
    let x = (lambda * alpha).powi(2);
    let a = T::one() + h * x;
    lambda + lambda * h * a / (a * a + h * h * x)
}

/// Fidelity of the output with |gλα⟩.
pub fn fidelity_alpha<T: Real>(lambda: T, g: T, alpha: T) -> T {
    let h = g - T::one();
    let x = (lambda * alpha).powi(2);
    let a = T::one() + h * x;
    let num = (T::one() + g * h * x).powi(2);
    num / (a * a + h * h * x) * (-(h * h) * x).exp()
}

/// Fidelity of the normalised output Ĝ|λα⟩ with the coherent state
/// |target·α⟩.
pub fn fidelity_against<T: Real>(lambda: T, g: T, alpha: Complex<T>, target: T) -> T {
    let h = g - T::one();
    let beta = alpha * lambda;
    let gamma = alpha * target;
    let x = beta.norm_sqr();
    let norm = (T::one() + h * x).powi(2) + h * h * x;
    // ⟨γ|(h n̂ + 1)|β⟩ = ⟨γ|β⟩ (1 + h γ* β)
    let overlap = Complex::new(T::one(), T::zero()) + gamma.conj() * beta * h;
    (-(gamma - beta).norm_sqr()).exp() * overlap.norm_sqr() / norm
}

/// Gain, fidelity and quadrature variances of Ĝ|λα⟩ from closed-form
/// moments.
pub fn ideal_metrics<T: Real>(
    lambda: T,
    g: T,
    alpha: Complex<T>,
    target: FidelityTarget<T>,
) -> Metrics<T> {
    let h = g - T::one();
    let beta = alpha * lambda;
    let x = beta.norm_sqr();
    let x2 = x * x;
    let norm = (T::one() + h * x).powi(2) + h * h * x;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let mean_a = beta * ((h * h * (x2 + x) + h * (h + two) * x + h + T::one()) / norm);
    let mean_a2 = beta * beta * ((h * h * (x2 + x) + two * h * (h + T::one()) * x + two * h + T::one()) / norm);
    let mean_n = (h * h * (x2 * x + three * x2 + x) + two * h * (x2 + x) + x) / norm;
    let (v_x, v_p) = variances_from_moments(mean_a, mean_a2, mean_n);
    let gain = gain_alpha(lambda, g, alpha.norm_sqr().sqrt());
    let t = match target {
        FidelityTarget::MeasuredGain => gain,
        FidelityTarget::Fixed(t) => t,
    };
    Metrics {
        gain,
        fidelity: fidelity_against(lambda, g, alpha, t),
        v_x,
        v_p,
        p_ab: None,
        p_tele: None,
        p_tot: None,
    }
}

/// P_G = ⟨Ψ(λ)|Ĝ†Ĝ|Ψ(λ)⟩.
pub fn resource_norm<T: Real>(lambda: T, g: T) -> T {
    let h = g - T::one();
    let x = lambda * lambda;
    let one_m = T::one() - x;
    h * h * x * (T::one() + x) / (one_m * one_m) + lit::<T>(2.0) * h * x / one_m + T::one()
}

/// Probability density of the outcome β when teleporting with the plain
/// two-mode squeezed vacuum; `z` is α + β.
pub fn outcome_density_tmsv<T: Real>(lambda: T, z: Complex<T>) -> T {
    let c = T::one() - lambda * lambda;
    c / T::pi() * (-c * z.norm_sqr()).exp()
}

/// Probability density of the outcome β with the Ĝ-modified resource.
pub fn outcome_density_g<T: Real>(lambda: T, g: T, z: Complex<T>) -> T {
    let h = g - T::one();
    let c = T::one() - lambda * lambda;
    let y = lambda * lambda * z.norm_sqr();
    let amp = (T::one() + h * y).powi(2) + h * h * y;
    c / (T::pi() * resource_norm(lambda, g)) * (-c * z.norm_sqr()).exp() * amp
}

/// Heralded resource from generalised joint photon subtraction with
/// photon-number-resolving detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineeredResource<T: Real> {
    pub lambda: T,
    pub mu: T,
    pub transmittance: T,
    /// T·λ + R·μ.
    pub lambda_eff: T,
    /// Nominal gain.
    pub g: T,
    /// λ_eff · g.
    pub g_eff: T,
    /// Heralding probability.
    pub p_s: T,
}

impl<T: Real> EngineeredResource<T> {
    fn reflectance(&self) -> T {
        T::one() - self.transmittance
    }

    /// Unnormalised amplitude of |n,n⟩ (without the source prefactors).
    fn raw_coefficient(&self, n: usize) -> T {
        let r = self.reflectance();
        let t = self.transmittance;
        let d = self.lambda - self.mu;
        let le = self.lambda_eff;
        let ni = n as i32;
        let subtracted = if n == 0 {
            T::zero()
        } else {
            from_usize::<T>(n) * r * t * d * d * le.powi(ni - 1)
        };
        subtracted + (r * self.lambda + t * self.mu) * le.powi(ni)
    }

    /// Normalised Schmidt coefficient of |n,n⟩.
    pub fn coefficient(&self, n: usize) -> T {
        let pref = ((T::one() - self.lambda * self.lambda) * (T::one() - self.mu * self.mu)
            / self.p_s)
            .sqrt();
        pref * self.raw_coefficient(n)
    }

    pub fn coefficients(&self, count: usize) -> Vec<T> {
        (0..count).map(|n| self.coefficient(n)).collect()
    }
}

/// Resource parameters for sources λ, μ and tapping transmittance T.
pub fn resource_engineering<T: Real>(lambda: T, mu: T, transmittance: T) -> Result<EngineeredResource<T>> {
    check_lambda(lambda)?;
    if !(mu.abs() < T::one()) {
        return Err(domain("mu", to_f64(mu), "|mu| < 1"));
    }
    if !(transmittance >= T::zero() && transmittance <= T::one()) {
        return Err(domain("transmittance", to_f64(transmittance), "0 <= T <= 1"));
    }
    let t = transmittance;
    let r = T::one() - t;
    let lambda_eff = t * lambda + r * mu;
    if !(lambda_eff.abs() < T::one()) {
        return Err(domain("lambda_eff", to_f64(lambda_eff), "|lambda_eff| < 1"));
    }
    let mixed = r * lambda + t * mu;
    let denominator = mixed * (r * mu + t * lambda);
    if denominator.abs() <= T::default_epsilon() {
        return Err(Error::GainPole {
            denominator: to_f64(denominator),
        });
    }
    let d2 = (lambda - mu) * (lambda - mu);
    let g = T::one() + r * t * d2 / denominator;
    let one_m = T::one() - lambda_eff * lambda_eff;
    let inner = one_m * mixed + lambda_eff * r * t * d2;
    let p_s = (T::one() - lambda * lambda) * (T::one() - mu * mu) / one_m.powi(3)
        * (inner * inner + r * r * t * t * d2 * d2);
    Ok(EngineeredResource {
        lambda,
        mu,
        transmittance,
        lambda_eff,
        g,
        g_eff: lambda_eff * g,
        p_s,
    })
}

/// Exact effective gain λ_eff · g.
pub fn geff_exact<T: Real>(lambda: T, mu: T, transmittance: T) -> Result<T> {
    Ok(resource_engineering(lambda, mu, transmittance)?.g_eff)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSensitivity<T: Real> {
    /// Weak-tap, weak-auxiliary approximation Tλ(1 + Rλ/(Rλ + Tμ)).
    pub g_eff_approx: T,
    /// dg_eff/dμ.
    pub derivative: T,
    /// Same derivative written through g_eff and λ_eff.
    pub derivative_alt: T,
    /// True when μ² ≪ R ≪ 1 holds loosely (R < 0.1 and μ² < 0.1 R).
    pub small_regime: bool,
}

pub fn geff_sensitivity<T: Real>(lambda: T, mu: T, transmittance: T) -> Result<GainSensitivity<T>> {
    let res = resource_engineering(lambda, mu, transmittance)?;
    let t = transmittance;
    let r = T::one() - t;
    let mixed = r * lambda + t * mu;
    let two = lit::<T>(2.0);
    let g_eff_approx = t * lambda * (T::one() + r * lambda / mixed);
    let derivative = two * r - r * lambda * lambda / (mixed * mixed);
    let excess = res.g_eff - res.lambda_eff;
    let derivative_alt =
        two * r - lambda * lambda * excess * excess / (r * t * t * (lambda - mu).powi(4));
    Ok(GainSensitivity {
        g_eff_approx,
        derivative,
        derivative_alt,
        small_regime: r < lit(0.1) && mu * mu < lit::<T>(0.1) * r,
    })
}

/// Resource for the amplifier Ĝ_N truncated at Fock state N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedAmplifier<T: Real> {
    pub lambda: T,
    pub g: T,
    pub cutoff: usize,
    /// Normalisation P_N.
    pub p_n: T,
    /// Largest |α| amplified faithfully.
    pub alpha_th: T,
}

impl<T: Real> TruncatedAmplifier<T> {
    pub fn coefficient(&self, n: usize) -> T {
        let pref = ((T::one() - self.lambda * self.lambda) / self.p_n).sqrt();
        if n <= self.cutoff {
            pref * (self.g * self.lambda).powi(n as i32) / self.g.powi(self.cutoff as i32)
        } else {
            pref * self.lambda.powi(n as i32)
        }
    }

    pub fn coefficients(&self, count: usize) -> Vec<T> {
        (0..count).map(|n| self.coefficient(n)).collect()
    }

    /// Outcome density for |α + β| below threshold; `z` is α + β.
    pub fn outcome_density(&self, z: Complex<T>) -> T {
        let c = T::one() - self.lambda * self.lambda;
        let gl2 = (self.g * self.lambda).powi(2);
        c / (T::pi() * self.g.powi(2 * self.cutoff as i32) * self.p_n)
            * ((gl2 - T::one()) * z.norm_sqr()).exp()
    }
}

pub fn gn_model<T: Real>(lambda: T, g: T, cutoff: usize) -> Result<TruncatedAmplifier<T>> {
    check_lambda(lambda)?;
    if !(g > T::zero()) {
        return Err(domain("g", to_f64(g), "g > 0"));
    }
    let n = cutoff as i32;
    let lam2 = lambda * lambda;
    let gl2 = g * g * lam2;
    let g2n = g.powi(2 * n);
    let one_m = T::one() - gl2;
    // Geometric sum Σ_{n=0}^{N} (gλ)^{2n}; the closed form is singular at gλ = 1.
    let geometric = if one_m.abs() < T::default_epsilon().sqrt() {
        (0..=cutoff).fold(T::zero(), |acc, k| acc + gl2.powi(k as i32))
    } else {
        (T::one() - gl2.powi(n + 1)) / one_m
    };
    let p_n = (T::one() - lam2) * geometric / g2n + lam2.powi(n + 1);
    let alpha_th = ((from_usize::<T>(cutoff) + lit(2.25)).sqrt() - lit(1.5)) / (g * lambda);
    Ok(TruncatedAmplifier {
        lambda,
        g,
        cutoff,
        p_n,
        alpha_th,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowProbability<T: Real> {
    pub p_tele: T,
    /// σ² < 1/(λ²g² - 1): the β integral converges.
    pub converges: bool,
    /// Three-standard-deviation support of the accepted β stays below α_th.
    pub within_support: bool,
}

impl<T: Real> WindowProbability<T> {
    pub fn valid(&self) -> bool {
        self.converges && self.within_support
    }
}

/// Success probability of the Ĝ_N teleamplifier with Gaussian acceptance
/// window exp(-|β|²/σ²).
pub fn ptele_window<T: Real>(
    lambda: T,
    g: T,
    cutoff: usize,
    sigma: T,
    alpha: T,
) -> Result<WindowProbability<T>> {
    if !(sigma >= T::zero()) {
        return Err(domain("sigma", to_f64(sigma), "sigma >= 0"));
    }
    let model = gn_model(lambda, g, cutoff)?;
    let s2 = sigma * sigma;
    let lg2 = (lambda * g).powi(2);
    let s = T::one() + s2 - s2 * lg2;
    let p_tele = (T::one() - lambda * lambda) / (g.powi(2 * cutoff as i32) * model.p_n) * s2 / s
        * ((lg2 - T::one()) * alpha * alpha / s).exp();
    let converges = s > T::zero();
    let lg = (lambda * g).abs();
    let lhs = lg * alpha.abs() / s + lit::<T>(3.0) * lg * sigma / (lit::<T>(2.0) * s).sqrt();
    let within_support = converges && lhs < model.alpha_th * lg;
    Ok(WindowProbability {
        p_tele,
        converges,
        within_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gain_limits() {
        assert_relative_eq!(gain_alpha(0.5, 3.0, 0.0), 1.5, epsilon = 1e-15);
        assert_relative_eq!(gain_alpha(0.5, 4.0, 1e9), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_limits() {
        assert_eq!(fidelity_alpha(0.5, 3.0, 0.0), 1.0);
        for a in [0.1, 0.5, 1.0, 3.0] {
            assert_relative_eq!(fidelity_alpha(0.5, 1.0, a), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn fidelity_against_nominal_target_matches_closed_form() {
        for a in [0.0, 0.3, 0.8, 1.4] {
            let f = fidelity_against(0.5, 3.0, Complex::new(a, 0.0), 1.5);
            assert_relative_eq!(f, fidelity_alpha(0.5, 3.0, a), epsilon = 1e-14);
        }
    }

    #[test]
    fn ideal_metrics_vacuum_and_identity() {
        let m = ideal_metrics(0.5, 3.0, Complex::new(0.0, 0.0), FidelityTarget::MeasuredGain);
        assert_relative_eq!(m.v_x, 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.v_p, 0.5, epsilon = 1e-15);
        let m = ideal_metrics(0.5, 1.0, Complex::new(0.7, 0.2), FidelityTarget::MeasuredGain);
        assert_relative_eq!(m.gain, 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.fidelity, 1.0, epsilon = 1e-14);
        assert_relative_eq!(m.uncertainty_product(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn tmsv_density_normalised() {
        // ∫ (1-λ²)/π e^{-(1-λ²)|z|²} d²z = 1 in polar form.
        let lambda: f64 = 0.5;
        let c = 1.0 - lambda * lambda;
        let total: f64 = crate::quadrature::gauss_legendre_on(80, 0.0, 12.0)
            .iter()
            .map(|&(r, w)| w * 2.0 * std::f64::consts::PI * r * outcome_density_tmsv(lambda, Complex::new(r, 0.0)))
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert_relative_eq!(outcome_density_tmsv(lambda, Complex::new(0.0, 0.0)), c / std::f64::consts::PI);
    }

    #[test]
    fn mu_zero_gives_gain_two() {
        let r = resource_engineering(0.5, 0.0, 0.9).unwrap();
        assert_eq!(r.g, 2.0);
        assert_relative_eq!(r.lambda_eff, 0.45, epsilon = 1e-15);
    }

    #[test]
    fn mu_equal_lambda_is_unamplified() {
        let r = resource_engineering(0.4, 0.4, 0.8).unwrap();
        assert_eq!(r.g, 1.0);
        let c = r.coefficients(6);
        for n in 1..6 {
            assert_relative_eq!(c[n] / c[n - 1], r.lambda_eff, epsilon = 1e-14);
        }
    }

    #[test]
    fn coefficients_follow_gain_profile() {
        let r = resource_engineering(0.5, -0.015, 0.95).unwrap();
        let c = r.coefficients(20);
        for (n, &cn) in c.iter().enumerate() {
            let target = ((r.g - 1.0) * n as f64 + 1.0) * r.lambda_eff.powi(n as i32);
            assert_relative_eq!(cn / c[0], target, max_relative = 1e-12);
        }
    }

    #[test]
    fn p_s_matches_series() {
        for &(l, m, t) in &[(0.5, -0.015, 0.95), (0.3, 0.1, 0.7), (0.6, -0.2, 0.99), (0.5, 0.0, 0.9)] {
            let r = resource_engineering::<f64>(l, m, t).unwrap();
            let raw: f64 = (0..400).map(|n| r.raw_coefficient(n).powi(2)).sum();
            let series = (1.0 - l * l) * (1.0 - m * m) * raw;
            assert_relative_eq!(r.p_s, series, max_relative = 1e-12);
            let norm: f64 = r.coefficients(400).iter().map(|c| c * c).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gain_pole_is_an_error() {
        // Rλ + Tμ = 0.
        let t = 0.9;
        let mu = -(0.1 * 0.5) / t;
        assert!(matches!(resource_engineering(0.5, mu, t), Err(Error::GainPole { .. })));
    }

    #[test]
    fn sensitivity_at_mu_zero() {
        let s = geff_sensitivity(0.5, 0.0, 0.95).unwrap();
        assert_relative_eq!(s.g_eff_approx, 2.0 * 0.95 * 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.derivative, s.derivative_alt, max_relative = 1e-12);
    }

    #[test]
    fn gn_model_trivial_cutoff() {
        let m = gn_model(0.5, 3.0, 0).unwrap();
        assert_eq!(m.alpha_th, 0.0);
        assert_relative_eq!(m.p_n, 1.0, epsilon = 1e-15);
        let c = m.coefficients(5);
        for n in 1..5 {
            assert_relative_eq!(c[n] / c[n - 1], 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn gn_model_degenerate_point() {
        let m = gn_model(0.5, 2.0, 1).unwrap();
        assert_relative_eq!(m.alpha_th, 3.25f64.sqrt() - 1.5, epsilon = 1e-15);
        assert_relative_eq!(m.alpha_th, 0.30277563773199456, epsilon = 1e-15);
        // Σ_{n≤1} 1 = 2 terms: P_1 = (1-λ²)·2/g² + λ⁴.
        assert_relative_eq!(m.p_n, 0.75 * 2.0 / 4.0 + 0.0625, epsilon = 1e-15);
        let near = gn_model(0.5, 2.0 + 1e-7, 1).unwrap();
        assert_relative_eq!(near.p_n, m.p_n, epsilon = 1e-6);
    }

    #[test]
    fn gn_model_normalised() {
        let m = gn_model(0.5, 3.0, 8).unwrap();
        let s: f64 = m.coefficients(300).iter().map(|c| c * c).sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        assert!(m.coefficients(300).iter().all(|&c| c >= 0.0));
        // Golden value from direct series summation.
        let direct: f64 = (0..=8).map(|n| (1.5f64).powi(2 * n)).sum::<f64>() * 0.75 / 3f64.powi(16)
            + 0.25f64.powi(9);
        assert_relative_eq!(m.p_n, direct, max_relative = 1e-13);
    }

    #[test]
    fn ptele_small_window() {
        let a = ptele_window(0.5, 3.0, 8, 1e-3, 0.3).unwrap();
        let b = ptele_window(0.5, 3.0, 8, 2e-3, 0.3).unwrap();
        assert_relative_eq!(b.p_tele / a.p_tele, 4.0, max_relative = 1e-5);
        assert_eq!(ptele_window(0.5, 3.0, 8, 0.0, 0.3).unwrap().p_tele, 0.0);
    }

    #[test]
    fn ptele_converges_when_unamplified() {
        for s in [0.1, 1.0, 10.0, 100.0] {
            assert!(ptele_window(0.5, 1.5, 4, s, 0.2).unwrap().converges);
        }
        assert!(!ptele_window(0.5, 3.0, 4, 1.0, 0.2).unwrap().converges);
    }

    #[test]
    fn works_in_single_precision() {
        let g: f32 = gain_alpha(0.5f32, 4.0, 1.0);
        assert!((g - gain_alpha(0.5f64, 4.0, 1.0) as f32).abs() < 1e-6);
        let r = resource_engineering(0.5f32, 0.0, 0.9).unwrap();
        assert_eq!(r.g, 2.0f32);
    }
}
