//! Protocol parameters and per-amplitude figures of merit.

use crate::error::{domain, Result};
use crate::scalar::{lit, to_f64, Real};

/// Every knob of the amplifier: source squeezing, tapping beam splitters,
/// losses, nominal gain, amplifier cutoff and the acceptance window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierParams<T: Real> {
    /// Squeezing of the main two-mode squeezed vacuum (modes A, B).
    pub lambda: T,
    /// Squeezing of the auxiliary two-mode squeezed vacuum (modes C, D).
    pub mu: T,
    /// Intensity transmittance of the tapping beam splitters.
    pub transmittance: T,
    /// Nominal amplifier gain used by the ideal-operator models.
    pub gain: T,
    /// Fock cutoff of the truncated amplifier.
    pub cutoff: usize,
    /// Width of the Gaussian acceptance window; zero means conditioning on β = 0.
    pub sigma: T,
    /// Strength of the corrective displacement -kβ on the output mode.
    pub k: T,
    pub eta_ab: T,
    pub eta_cd: T,
    pub eta_apd: T,
}

impl<T: Real> AmplifierParams<T> {
    /// Lossless, unit-efficiency parameters with β = 0 conditioning.
    pub fn new(lambda: T, mu: T, transmittance: T) -> Self {
        Self {
            lambda,
            mu,
            transmittance,
            gain: lit(2.0),
            cutoff: 0,
            sigma: T::zero(),
            k: T::zero(),
            eta_ab: T::one(),
            eta_cd: T::one(),
            eta_apd: T::one(),
        }
    }

    pub fn with_efficiencies(mut self, eta_ab: T, eta_cd: T, eta_apd: T) -> Self {
        self.eta_ab = eta_ab;
        self.eta_cd = eta_cd;
        self.eta_apd = eta_apd;
        self
    }

    pub fn with_window(mut self, sigma: T, k: T) -> Self {
        self.sigma = sigma;
        self.k = k;
        self
    }

    pub fn reflectance(&self) -> T {
        T::one() - self.transmittance
    }

    /// Effective squeezing T·λ + R·μ of the heralded resource.
    pub fn lambda_eff(&self) -> T {
        self.transmittance * self.lambda + self.reflectance() * self.mu
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name, v: T| {
            if v.abs() < T::one() {
                Ok(())
            } else {
                Err(domain(name, to_f64(v), "|x| < 1"))
            }
        };
        let closed_unit = |name, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(domain(name, to_f64(v), "0 <= x <= 1"))
            }
        };
        open_unit("lambda", self.lambda)?;
        open_unit("mu", self.mu)?;
        closed_unit("transmittance", self.transmittance)?;
        closed_unit("eta_ab", self.eta_ab)?;
        closed_unit("eta_cd", self.eta_cd)?;
        closed_unit("eta_apd", self.eta_apd)?;
        open_unit("lambda_eff", self.lambda_eff())?;
        if !(self.gain > T::zero()) {
            return Err(domain("gain", to_f64(self.gain), "g > 0"));
        }
        if !(self.sigma >= T::zero()) {
            return Err(domain("sigma", to_f64(self.sigma), "sigma >= 0"));
        }
        Ok(())
    }
}

/// Output figures of merit at one input amplitude.
///
/// Variances use the convention vacuum = 1/2. Probabilities that do not apply
/// to a model are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics<T: Real> {
    /// Amplitude gain; NaN where it is undefined (α = 0 for moment-based models).
    pub gain: T,
    pub fidelity: T,
    pub v_x: T,
    pub v_p: T,
    pub p_ab: Option<T>,
    pub p_tele: Option<T>,
    pub p_tot: Option<T>,
}

impl<T: Real> Metrics<T> {
    pub fn uncertainty_product(&self) -> T {
        self.v_x * self.v_p
    }

    /// Uncertainty product g²/2 - 1/4 of the optimal deterministic linear
    /// amplifier with the same gain.
    pub fn deterministic_benchmark(&self) -> T {
        self.gain * self.gain * lit(0.5) - lit(0.25)
    }
}

/// Which coherent state the output fidelity is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityTarget<T: Real> {
    /// |g(α)α⟩ with the measured amplitude-dependent gain.
    MeasuredGain,
    /// |gα⟩ for a fixed gain.
    Fixed(T),
}

/// Quadrature variances (V_x, V_p) from the moments ⟨a⟩, ⟨a²⟩ and ⟨a†a⟩.
pub fn variances_from_moments<T: Real>(
    mean_a: num_complex::Complex<T>,
    mean_a2: num_complex::Complex<T>,
    mean_n: T,
) -> (T, T) {
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let sym = two * mean_n + T::one();
    let v_x = half * (two * mean_a2.re + sym) - two * mean_a.re * mean_a.re;
    let v_p = half * (sym - two * mean_a2.re) - two * mean_a.im * mean_a.im;
    (v_x, v_p)
}
