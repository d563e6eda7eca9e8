//! Gaussian-state algebra in the vacuum = identity convention.
//!
//! Quadratures are x = (a + a†)/√2 and p = (a - a†)/(i√2), ordered
//! (x₁, p₁, …, x_N, p_N). A Gaussian Husimi function is written
//! Q(r) = √det Γ / π^N · exp(-rᵀ Γ r) over r = [Re ω₁, Im ω₁, …], with
//! Γ = 2(γ + I)⁻¹.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::linalg::{
    check_symmetric, direct_sum, mode_indices, submatrix, symmetrize, symplectic_eigenvalues,
    symplectic_form, SpdFactor,
};
use crate::params::AmplifierParams;
use crate::scalar::{lit, to_f64, Real};

/// Smallest symplectic eigenvalue accepted as physical is `1 - PHYSICAL_TOL`.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Quadrature covariance matrix γ_jk = ⟨{Δq_j, Δq_k}⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix<T: Real> {
    data: DMatrix<T>,
}

impl<T: Real> CovMatrix<T> {
    pub fn new(data: DMatrix<T>) -> Result<Self> {
        check_symmetric(&data)?;
        if !data.nrows().is_multiple_of(2) || data.nrows() == 0 {
            return Err(Error::Shape(format!(
                "covariance dimension {} is not 2n",
                data.nrows()
            )));
        }
        Ok(Self {
            data: symmetrize(&data),
        })
    }

    /// Vacuum on `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            data: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        symplectic_eigenvalues(&self.data)
    }

    pub fn min_symplectic_eigenvalue(&self) -> T {
        self.symplectic_eigenvalues()
            .into_iter()
            .reduce(|a, b| a.min(b))
            .unwrap_or(T::one())
    }

    pub fn check_physical(&self) -> Result<()> {
        let nu = self.min_symplectic_eigenvalue();
        if to_f64(nu) < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical {
                min_eigenvalue: to_f64(nu),
            });
        }
        Ok(())
    }

    /// Reduced covariance of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Self {
        Self {
            data: submatrix(&self.data, &mode_indices(modes)),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            data: direct_sum(&self.data, &other.data),
        }
    }

    pub fn transform(&self, t: &SymplecticTransform<T>) -> Result<Self> {
        if t.s.nrows() != self.data.nrows() {
            return Err(Error::Shape(format!(
                "transform of size {} applied to {}-mode covariance",
                t.s.nrows(),
                self.n_modes()
            )));
        }
        Self::new(symmetrize(&(&t.s * &self.data * t.s.transpose() + &t.g)))
    }

    /// Exponent Γ = 2(γ + I)⁻¹ of the Husimi function.
    pub fn q_exponent(&self) -> Result<QExponent<T>> {
        let n = self.data.nrows();
        let f = SpdFactor::new(&(&self.data + DMatrix::identity(n, n)), "gamma + I")?;
        Ok(QExponent {
            data: f.inverse() * lit::<T>(2.0),
        })
    }

    /// Mean photon number Tr(γ - I)/4 of a zero-mean state.
    pub fn mean_photon_number(&self) -> T {
        (self.data.trace() - crate::scalar::from_usize::<T>(self.data.nrows())) * lit(0.25)
    }
}

/// Positive-definite exponent matrix Γ of a Gaussian Husimi function.
#[derive(Debug, Clone, PartialEq)]
pub struct QExponent<T: Real> {
    data: DMatrix<T>,
}

impl<T: Real> QExponent<T> {
    pub fn new(data: DMatrix<T>) -> Result<Self> {
        check_symmetric(&data)?;
        SpdFactor::new(&data, "Q exponent")?;
        Ok(Self {
            data: symmetrize(&data),
        })
    }

    pub(crate) fn from_trusted(data: DMatrix<T>) -> Self {
        Self {
            data: symmetrize(&data),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn log_det(&self) -> Result<T> {
        Ok(SpdFactor::new(&self.data, "Q exponent")?.log_det())
    }

    /// γ = 2Γ⁻¹ - I.
    pub fn to_covariance(&self) -> Result<CovMatrix<T>> {
        let n = self.data.nrows();
        let inv = SpdFactor::new(&self.data, "Q exponent")?.inverse();
        CovMatrix::new(inv * lit::<T>(2.0) - DMatrix::identity(n, n))
    }

    /// Sub-block over the listed modes.
    pub fn reduced(&self, modes: &[usize]) -> Self {
        Self {
            data: submatrix(&self.data, &mode_indices(modes)),
        }
    }

    /// Normalised Gaussian density √det Γ / π^N · exp(-(r-m)ᵀ Γ (r-m)).
    pub fn density(&self, r: &DVector<T>, mean: &DVector<T>) -> Result<T> {
        let dr = r - mean;
        let q = dr.dot(&(&self.data * &dr));
        let n = self.n_modes() as i32;
        Ok(((self.log_det()? * lit(0.5)) - q).exp() / T::pi().powi(n))
    }
}

/// Real/imaginary parts [Re z₁, Im z₁, …] of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPhaseVector<T: Real>(pub DVector<T>);

impl<T: Real> RealPhaseVector<T> {
    pub fn from_complex(z: &[Complex<T>]) -> Self {
        Self(DVector::from_iterator(
            2 * z.len(),
            z.iter().flat_map(|c| [c.re, c.im]),
        ))
    }

    pub fn single(z: Complex<T>) -> Self {
        Self::from_complex(&[z])
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self(DVector::zeros(2 * n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.0.len() / 2
    }

    pub fn mode(&self, k: usize) -> Complex<T> {
        Complex::new(self.0[2 * k], self.0[2 * k + 1])
    }

    pub fn as_vector(&self) -> &DVector<T> {
        &self.0
    }
}

/// Complex conjugation Υ = diag(1, -1) acting on [Re z, Im z].
pub fn conjugation<T: Real>() -> DMatrix<T> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![T::one(), -T::one()]))
}

/// Gaussian channel γ ↦ S γ Sᵀ + G.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform<T: Real> {
    pub s: DMatrix<T>,
    pub g: DMatrix<T>,
}

impl<T: Real> SymplecticTransform<T> {
    pub fn identity(n_modes: usize) -> Self {
        let n = 2 * n_modes;
        Self {
            s: DMatrix::identity(n, n),
            g: DMatrix::zeros(n, n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    /// Channel applying `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            s: &next.s * &self.s,
            g: &next.s * &self.g * next.s.transpose() + &next.g,
        }
    }

    /// Deviation ‖SᵀΩS - Ω‖_max of the linear part from being symplectic.
    pub fn symplectic_defect(&self) -> T {
        let omega = symplectic_form::<T>(self.n_modes());
        (self.s.transpose() * &omega * &self.s - omega).amax()
    }

    /// Pure loss with transmittance η on the listed modes.
    pub fn loss(n_modes: usize, eta: T, modes: &[usize]) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(domain("eta", to_f64(eta), "0 <= eta <= 1"));
        }
        let mut t = Self::identity(n_modes);
        for i in mode_indices(modes) {
            if i >= 2 * n_modes {
                return Err(Error::Shape(format!("mode index {} out of range", i / 2)));
            }
            t.s[(i, i)] = eta.sqrt();
            t.g[(i, i)] = T::one() - eta;
        }
        Ok(t)
    }
}

/// Sign of the reflected amplitude in the beam-splitter matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// (x_j, x_k) ↦ (√T x_j + √R x_k, -√R x_j + √T x_k).
    #[default]
    Forward,
    /// Reflected amplitudes carry the opposite sign.
    Reversed,
}

/// Beam splitter with intensity transmittance T on the mode pair (j, k),
/// acting identically on x and p.
pub fn beamsplitter<T: Real>(
    t: T,
    n_modes: usize,
    pair: (usize, usize),
) -> Result<SymplecticTransform<T>> {
    beamsplitter_oriented(t, n_modes, pair, Orientation::Forward)
}

pub fn beamsplitter_oriented<T: Real>(
    t: T,
    n_modes: usize,
    (j, k): (usize, usize),
    orientation: Orientation,
) -> Result<SymplecticTransform<T>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(domain("transmittance", to_f64(t), "0 <= T <= 1"));
    }
    if j == k || j >= n_modes || k >= n_modes {
        return Err(Error::Shape(format!(
            "invalid beam-splitter pair ({j}, {k}) on {n_modes} modes"
        )));
    }
    let amp_t = t.sqrt();
    let amp_r = match orientation {
        Orientation::Forward => (T::one() - t).sqrt(),
        Orientation::Reversed => -(T::one() - t).sqrt(),
    };
    let mut out = SymplecticTransform::identity(n_modes);
    for q in 0..2 {
        let (a, c) = (2 * j + q, 2 * k + q);
        out.s[(a, a)] = amp_t;
        out.s[(a, c)] = amp_r;
        out.s[(c, a)] = -amp_r;
        out.s[(c, c)] = amp_t;
    }
    Ok(out)
}

/// Two-mode squeezed vacuum Σ λⁿ|n,n⟩ with λ = tanh r.
pub fn tmsv_covariance<T: Real>(lambda: T) -> Result<CovMatrix<T>> {
    if !(lambda.abs() < T::one()) {
        return Err(domain("lambda", to_f64(lambda), "|lambda| < 1"));
    }
    // cosh 2r = (1+λ²)/(1-λ²), sinh 2r = 2λ/(1-λ²)
    let den = T::one() - lambda * lambda;
    let c = (T::one() + lambda * lambda) / den;
    let s = lit::<T>(2.0) * lambda / den;
    let z = T::zero();
    CovMatrix::new(DMatrix::from_row_slice(
        4,
        4,
        &[c, z, s, z, z, c, z, -s, s, z, c, z, z, -s, z, c],
    ))
}

/// Loss η on the listed modes: η γ + (1 - η) I there, identity elsewhere.
pub fn lossy_mix<T: Real>(gamma: &CovMatrix<T>, eta: T, modes: &[usize]) -> Result<CovMatrix<T>> {
    gamma.transform(&SymplecticTransform::loss(gamma.n_modes(), eta, modes)?)
}

/// Four-mode (A, B, C, D) covariance just before the on-off detectors on C, D.
pub fn build_effective_cov<T: Real>(params: &AmplifierParams<T>) -> Result<CovMatrix<T>> {
    build_effective_cov_oriented(params, Orientation::Forward)
}

/// As [`build_effective_cov`], with the sign convention of the (B, D)
/// splitter chosen explicitly. Only matching conventions on both pairs give
/// λ_eff = Tλ + Rμ; `Reversed` yields Tλ - Rμ.
pub fn build_effective_cov_oriented<T: Real>(
    params: &AmplifierParams<T>,
    orientation: Orientation,
) -> Result<CovMatrix<T>> {
    params.validate()?;
    let ab = lossy_mix(&tmsv_covariance(params.lambda)?, params.eta_ab, &[0, 1])?;
    let cd = lossy_mix(&tmsv_covariance(params.mu)?, params.eta_cd, &[0, 1])?;
    let bs = beamsplitter(params.transmittance, 4, (0, 2))?.then(
        &beamsplitter_oriented(params.transmittance, 4, (1, 3), orientation)?,
    );
    let detection = SymplecticTransform::loss(4, params.eta_apd, &[2, 3])?;
    let gamma = ab.direct_sum(&cd).transform(&bs.then(&detection))?;
    gamma.check_physical()?;
    Ok(gamma)
}

/// Squeezing λ of the (A, B) state heralded by vacuum in both C and D.
///
/// With pure inputs that state is exactly a two-mode squeezed vacuum with
/// λ_eff = Tλ + Rμ, which pins the beam-splitter sign convention.
pub fn vacuum_heralded_lambda<T: Real>(
    params: &AmplifierParams<T>,
    orientation: Orientation,
) -> Result<T> {
    let gamma = build_effective_cov_oriented(params, orientation)?;
    let ab = gamma.q_exponent()?.reduced(&[0, 1]).to_covariance()?;
    let m = ab.matrix();
    // λ = sinh 2r / (1 + cosh 2r) from the x_A x_B correlation.
    Ok(m[(0, 2)] / (T::one() + m[(0, 0)]))
}

/// Output of projecting one mode of a two-mode Gaussian Q function onto a
/// re-normalised coherent state, optionally integrated over a Gaussian
/// acceptance window with corrective displacement.
///
/// For input amplitude d the unnormalised output is
/// `weight(d) · √det Γ_out / π · exp(-(r - D d)ᵀ Γ_out (r - D d))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedGaussian<T: Real> {
    pub exponent: QExponent<T>,
    /// Displacement map D.
    pub map: DMatrix<T>,
    /// Quadratic form Γ̃_A governing the amplitude dependence of the weight.
    pub amplitude_form: DMatrix<T>,
    /// ln weight(0).
    pub log_scale: T,
}

impl<T: Real> ConditionedGaussian<T> {
    pub fn log_weight(&self, d: &RealPhaseVector<T>) -> T {
        let v = d.as_vector();
        self.log_scale - v.dot(&(&self.amplitude_form * v))
    }

    pub fn weight(&self, d: &RealPhaseVector<T>) -> T {
        self.log_weight(d).exp()
    }

    pub fn mean(&self, d: &RealPhaseVector<T>) -> DVector<T> {
        &self.map * d.as_vector()
    }
}

struct Blocks<T: Real> {
    a: DMatrix<T>,
    m: DMatrix<T>,
    b: DMatrix<T>,
}

fn split_blocks<T: Real>(gamma: &QExponent<T>, projected_mode: usize) -> Result<Blocks<T>> {
    if gamma.n_modes() != 2 || projected_mode > 1 {
        return Err(Error::Shape(format!(
            "conditioning needs a two-mode exponent and mode 0 or 1, got {} modes / mode {}",
            gamma.n_modes(),
            projected_mode
        )));
    }
    let order = if projected_mode == 0 { [0, 1] } else { [1, 0] };
    let g = submatrix(gamma.matrix(), &mode_indices(&order));
    Ok(Blocks {
        a: g.view((0, 0), (2, 2)).into_owned(),
        m: g.view((0, 2), (2, 2)).into_owned(),
        b: g.view((2, 2), (2, 2)).into_owned(),
    })
}

/// Conditions on the dual-homodyne outcome β = 0: the projected mode is
/// matched against (1/√π)|d*⟩ where d is the teleported amplitude.
///
/// The returned weight is the probability density of the outcome.
pub fn gauss_condition<T: Real>(
    gamma: &QExponent<T>,
    projected_mode: usize,
) -> Result<ConditionedGaussian<T>> {
    let Blocks { a, m, b } = split_blocks(gamma, projected_mode)?;
    let ups = conjugation::<T>();
    let fb = SpdFactor::new(&b, "Gamma_B")?;
    let mt_u = m.transpose() * &ups;
    let b_inv_mt_u = fb.solve(&mt_u);
    let amplitude_form = symmetrize(&(&ups * &a * &ups - mt_u.transpose() * &b_inv_mt_u));
    let map = -b_inv_mt_u;
    let log_scale = (gamma.log_det()? - fb.log_det()) * lit(0.5) - T::pi().ln();
    Ok(ConditionedGaussian {
        exponent: QExponent::from_trusted(b),
        map,
        amplitude_form,
        log_scale,
    })
}

/// Integrates the conditioned output over outcomes β weighted by
/// exp(-|β|²/σ²), after displacing the output by -kβ.
///
/// The weight of the result is the acceptance probability (density already
/// integrated over β).
pub fn gauss_window<T: Real>(
    gamma: &QExponent<T>,
    projected_mode: usize,
    sigma: T,
    k: T,
) -> Result<ConditionedGaussian<T>> {
    if !(sigma > T::zero()) {
        return Err(domain("sigma", to_f64(sigma), "sigma > 0"));
    }
    let Blocks { a, m, b } = split_blocks(gamma, projected_mode)?;
    let ups = conjugation::<T>();
    let ua_u = &ups * &a * &ups;
    let um = &ups * &m;
    let mt_u = m.transpose() * &ups;
    let window = DMatrix::identity(2, 2) / (sigma * sigma);

    let gamma_beta = &b * (k * k) + &ua_u + window + (&um + &mt_u) * k;
    let f_beta = SpdFactor::new(&gamma_beta, "Gamma_beta").map_err(|e| match e {
        Error::NotPositiveDefinite => Error::WindowDivergence,
        other => other,
    })?;
    let l_alpha = &ua_u + &mt_u * k;
    let l_r = &um + &b * k;

    let gb_inv_lr = f_beta.solve(&l_r);
    let gb_inv_la = f_beta.solve(&l_alpha);
    let gamma_b = symmetrize(&(&b - l_r.transpose() * &gb_inv_lr));
    let f_b = SpdFactor::new(&gamma_b, "windowed Gamma_B").map_err(|e| match e {
        Error::NotPositiveDefinite => Error::WindowDivergence,
        other => other,
    })?;
    // cross = MᵀΥ - L_rᵀ Γ_β⁻¹ L_α
    let cross = &mt_u - l_r.transpose() * &gb_inv_la;
    let b_inv_cross = f_b.solve(&cross);
    let amplitude_form = symmetrize(
        &(&ua_u - l_alpha.transpose() * &gb_inv_la - cross.transpose() * &b_inv_cross),
    );
    let map = -b_inv_cross;
    let log_scale = (gamma.log_det()? - f_b.log_det() - f_beta.log_det()) * lit(0.5);
    Ok(ConditionedGaussian {
        exponent: QExponent::from_trusted(gamma_b),
        map,
        amplitude_form,
        log_scale,
    })
}
