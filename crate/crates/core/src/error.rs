use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter lies outside its physical domain.
    #[error("domain error: {name} = {value} ({constraint})")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// Inversion refused because the matrix is too close to singular.
    #[error("ill-conditioned matrix in {context}: condition number {condition:e} exceeds {limit:e}")]
    Conditioning {
        context: &'static str,
        condition: f64,
        limit: f64,
    },

    #[error("covariance matrix is unphysical: smallest symplectic eigenvalue {min_eigenvalue}")]
    Unphysical { min_eigenvalue: f64 },

    /// Fock-space truncation is too small for the requested state.
    #[error("truncation inadequate: {0}")]
    Truncation(String),

    /// Denominator of the nominal gain vanishes, the gain diverges.
    #[error("gain pole: (R*lambda + T*mu)(R*mu + T*lambda) = {denominator:e}")]
    GainPole { denominator: f64 },

    /// The Gaussian acceptance-window integral does not converge.
    #[error("acceptance window diverges: integration matrix is not positive definite")]
    WindowDivergence,

    #[error("non-positive probability {value:e} in {context}")]
    NonPositiveProbability { context: &'static str, value: f64 },

    #[error("state has zero total weight")]
    ZeroWeight,

    #[error("quadrature grid rejected: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, constraint: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        constraint,
    }
}
