//! Teleportation-based noiseless amplification of coherent states.
//!
//! Three models of the same protocol:
//!
//! * [`pure`] — closed forms for ideal resources (Ĝ-modified squeezed
//!   vacuum, photon-subtraction engineering, truncated Ĝ_N).
//! * [`phase_space`] — lossy sources and on-off detectors, with the heralded
//!   resource written as a signed mixture of Gaussian Husimi functions.
//! * [`fock`] — brute-force truncated Fock space, used as an oracle for the
//!   other two.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below fix the scalar for callers that do not care.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod params;
pub mod phase_space;
pub mod pure;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use fock::{Detector, FockMix, FockVec};
pub use gaussian::{CovMatrix, Orientation, QExponent, RealPhaseVector, SymplecticTransform};
pub use params::{AmplifierParams, FidelityTarget, Metrics};
pub use phase_space::{GaussMixQ, GaussTerm, ResourceQ, WindowedQ};
pub use pure::{EngineeredResource, TruncatedAmplifier};
pub use scalar::Real;

pub type CovMatrixF64 = CovMatrix<f64>;
pub type QExponentF64 = QExponent<f64>;
pub type AmplifierParamsF64 = AmplifierParams<f64>;
pub type MetricsF64 = Metrics<f64>;
pub type GaussMixQF64 = GaussMixQ<f64>;
pub type FockVecF64 = FockVec<f64>;
pub type FockMixF64 = FockMix<f64>;

pub type CovMatrixF32 = CovMatrix<f32>;
pub type AmplifierParamsF32 = AmplifierParams<f32>;
pub type MetricsF32 = Metrics<f32>;
