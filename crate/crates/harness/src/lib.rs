//! Command-line harness around `teleamp-core`: TOML run configs, α sweeps
//! to CSV, μ calibration, the validation registry and figure datasets.

pub mod config;
pub mod error;
pub mod figures;
pub mod models;
pub mod roots;
pub mod solve;
pub mod sweep;
pub mod validate;
