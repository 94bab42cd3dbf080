//! Random limit normal distribution: a normal-like family whose scale
//! depends on the evaluation point through a modulation function `h(y)`.
//!
//! The crate provides the distribution itself (CDF, density, quantile,
//! sampling, moments), mechanical validity checks including a heat-equation
//! oracle, Pearson chi-square goodness-of-fit machinery for return series,
//! parameter estimation, and price-series ingestion. The `rlnd` binary ties
//! the pipeline together.

pub mod cli;
pub mod dist;
pub mod fitting;
pub mod gof;
pub mod ingest;
pub mod numerics;
pub mod validity;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: error estimate {error:e} after {subdivisions} subdivisions (tolerance {tolerance:e})")]
    QuadratureNonConvergence {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("probability {prob} outside the achievable range ({lo}, {hi})")]
    OutOfRange { prob: f64, lo: f64, hi: f64 },

    #[error("empty data")]
    EmptyData,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unstable numerical scheme: error estimate {estimate:e} exceeds {limit:e}")]
    Unstable { estimate: f64, limit: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
