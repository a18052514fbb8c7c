//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar or structural parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two point samples drawn over different regions were combined.
    #[error("region mismatch: {0}")]
    RegionMismatch(String),

    /// More nulling/cancelation constraints than spatial dimensions.
    #[error("not enough degrees of freedom: {0}")]
    DegreesOfFreedom(String),

    /// Constraint rows are numerically rank deficient.
    #[error("ill-conditioned constraints: {0}")]
    IllConditioned(String),

    /// A projection collapsed to (numerically) zero.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The scenario cannot satisfy its outage constraints at any intensity.
    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    /// The path-loss model diverges (alpha too close to 2).
    #[error("divergent interference field: {0}")]
    Divergent(String),

    /// A Monte Carlo trial aborted.
    #[error("trial {trial} failed: {message}")]
    Trial { trial: u64, message: String },

    /// The intensity search observed estimates inconsistent with monotone
    /// outage beyond what the confidence intervals allow.
    #[error("non-monotone outage estimates: {0}")]
    NonMonotone(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
