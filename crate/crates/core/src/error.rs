use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined
    /// (for instance `k = 0` for a multiplier).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates its declared invariant.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("format error: {0}")]
    Format(String),

    /// The weighted spectral sum does not decay fast enough to be trusted.
    #[error("divergent weighted sum: {0}")]
    Divergence(String),

    /// The truncated grid cannot hold the convolution support of a profile.
    #[error("grid too small: {0}")]
    Truncation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Quantity is undefined for the given input (e.g. a ratio with zero denominator).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("time step rejected: {0}")]
    StepRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
