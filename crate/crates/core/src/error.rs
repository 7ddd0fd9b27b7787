//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two grids that must be compatible (same horizon, ordered levels) are not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A precondition that is checked by sampling (monotonicity, sign
    /// constraints) was found violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    /// Carries the best estimate and its error estimate.
    #[error("quadrature tolerance not met: estimate {estimate}, error {error_estimate}")]
    ToleranceNotMet { estimate: f64, error_estimate: f64 },

    /// An integrand or Monte Carlo functional returned NaN/Inf.
    #[error("non-finite evaluation: {0}")]
    NonFinite(String),

    /// The requested model does not support the operation (e.g. no exact
    /// solution available for error-curve estimation).
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Unknown model name in the registry.
    #[error("unknown model {0:?} (known: bsp1, ex2b, series3, ex3)")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
