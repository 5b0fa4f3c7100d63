use thiserror::Error;

/// Errors raised by model construction, solvers, and checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model parameter violates its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The tail integral of the distorted survival function does not converge.
    #[error("divergent tail integral: {0}")]
    Divergence(String),
    /// The requested computation is not defined for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The change-loss solver requires `sup_k theta*_k <= L`.
    #[error("change-loss assumption violated: sup theta* = {sup_theta_star} > L = {lower_support}")]
    AssumptionViolated { sup_theta_star: f64, lower_support: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
