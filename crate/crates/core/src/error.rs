use thiserror::Error;

/// Errors raised by the geometry toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("norm is not smooth at the zero vector")]
    NormNotSmoothAtZero,
    #[error("fundamental tensor is not positive definite (min eigenvalue {0:e})")]
    StrongConvexityViolated(f64),
    #[error("invalid norm parameters: {0}")]
    InvalidNorm(String),
    #[error("path left the chart domain at ({0}, {1})")]
    ChartExit(f64, f64),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("boundary value problem did not converge: {0}")]
    BvpNoConvergence(String),
    #[error("degenerate flag (denominator {0:e})")]
    DegenerateFlag(f64),
    #[error("profile vanishes at t = {0}")]
    ProfileVanishes(f64),
    #[error("f' has more than one zero in the truncation range ({0} and {1})")]
    RhoNotUnique(f64, f64),
    #[error("truncation radius too short: {0}")]
    TruncationTooShort(String),
    #[error("no comparison triangle realizes the given sides")]
    NoComparisonTriangle,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("difference quotient limit not resolved (spread {0:e})")]
    LimitNotResolved(f64),
    #[error("hypotheses failed: {}", .0.join("; "))]
    HypothesisFailed(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
