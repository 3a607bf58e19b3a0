use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid function description: {0}")]
    InvalidFunction(String),

    #[error("coefficient is not strictly positive (certified minimum {minimum:e})")]
    NonPositiveCoefficient { minimum: f64 },

    #[error("invalid scale eps = {eps}: {reason}")]
    InvalidScale { eps: f64, reason: String },

    #[error("averaging window around x = {x} with eps = {eps} leaves [0, 1]")]
    WindowOutOfDomain { x: f64, eps: f64 },

    #[error("tridiagonal system is singular at row {row}")]
    SingularSystem { row: usize },

    #[error("rate fit needs at least 3 points with positive error, got {positive}")]
    DegenerateFit { positive: usize },

    #[error("coefficient has no closed-form derivative (piecewise profiles cannot drive the SDE)")]
    NonDifferentiable,

    #[error("time step dt = {dt:e} exceeds the stability limit eps^2/10 = {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bootstrap hypothesis fails at grid index {index} (x = {x}): phi = {phi:e} > delta + heat = {rhs:e}")]
    HypothesisViolated { index: usize, x: f64, phi: f64, rhs: f64 },

    #[error("instance with eps = {eps} failed: {source}")]
    Instance {
        eps: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
