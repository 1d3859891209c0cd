use thiserror::Error;

use crate::params::ValidityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rate a{index} is not finite ({value})")]
    NonFiniteRate { index: usize, value: f64 },

    #[error("parameters violate: {0}")]
    InvalidParameters(ValidityReport),

    #[error("point is not on the simplex: {0}")]
    NotOnSimplex(String),

    /// The operator produced a coordinate below the round-off band, which
    /// only happens if invalid parameters reached the evaluation.
    #[error("image left the simplex: x{coordinate} = {value:e}")]
    LeftSimplex { coordinate: usize, value: f64 },

    #[error("tensor invariant violated: {0}")]
    TensorInvariant(String),

    #[error("iteration aborted at step {step}: {source}")]
    RunAborted { step: u64, source: Box<Error> },

    #[error("degenerate equation: all coefficients vanish")]
    DegenerateEquation,

    #[error("point is not a fixed point (residual {residual:e} exceeds {limit:e})")]
    NotAFixedPoint { residual: f64, limit: f64 },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    EigenFailure { sweeps: usize },

    #[error("hypothesis not satisfied: {0}")]
    HypothesisViolated(String),

    #[error("parameter sampling gave up after {rejections} rejections")]
    SamplingFailed { rejections: u64 },

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
