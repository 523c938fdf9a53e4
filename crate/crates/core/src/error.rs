use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gradient norm {norm:e} is at or below the zero tolerance {tol:e}")]
    ZeroGradient { norm: f64, tol: f64 },
    #[error("value {value:e} lies below the optimal value {floor:e}")]
    NegativeGap { value: f64, floor: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite iterate or divergence at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("value {value:e} observed below the lower-bound estimate {h_hat:e} in epoch {epoch}")]
    InvalidLowerBound { value: f64, h_hat: f64, epoch: usize },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("every eigenvalue of the Hessian is below the null tolerance")]
    AllNull,
    #[error("null space is empty")]
    EmptyNullSpace,
    #[error("trace does not carry projected-gradient values")]
    MissingG,
    #[error("objective has no known minimizer")]
    NoMinimizer,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
