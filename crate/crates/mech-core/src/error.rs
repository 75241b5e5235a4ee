use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state has no action variable z")]
    MissingZ,
    #[error("state layout has no time coordinate")]
    MissingTime,
    #[error("operation needs a {expected} system, got {got}")]
    WrongFlavor { expected: &'static str, got: &'static str },
    #[error("singular Hessian (condition estimate {cond:e})")]
    SingularHessian { cond: f64 },
    #[error("metric is not symmetric positive-definite")]
    NonSpdMetric,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, MechError>;
