use mech_core::MechError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarintError {
    #[error(transparent)]
    Core(#[from] MechError),
    #[error("step size must be positive, got {0}")]
    InvalidStep(f64),
    #[error("oscillator is not underdamped: 4km − r² = {0}")]
    NotUnderdamped(f64),
    #[error("sin(bh) vanishes: the step hits a half period")]
    Resonant,
    #[error("Rayleigh function depends on configuration: |∂R/∂q| = {0:e} at a probe")]
    ConfigurationDependent(f64),
    #[error("Newton solve did not converge after {iterations} iterations (residual {residual:e})")]
    Newton { iterations: usize, residual: f64 },
    #[error("expected vectors of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, VarintError>;
