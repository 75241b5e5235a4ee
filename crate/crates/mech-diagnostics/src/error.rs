use mech_core::MechError;
use mech_integrators::IntegratorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Core(#[from] MechError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error("preconditions failed: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("point ({0}, {1}, {2}) lies outside the chart domain")]
    OutsideChart(f64, f64, f64),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;
