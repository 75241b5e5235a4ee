use mech_core::MechError;
use mech_integrators::IntegratorError;
use mech_varint::VarintError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HamJacError {
    #[error(transparent)]
    Core(#[from] MechError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Varint(#[from] VarintError),
    #[error("section is not closed: asymmetry {0:e} at a probe")]
    NotClosed(f64),
    #[error("projected trajectory left the section's domain at t = {0}")]
    LeftDomain(f64),
    #[error("fiber inversion failed at t = {t} (residual {residual:e})")]
    Inversion { t: f64, residual: f64 },
    #[error("complete solution has {params} parameters but fixes {equations} coordinates")]
    ParameterCount { params: usize, equations: usize },
}

pub type Result<T> = std::result::Result<T, HamJacError>;
