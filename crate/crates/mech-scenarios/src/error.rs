use mech_core::MechError;
use mech_diagnostics::DiagnosticsError;
use mech_hamjac::HamJacError;
use mech_hybrid::HybridError;
use mech_integrators::IntegratorError;
use mech_varint::VarintError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario '{id}'{}", .suggestion.as_ref().map(|s| format!(", did you mean '{s}'?")).unwrap_or_default())]
    Unknown { id: String, suggestion: Option<String> },
    #[error("scenario '{scenario}' does not support integrator '{integrator}'")]
    UnsupportedIntegrator { scenario: String, integrator: String },
    #[error("invalid override: {0}")]
    Override(String),
    #[error(transparent)]
    Core(#[from] MechError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Varint(#[from] VarintError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    HamJac(#[from] HamJacError),
    #[error(transparent)]
    Hybrid(#[from] HybridError),
}

impl ScenarioError {
    /// Bad input from the caller rather than a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Self::Unknown { .. } | Self::UnsupportedIntegrator { .. } | Self::Override(_))
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;
