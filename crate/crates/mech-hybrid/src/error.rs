use mech_core::MechError;
use mech_integrators::IntegratorError;
use thiserror::Error;

use crate::simulate::HybridTrajectory;

#[derive(Debug, Error)]
pub enum HybridError {
    #[error(transparent)]
    Core(#[from] MechError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error("guards and impact maps differ in number: {guards} vs {impacts}")]
    Mismatch { guards: usize, impacts: usize },
    #[error("coefficient of restitution must lie in [0, 1], got {0}")]
    Restitution(f64),
    #[error("constraint gradient vanishes at the impact point")]
    ZeroGradient,
    #[error("guard '{guard}' is not regular at t = {t}: |dh| = {grad:e}")]
    SingularGuard { guard: String, t: f64, grad: f64 },
    #[error("state is off the switching surface: {0}")]
    OffSurface(String),
    #[error("state left the admissible domain at t = {t}: guard '{guard}' = {value:e}")]
    EscapedDomain { guard: String, t: f64, value: f64 },
    #[error("event location failed at t = {t}")]
    EventLocation { t: f64 },
    #[error("Zeno safeguard: {reason} after {events} events at t = {t}")]
    Zeno { reason: String, events: usize, t: f64, partial: Box<HybridTrajectory> },
    #[error("constraint matrix is rank deficient (condition {0:e})")]
    RankDeficient(f64),
    #[error("restitution parameter α = −1 makes the Carnot ratio singular")]
    DegenerateCarnot,
    #[error("parameter out of range: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, HybridError>;
