use mech_core::MechError;
use thiserror::Error;

use crate::trajectory::Trajectory;

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error(transparent)]
    Core(#[from] MechError),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("end time {t_end} is not after start time {t0}")]
    InvalidSpan { t0: f64, t_end: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("integration aborted at t = {}: {reason}", partial.final_state().t)]
    Aborted { reason: Box<IntegratorError>, partial: Box<Trajectory> },
    #[error("step halving did not converge: disagreement {gap:e} at dt = {dt:e}")]
    NoConvergence { dt: f64, gap: f64 },
}

impl IntegratorError {
    /// The trajectory recorded before an abort, if any.
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            IntegratorError::Aborted { partial, .. } => Some(partial),
            _ => None,
        }
    }

    /// The underlying failure, looking through an abort.
    pub fn root(&self) -> &IntegratorError {
        match self {
            IntegratorError::Aborted { reason, .. } => reason.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, IntegratorError>;
