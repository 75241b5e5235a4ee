//! Fixed-step classical Runge–Kutta integration and trajectory recording.

mod error;
mod rk4;
mod trajectory;

pub use error::{IntegratorError, Result};
pub use rk4::{integrate, integrate_field, reference_solve, rk4_step, FnField, VectorField};
pub use trajectory::{Trajectory, TrajectoryMeta};
