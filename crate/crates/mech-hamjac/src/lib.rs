//! Hamilton–Jacobi verification for forced and time-dependent contact
//! systems: residuals of the HJ equations, γ-relatedness of projected and
//! full flows, invariants recovered from complete solutions, and the
//! forced discrete HJ check on the midpoint damped oscillator.

mod complete;
mod discrete;
mod error;
mod numeric;
mod residual;
mod section;

pub use complete::{complete_solution_invariants, CompleteSolution, FiberKind};
pub use discrete::{discrete_hj_check, DiscreteHjReport, MidpointOscillator};
pub use error::{HamJacError, Result};
pub use numeric::{deriv4, gauss_legendre};
pub use residual::{gamma_related_check, hj_residual_contact_time, hj_residual_forced, GammaRelated};
pub use section::SectionGamma;
