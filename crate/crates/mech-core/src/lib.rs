//! Phase-space states, system definitions and the continuous vector fields
//! of forced, contact, cocontact and action-dependent mechanics.
//!
//! Everything is expressed in Darboux coordinates: the contact form is
//! `dz − p dq`, the Reeb field is `∂/∂z` and, for time-dependent systems,
//! the time Reeb field is `∂/∂t`. A state is stored as a flat vector in the
//! order `(t?, q, m, z?)`.

pub mod brackets;
pub mod error;
pub mod field;
pub mod state;
pub mod system;

pub use brackets::{dissipative_bracket, jacobi_bracket_contact, poisson_bracket};
pub use error::{MechError, Result};
pub use field::{fd_step, gradient_fd_mismatch, CovectorField, GradKind, Gradient, ScalarField};
pub use state::{Layout, State};
pub use system::{
    cocontact_hamiltonian_field, contact_hamiltonian_field, forced_hamiltonian_field,
    herglotz_lagrangian_field, lu_solve, mechanical_legendre, mechanical_legendre_inverse,
    mechanical_rayleigh_field, spd_inverse, Flavor, Metric, SystemDef, MAX_CONDITION,
};
