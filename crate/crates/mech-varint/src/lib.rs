//! Forced discrete mechanics: discrete Lagrangians with discrete forces,
//! forced discrete Euler–Lagrange stepping, discrete Legendre transforms and
//! the discrete Noether and Rayleigh-potential checks.
//!
//! Sign convention: the discrete force is `f⁻ dq₀ + f⁺ dq₁`, and the forced
//! discrete Euler–Lagrange equations read
//! `D₂L_d(q₀,q₁) + D₁L_d(q₁,q₂) + f⁺(q₀,q₁) + f⁻(q₁,q₂) = 0`.
//! A midpoint discretization of a continuous force `−∂R/∂v` therefore
//! carries `f± = −(h/2) ∂R/∂v`.

mod checks;
mod error;
mod exact;
mod lagrangian;
mod midpoint;
mod solve;

pub use checks::{discrete_noether_check, rayleighable_check, NoetherReport, RayleighCheck};
pub use error::{Result, VarintError};
pub use exact::exact_discrete_damped_oscillator;
pub use lagrangian::{DiscreteLagrangian, DiscreteRayleigh, LdFn, PairFn};
pub use midpoint::{midpoint_discretize, midpoint_from_lagrangian, midpoint_rayleigh};
pub use solve::{
    del_residual, del_step, del_trajectory, discrete_hamiltonian_flow, discrete_legendre,
    initial_second_point, DelStep, NEWTON_MAX_ITER, NEWTON_TOL, NEWTON_TOL_FD,
};
