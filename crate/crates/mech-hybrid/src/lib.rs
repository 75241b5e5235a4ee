//! Hybrid systems: continuous flows interrupted by impacts on guard
//! surfaces. Event location by bisection, Newton restitution maps, Zeno
//! safeguards, impulsive-constraint projectors, Carnot accounting and the
//! worked impact examples (rolling disk, billiard, nonholonomic particle,
//! rolling sphere and cylinder).

mod billiard;
mod constants;
mod disk;
mod error;
mod guard;
mod impulsive;
mod nonholonomic;
mod simulate;

pub use billiard::{billiard_impact, billiard_jump_conditions, dissipative_billiard, BilliardJump};
pub use constants::{hybrid_constant_check, HybridConstantReport};
pub use disk::{action_angle_impact_relations, disk_action_angle, disk_between_walls, disk_wall_impact, AngleRelations, DiskParams};
pub use error::{HybridError, Result};
pub use guard::{newton_impact_map, Guard, HybridSystem, ImpactForm, ImpactMap, ZenoConfig};
pub use impulsive::{
    carnot_energy_change, cylinder_constraint_rows, cylinder_jump_closed_form, cylinder_metric, cylinder_restitution_jump,
    impulsive_projector, restitution_map, sphere_constraint_rows, sphere_jump_velocities, sphere_metric, sphere_projector_closed_form,
    CarnotReport, CylinderParams,
};
pub use nonholonomic::{
    nonholonomic_closed_form, nonholonomic_initial_state, nonholonomic_particle_sim, nonholonomic_system, NonholonomicParams,
    NonholonomicReport, WallUpdate,
};
pub use simulate::{hybrid_integrate, EventRecord, HybridEvent, HybridTrajectory};
