//! Worked examples of forced, contact and hybrid mechanics, each with a
//! default run, reference solutions and the checks it must pass.

mod acceptance;
mod check;
mod config;
mod contact;
mod error;
mod hamjac;
mod impacts;
mod mechanical;
pub mod properties;
mod registry;
mod support;

pub use acceptance::{acceptance_criteria, Criterion};
pub use check::{Check, CheckKind, ScenarioReport};
pub use config::{IntegratorKind, Overrides, RunConfig};
pub use error::{Result, ScenarioError};
pub use registry::{lookup, registry, Run, Scenario};
pub use mech_hybrid::EventRecord;
