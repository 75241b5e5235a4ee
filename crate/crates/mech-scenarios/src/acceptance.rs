//! The acceptance criteria, each assembled from scenario checks.

use serde::Serialize;

use crate::check::{Check, CheckKind};
use crate::config::Overrides;
use crate::properties::property_checks;
use crate::registry::lookup;

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Criterion {
    fn new(number: usize, title: &'static str, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self { number, title, checks, pass }
    }

    /// Worst failing check, for the one-line summary.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Checks of a scenario run with overrides; a failure to run becomes a
/// failing check.
fn scenario(id: &str, o: &Overrides, keep: impl Fn(&Check) -> bool) -> Vec<Check> {
    let run = lookup(id).and_then(|s| {
        let cfg = s.resolve(o)?;
        s.checks(&cfg)
    });
    match run {
        Ok(checks) => checks.into_iter().filter(|c| keep(c)).map(|mut c| {
            c.name = format!("{id}: {}", c.name);
            c
        }).collect(),
        Err(e) => vec![Check::flag(format!("{id}: {e}"), CheckKind::Report, false)],
    }
}

fn all(_: &Check) -> bool {
    true
}

pub fn acceptance_criteria() -> Vec<Criterion> {
    let none = Overrides::default();
    let inelastic = Overrides { e: Some(0.5), t_end: Some(4.0), ..Overrides::default() };
    let mut disk = scenario("disk_between_walls", &none, all);
    disk.extend(scenario("disk_between_walls", &inelastic, all));
    let props = property_checks(0).unwrap_or_else(|e| vec![Check::flag(format!("properties: {e}"), CheckKind::Report, false)]);
    vec![
        Criterion::new(1, "exact discrete damped oscillator matches the closed form", scenario("damped_oscillator", &none, all)),
        Criterion::new(
            2,
            "free particle with time-dependent mass matches the closed form",
            scenario("free_particle_tmass", &none, |c| c.kind != CheckKind::HjResidual),
        ),
        Criterion::new(3, "forced Hamilton-Jacobi family solves the equation", scenario("hj_forced_family", &none, all)),
        Criterion::new(
            4,
            "action-dependent Hamilton-Jacobi solution for the free particle",
            scenario("free_particle_tmass", &none, |c| c.kind == CheckKind::HjResidual),
        ),
        Criterion::new(5, "dissipative billiard keeps its hybrid invariants", scenario("dissipative_billiard", &none, all)),
        Criterion::new(6, "rolling disk hybrid constants, elastic and inelastic", disk),
        Criterion::new(7, "Carnot energy balance at restitution events", scenario("carnot_restitution", &none, all)),
        Criterion::new(8, "rolling sphere impulsive projector", scenario("rolling_sphere_jump", &none, all)),
        Criterion::new(9, "nonholonomic particle between walls", scenario("nonholonomic_particle_walls", &none, all)),
        Criterion::new(10, "double well energy behaviour under each integrator", scenario("double_well_rayleigh", &none, all)),
        Criterion::new(11, "discrete forced Noether momentum", scenario("rotational_noether", &none, all)),
        Criterion::new(12, "bracket, gradient and impact map properties", props),
    ]
}
