use std::time::Instant;

use mech_hybrid::{EventRecord, HybridError, HybridSystem, HybridTrajectory, ZenoConfig};
use mech_integrators::Trajectory;

use crate::check::{Check, ScenarioReport};
use crate::config::{IntegratorKind, Overrides, RunConfig};
use crate::error::{Result, ScenarioError};
use crate::{contact, hamjac, impacts, mechanical};

/// Output of a scenario run: the sampled trajectory (pre- and post-impact
/// rows adjacent) and the impact log.
#[derive(Clone, Debug)]
pub struct Run {
    pub trajectory: Trajectory,
    pub events: Vec<EventRecord>,
}

impl Run {
    pub fn smooth(trajectory: Trajectory) -> Self {
        Self { trajectory, events: Vec::new() }
    }

    pub fn hybrid(ht: &HybridTrajectory) -> Self {
        Self { trajectory: ht.flatten(), events: ht.event_records() }
    }

    /// What was computed before a run aborted, if anything.
    pub fn partial(err: &ScenarioError) -> Option<Self> {
        match err {
            ScenarioError::Hybrid(HybridError::Zeno { partial, .. }) => Some(Self::hybrid(partial)),
            ScenarioError::Integrator(e) => e.partial().map(|t| Self::smooth(t.clone())),
            _ => None,
        }
    }
}

type SimulateFn = fn(&RunConfig) -> Result<Run>;
type ChecksFn = fn(&RunConfig) -> Result<Vec<Check>>;
type CompareFn = fn(&RunConfig) -> Result<Vec<[f64; 4]>>;
type HybridFn = fn(&RunConfig) -> Result<HybridSystem>;

/// A worked example: its default run, the integrators it can be run
/// with, named parameters and the checks it must pass.
pub struct Scenario {
    pub id: &'static str,
    pub summary: &'static str,
    pub t0: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Supported integrators; the first is the default.
    pub integrators: &'static [IntegratorKind],
    /// Default coefficient of restitution, for scenarios with impacts.
    pub restitution: Option<f64>,
    pub params: &'static [(&'static str, f64)],
    pub(crate) simulate_fn: SimulateFn,
    pub(crate) checks_fn: ChecksFn,
    pub(crate) compare_fn: Option<CompareFn>,
    pub(crate) hybrid_fn: Option<HybridFn>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario").field("id", &self.id).field("params", &self.params).finish()
    }
}

fn suggest<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    candidates
        .map(|c| (strsim::levenshtein(name, c), c))
        .min()
        .filter(|(d, c)| *d <= (c.len() / 2).max(2))
        .map(|(_, c)| c.to_string())
}

impl Scenario {
    pub fn param_default(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn default_config(&self) -> RunConfig {
        self.resolve(&Overrides::default()).expect("scenario defaults are valid")
    }

    /// Applies overrides to the defaults and validates the result.
    pub fn resolve(&self, o: &Overrides) -> Result<RunConfig> {
        let bad = |m: String| Err(ScenarioError::Override(m));
        let dt = o.dt.unwrap_or(self.dt);
        if !(dt > 0.0 && dt.is_finite()) {
            return bad(format!("dt must be positive and finite, got {dt}"));
        }
        let t_end = o.t_end.unwrap_or(self.t_end);
        if !(t_end.is_finite() && t_end > self.t0) {
            return bad(format!("t_end must be finite and after the start time {}, got {t_end}", self.t0));
        }
        let integrator = o.integrator.unwrap_or(self.integrators[0]);
        if !self.integrators.contains(&integrator) {
            return Err(ScenarioError::UnsupportedIntegrator {
                scenario: self.id.into(),
                integrator: integrator.name().into(),
            });
        }
        let e = match (self.restitution, o.e) {
            (None, Some(_)) => return bad(format!("scenario '{}' has no impacts, --e does not apply", self.id)),
            (Some(_), Some(e)) if !(0.0..=1.0).contains(&e) => {
                return bad(format!("coefficient of restitution must lie in [0, 1], got {e}"))
            }
            (d, e) => e.or(d),
        };
        let mut zeno = ZenoConfig::default();
        if let Some(n) = o.max_events {
            if n == 0 {
                return bad("max_events must be at least 1".into());
            }
            zeno.max_events = n;
        }
        if let Some(g) = o.min_gap {
            if !(g >= 0.0 && g.is_finite()) {
                return bad(format!("min_gap must be non-negative and finite, got {g}"));
            }
            zeno.min_gap = g;
        }
        let mut params: std::collections::BTreeMap<String, f64> =
            self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in &o.params {
            if !params.contains_key(k) {
                let hint = suggest(k, self.params.iter().map(|(k, _)| *k))
                    .map(|s| format!(", did you mean '{s}'?"))
                    .unwrap_or_default();
                return bad(format!("scenario '{}' has no parameter '{k}'{hint}", self.id));
            }
            if !v.is_finite() {
                return bad(format!("parameter '{k}' must be finite, got {v}"));
            }
            params.insert(k.clone(), *v);
        }
        Ok(RunConfig { dt, t_end, integrator, e, zeno, seed: o.seed.unwrap_or(0), params })
    }

    pub fn simulate(&self, cfg: &RunConfig) -> Result<Run> {
        (self.simulate_fn)(cfg)
    }

    pub fn checks(&self, cfg: &RunConfig) -> Result<Vec<Check>> {
        (self.checks_fn)(cfg)
    }

    pub fn supports_compare(&self) -> bool {
        self.compare_fn.is_some()
    }

    /// Rows `(t, E_midpoint, E_rk4, E_reference)` on the midpoint grid.
    pub fn compare(&self, cfg: &RunConfig) -> Result<Vec<[f64; 4]>> {
        match self.compare_fn {
            Some(f) => f(cfg),
            None => Err(ScenarioError::Override(format!("scenario '{}' has no energy comparison", self.id))),
        }
    }

    /// The hybrid system behind an impact scenario.
    pub fn hybrid_system(&self, cfg: &RunConfig) -> Option<Result<HybridSystem>> {
        self.hybrid_fn.map(|f| f(cfg))
    }

    /// Runs every check; failures to run become part of the report.
    pub fn run_checks(&self, cfg: &RunConfig) -> ScenarioReport {
        let start = Instant::now();
        let (checks, error) = match self.checks(cfg) {
            Ok(c) => (c, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let events = if self.restitution.is_some() {
            self.simulate(cfg).map(|r| r.events).unwrap_or_default()
        } else {
            Vec::new()
        };
        ScenarioReport {
            scenario: self.id.into(),
            checks,
            events,
            runtime_s: start.elapsed().as_secs_f64(),
            error,
        }
    }
}

const RK4: &[IntegratorKind] = &[IntegratorKind::Rk4];
const DISCRETE_FIRST: &[IntegratorKind] =
    &[IntegratorKind::ExactDiscrete, IntegratorKind::MidpointVar, IntegratorKind::Rk4];
const MIDPOINT_FIRST: &[IntegratorKind] = &[IntegratorKind::MidpointVar, IntegratorKind::Rk4];
const RK4_FIRST: &[IntegratorKind] = &[IntegratorKind::Rk4, IntegratorKind::MidpointVar];
const MIDPOINT_ONLY: &[IntegratorKind] = &[IntegratorKind::MidpointVar];

static REGISTRY: [Scenario; 20] = [
    Scenario {
        id: "damped_oscillator",
        summary: "harmonic oscillator with linear Rayleigh damping, exact discrete Lagrangian",
        t0: 0.0,
        dt: 0.1,
        t_end: 10.0,
        integrators: DISCRETE_FIRST,
        restitution: None,
        params: &[("m", 1.0), ("k", 1.0), ("r", 0.3)],
        simulate_fn: mechanical::damped_oscillator_simulate,
        checks_fn: mechanical::damped_oscillator_checks,
        compare_fn: Some(mechanical::damped_oscillator_compare),
        hybrid_fn: None,
    },
    Scenario {
        id: "double_well_rayleigh",
        summary: "planar double well with weak linear Rayleigh damping, long-time energy tracking",
        t0: 0.0,
        dt: 0.1,
        t_end: 1000.0,
        integrators: MIDPOINT_FIRST,
        restitution: None,
        params: &[("k", 1e-3)],
        simulate_fn: mechanical::double_well_simulate,
        checks_fn: mechanical::double_well_checks,
        compare_fn: Some(mechanical::double_well_compare),
        hybrid_fn: None,
    },
    Scenario {
        id: "drag_particle",
        summary: "particle under quadratic fluid drag with a conserved momentum-like quantity",
        t0: 0.0,
        dt: 1e-2,
        t_end: 5.0,
        integrators: RK4_FIRST,
        restitution: None,
        params: &[("m", 2.0), ("k", 0.5), ("v0", 1.5)],
        simulate_fn: mechanical::drag_simulate,
        checks_fn: mechanical::drag_checks,
        compare_fn: Some(mechanical::drag_compare),
        hybrid_fn: None,
    },
    Scenario {
        id: "rotational_noether",
        summary: "forced discrete polar system with a rotational symmetry and its discrete momentum map",
        t0: 0.0,
        dt: 0.1,
        t_end: 20.0,
        integrators: MIDPOINT_ONLY,
        restitution: None,
        params: &[("k", 0.2), ("eps", 1e-3)],
        simulate_fn: mechanical::noether_simulate,
        checks_fn: mechanical::noether_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "free_particle_tmass",
        summary: "free particle with linear dissipation and time-dependent mass, with its HJ companion",
        t0: 0.0,
        dt: 1e-3,
        t_end: 5.0,
        integrators: RK4,
        restitution: None,
        params: &[("kappa", 1.0), ("mass_rate", 0.0), ("q0", 0.0), ("p0", 1.0), ("z0", 0.0)],
        simulate_fn: contact::free_particle_simulate,
        checks_fn: contact::free_particle_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "two_body_friction",
        summary: "planar Kepler two-body problem with linear friction in the action",
        t0: 0.0,
        dt: 1e-3,
        t_end: 10.0,
        integrators: RK4,
        restitution: None,
        params: &[("gamma", 0.1), ("m1", 1.0), ("m2", 2.0)],
        simulate_fn: contact::two_body_simulate,
        checks_fn: contact::two_body_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "hj_forced_family",
        summary: "free motion with quadratic drag in each direction, exponential HJ sections",
        t0: 0.0,
        dt: 1e-2,
        t_end: 5.0,
        integrators: RK4,
        restitution: None,
        params: &[("kappa1", 1.0), ("kappa2", 2.0)],
        simulate_fn: hamjac::forced_family_simulate,
        checks_fn: hamjac::forced_family_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "calogero_moser",
        summary: "two-particle Calogero-Moser system with a momentum-dependent force",
        t0: 0.0,
        dt: 1e-2,
        t_end: 5.0,
        integrators: RK4,
        restitution: None,
        params: &[("mu", 1.0), ("c", 5.0)],
        simulate_fn: hamjac::calogero_simulate,
        checks_fn: hamjac::calogero_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "falling_particle",
        summary: "freely falling particle with linear dissipation, conserved quantity from a complete solution",
        t0: 1.0,
        dt: 1e-2,
        t_end: 5.0,
        integrators: RK4,
        restitution: None,
        params: &[("m", 1.0), ("g", 1.0), ("gamma", 0.5)],
        simulate_fn: hamjac::falling_simulate,
        checks_fn: hamjac::falling_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "damped_forced_oscillator",
        summary: "damped oscillator driven by sin t, conserved quantity from a complete solution",
        t0: 1.0,
        dt: 1e-2,
        t_end: 2.2,
        integrators: RK4,
        restitution: None,
        params: &[],
        simulate_fn: hamjac::forced_oscillator_simulate,
        checks_fn: hamjac::forced_oscillator_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "contact_action_angle",
        summary: "commuting pair h = p, f = z on the Darboux contact space and its action-angle charts",
        t0: 0.0,
        dt: 1e-2,
        t_end: 2.0,
        integrators: RK4,
        restitution: None,
        params: &[],
        simulate_fn: contact::action_angle_simulate,
        checks_fn: contact::action_angle_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "lyapunov_example",
        summary: "damped contact oscillator whose dissipated quantities build a Lyapunov function",
        t0: 0.0,
        dt: 1e-2,
        t_end: 20.0,
        integrators: RK4,
        restitution: None,
        params: &[],
        simulate_fn: contact::lyapunov_simulate,
        checks_fn: contact::lyapunov_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "disk_between_walls",
        summary: "rolling disk on a spring between two horizontal walls",
        t0: 0.0,
        dt: 1e-3,
        t_end: 30.0,
        integrators: RK4,
        restitution: Some(1.0),
        params: &[],
        simulate_fn: impacts::disk_simulate,
        checks_fn: impacts::disk_checks,
        compare_fn: None,
        hybrid_fn: Some(impacts::disk_system),
    },
    Scenario {
        id: "pendulum_floor",
        summary: "pendulum hitting a horizontal floor at the horizontal position",
        t0: 0.0,
        dt: 1e-3,
        t_end: 30.0,
        integrators: RK4,
        restitution: Some(1.0),
        params: &[("p0", 1.5)],
        simulate_fn: impacts::pendulum_simulate,
        checks_fn: impacts::pendulum_checks,
        compare_fn: None,
        hybrid_fn: Some(impacts::pendulum_system),
    },
    Scenario {
        id: "circular_billiard_free",
        summary: "free particle in the unit-disk billiard",
        t0: 0.0,
        dt: 1e-2,
        t_end: 100.0,
        integrators: RK4,
        restitution: None,
        params: &[],
        simulate_fn: impacts::free_billiard_simulate,
        checks_fn: impacts::free_billiard_checks,
        compare_fn: None,
        hybrid_fn: Some(impacts::free_billiard_system),
    },
    Scenario {
        id: "dissipative_billiard",
        summary: "unit-disk billiard with linear friction in the action",
        t0: 0.0,
        dt: 1e-2,
        t_end: 100.0,
        integrators: RK4,
        restitution: None,
        params: &[("kappa", 1e-4)],
        simulate_fn: impacts::billiard_simulate,
        checks_fn: impacts::billiard_checks,
        compare_fn: None,
        hybrid_fn: Some(impacts::billiard_system),
    },
    Scenario {
        id: "nonholonomic_particle_walls",
        summary: "nonholonomic particle bouncing between two walls",
        t0: 0.0,
        dt: 1e-3,
        t_end: 10.0,
        integrators: RK4,
        restitution: Some(0.8),
        params: &[("energy", 1.0), ("lambda", 1.0), ("a", 1.0), ("y0", 0.5)],
        simulate_fn: impacts::nonholonomic_simulate,
        checks_fn: impacts::nonholonomic_checks,
        compare_fn: None,
        hybrid_fn: Some(impacts::nonholonomic_hybrid),
    },
    Scenario {
        id: "rolling_sphere_jump",
        summary: "velocity jump of a sphere when the rolling constraint switches on",
        t0: 0.0,
        dt: 1.0,
        t_end: 1.0,
        integrators: RK4,
        restitution: None,
        params: &[("r", 0.7), ("k", 0.45)],
        simulate_fn: impacts::sphere_simulate,
        checks_fn: impacts::sphere_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "rolling_cylinder_jump",
        summary: "velocity jump of a cylinder landing on a moving plane",
        t0: 0.0,
        dt: 1.0,
        t_end: 1.0,
        integrators: RK4,
        restitution: None,
        params: &[("phi", 0.9), ("alpha", 0.5)],
        simulate_fn: impacts::cylinder_simulate,
        checks_fn: impacts::cylinder_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
    Scenario {
        id: "carnot_restitution",
        summary: "kinetic energy balance of random restitution events",
        t0: 0.0,
        dt: 1.0,
        t_end: 1.0,
        integrators: RK4,
        restitution: None,
        params: &[("events", 1000.0)],
        simulate_fn: impacts::carnot_simulate,
        checks_fn: impacts::carnot_checks,
        compare_fn: None,
        hybrid_fn: None,
    },
];

pub fn registry() -> &'static [Scenario] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static Scenario> {
    REGISTRY.iter().find(|s| s.id == id).ok_or_else(|| ScenarioError::Unknown {
        id: id.into(),
        suggestion: suggest(id, REGISTRY.iter().map(|s| s.id)),
    })
}
