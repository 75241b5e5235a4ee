use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use mech_hybrid::ZenoConfig;
use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    Rk4,
    MidpointVar,
    ExactDiscrete,
}

impl IntegratorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rk4 => "rk4",
            Self::MidpointVar => "midpoint-var",
            Self::ExactDiscrete => "exact-discrete",
        }
    }
}

impl fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntegratorKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rk4" => Ok(Self::Rk4),
            "midpoint-var" => Ok(Self::MidpointVar),
            "exact-discrete" => Ok(Self::ExactDiscrete),
            other => Err(ScenarioError::Override(format!(
                "unknown integrator '{other}' (expected rk4, midpoint-var or exact-discrete)"
            ))),
        }
    }
}

/// Partial run settings, as read from a config file or the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub integrator: Option<IntegratorKind>,
    pub e: Option<f64>,
    pub max_events: Option<usize>,
    pub min_gap: Option<f64>,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, f64>,
}

impl Overrides {
    /// `self` with every field set in `top` replaced.
    pub fn layered(mut self, top: &Overrides) -> Overrides {
        self.dt = top.dt.or(self.dt);
        self.t_end = top.t_end.or(self.t_end);
        self.integrator = top.integrator.or(self.integrator);
        self.e = top.e.or(self.e);
        self.max_events = top.max_events.or(self.max_events);
        self.min_gap = top.min_gap.or(self.min_gap);
        self.seed = top.seed.or(self.seed);
        for (k, v) in &top.params {
            self.params.insert(k.clone(), *v);
        }
        self
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: IntegratorKind,
    /// Coefficient of restitution, for scenarios with impacts.
    pub e: Option<f64>,
    pub zeno: ZenoConfig,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
}

impl RunConfig {
    /// A named scenario parameter; resolution guarantees every declared
    /// parameter is present.
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn restitution(&self) -> f64 {
        self.e.unwrap_or(1.0)
    }

    /// Number of fixed steps covering `[t0, t_end]`.
    pub fn steps_from(&self, t0: f64) -> usize {
        (((self.t_end - t0) / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}
