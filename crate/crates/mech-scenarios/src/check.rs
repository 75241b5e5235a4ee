use mech_hybrid::EventRecord;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ClosedForm,
    Conserved,
    Dissipated,
    HjResidual,
    Bracket,
    HybridConstant,
    Jump,
    Projector,
    Identity,
    Order,
    Event,
    Stability,
    Property,
    /// Recorded for information; never fails.
    Report,
}

/// One named numerical check. `pass` is `value < tolerance` unless the
/// check is a lower bound; data-only checks carry no tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, kind: CheckKind, value: f64, tol: f64) -> Self {
        Self { name: name.into(), kind, value, tolerance: Some(tol), pass: value < tol }
    }

    /// Passes when `value ≥ bound`; used for event counts and negative
    /// controls that must stay clearly away from zero.
    pub fn at_least(name: impl Into<String>, kind: CheckKind, value: f64, bound: f64) -> Self {
        Self { name: name.into(), kind, value, tolerance: Some(bound), pass: value >= bound }
    }

    pub fn flag(name: impl Into<String>, kind: CheckKind, ok: bool) -> Self {
        Self { name: name.into(), kind, value: if ok { 1.0 } else { 0.0 }, tolerance: None, pass: ok }
    }

    pub fn report(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), kind: CheckKind::Report, value, tolerance: None, pass: true }
    }
}

/// Outcome of running every check of one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub events: Vec<EventRecord>,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ScenarioReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}
