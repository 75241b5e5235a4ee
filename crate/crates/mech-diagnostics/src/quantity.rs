use mech_core::{Flavor, MechError, ScalarField, State, SystemDef};
use mech_integrators::Trajectory;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    Conserved,
    Dissipated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantityReport {
    pub name: String,
    pub kind: QuantityKind,
    pub max_abs_drift: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl QuantityReport {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self.pass = Some(self.max_abs_drift <= tol);
        self
    }
}

/// `max_t |f(c(t)) − f(c(0))|` over the stored samples.
pub fn conserved_drift(traj: &Trajectory, f: &ScalarField, name: &str) -> QuantityReport {
    let f0 = f.eval(&traj.samples[0]);
    let drift = traj.samples.iter().map(|s| (f.eval(s) - f0).abs()).fold(0.0, f64::max);
    QuantityReport {
        name: name.into(),
        kind: QuantityKind::Conserved,
        max_abs_drift: drift,
        samples: traj.len(),
        tolerance: None,
        pass: None,
    }
}

/// `R(H) = ∂H/∂z` for contact systems and `−∂L/∂z` for Herglotz ones.
pub fn dissipation_rate(sys: &SystemDef, s: &State) -> Result<f64> {
    s.z()?;
    match &sys.flavor {
        Flavor::Contact { h } | Flavor::Cocontact { h } => Ok(h.gradient(s).dz()),
        Flavor::HerglotzLagrangian { l } => Ok(-l.gradient(s).dz()),
        other => Err(MechError::WrongFlavor { expected: "contact, cocontact or Herglotz", got: other.name() }.into()),
    }
}

/// Drift of `f·exp(∫₀ᵗ rate)`, the integral by trapezoid over the samples.
/// Repeated sample times (impacts) add nothing to the integral.
pub fn dissipated_drift_with_rate(traj: &Trajectory, f: &ScalarField, rate: impl Fn(&State) -> f64, name: &str) -> QuantityReport {
    let f0 = f.eval(&traj.samples[0]);
    let mut integral = 0.0;
    let mut prev = rate(&traj.samples[0]);
    let mut drift: f64 = 0.0;
    for w in traj.samples.windows(2) {
        let r = rate(&w[1]);
        integral += 0.5 * (w[1].t - w[0].t) * (prev + r);
        prev = r;
        drift = drift.max((f.eval(&w[1]) * integral.exp() - f0).abs());
    }
    QuantityReport {
        name: name.into(),
        kind: QuantityKind::Dissipated,
        max_abs_drift: drift,
        samples: traj.len(),
        tolerance: None,
        pass: None,
    }
}

/// Dissipated-quantity drift with the system's own rate `R(H)`.
pub fn dissipated_drift(traj: &Trajectory, f: &ScalarField, sys: &SystemDef, name: &str) -> Result<QuantityReport> {
    for s in &traj.samples {
        dissipation_rate(sys, s)?;
    }
    Ok(dissipated_drift_with_rate(traj, f, |s| dissipation_rate(sys, s).unwrap_or(0.0), name))
}
