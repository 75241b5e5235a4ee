use mech_core::ScalarField;
use serde::{Deserialize, Serialize};

use crate::simulate::HybridTrajectory;

const JUMP_TOL: f64 = 1e-9;

/// Drift of `f` inside segments and mismatch of its jumps with the rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridConstantReport {
    pub name: String,
    /// `max_i max_{t ∈ segment i} |f(t) − f(segment start)|`.
    pub segment_drift: f64,
    /// `max_events |f(post) − rule(f(pre))|`.
    pub jump_residual: f64,
    /// Drift of `f` over the whole run, jumps included.
    pub total_drift: f64,
    pub events: usize,
    pub pass: bool,
}

/// Checks `f` as a generalized hybrid constant of the motion: constant on
/// each smooth segment (to `segment_tol`) and mapped by `rule` at impacts
/// (to 1e-9). Without a rule the jump must be the identity.
pub fn hybrid_constant_check(
    htraj: &HybridTrajectory,
    f: &ScalarField,
    rule: Option<&dyn Fn(f64) -> f64>,
    segment_tol: f64,
    name: &str,
) -> HybridConstantReport {
    let mut segment_drift: f64 = 0.0;
    for seg in &htraj.segments {
        let f0 = f.eval(&seg.samples[0]);
        for s in &seg.samples {
            segment_drift = segment_drift.max((f.eval(s) - f0).abs());
        }
    }
    let mut jump_residual: f64 = 0.0;
    for e in &htraj.events {
        let before = f.eval(&e.pre);
        let expected = rule.map_or(before, |r| r(before));
        jump_residual = jump_residual.max((f.eval(&e.post) - expected).abs());
    }
    let first = f.eval(&htraj.segments[0].samples[0]);
    let total_drift = htraj.samples().map(|s| (f.eval(s) - first).abs()).fold(0.0, f64::max);
    HybridConstantReport {
        name: name.into(),
        segment_drift,
        jump_residual,
        total_drift,
        events: htraj.events.len(),
        pass: segment_drift < segment_tol && jump_residual < JUMP_TOL,
    }
}
