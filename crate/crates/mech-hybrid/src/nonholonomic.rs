use std::sync::Arc;

use mech_core::{Layout, State};
use mech_integrators::FnField;
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};
use crate::guard::{Guard, HybridSystem, ImpactMap};
use crate::simulate::{hybrid_integrate, HybridTrajectory};

/// Unit-mass particle in ℝ³ with `ż = y ẋ`, bouncing between walls
/// `y = 0` and `y = a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonholonomicParams {
    pub energy: f64,
    pub lambda: f64,
    pub a: f64,
    pub e: f64,
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    /// Sign of the initial `ẏ`.
    pub upward: bool,
}

impl Default for NonholonomicParams {
    fn default() -> Self {
        Self { energy: 1.0, lambda: 1.0, a: 1.0, e: 0.8, x0: 0.0, y0: 0.5, z0: 0.0, upward: true }
    }
}

/// `(λ, E)` before and after one wall impact, with the two candidate
/// energy updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallUpdate {
    pub t: f64,
    pub lambda_pre: f64,
    pub energy_pre: f64,
    pub lambda_post: f64,
    pub energy_post: f64,
    /// `e²E + (1−e²)λ²/2`, from `ẏ ↦ −eẏ`.
    pub derived_energy: f64,
    /// `e²E + (1+e²)λ²/2`, the coefficient as usually printed.
    pub printed_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonholonomicReport {
    pub htraj: HybridTrajectory,
    /// Largest deviation of any sample from the closed-form segment curve.
    pub segment_error: f64,
    pub updates: Vec<WallUpdate>,
    pub derived_residual: f64,
    pub printed_residual: f64,
}

/// `(λ, E)` of a state: `λ = ẋ √(1+y²)`, `E = |v|²/2`.
fn invariants(s: &State) -> (f64, f64) {
    let y = s.q[1];
    (s.m[0] * (1.0 + y * y).sqrt(), 0.5 * s.m.iter().map(|v| v * v).sum::<f64>())
}

/// Closed-form position at time `tau` after `start`, with `ẏ = A` fixed.
pub fn nonholonomic_closed_form(start: &State, tau: f64) -> [f64; 3] {
    let (lambda, _) = invariants(start);
    let (x0, y0, z0) = (start.q[0], start.q[1], start.q[2]);
    let a = start.m[1];
    let y = y0 + a * tau;
    if a == 0.0 {
        let w = (1.0 + y0 * y0).sqrt();
        return [x0 + lambda * tau / w, y0, z0 + lambda * y0 * tau / w];
    }
    [
        x0 + lambda / a * (y.asinh() - y0.asinh()),
        y,
        z0 + lambda / a * ((1.0 + y * y).sqrt() - (1.0 + y0 * y0).sqrt()),
    ]
}

pub fn nonholonomic_system(p: &NonholonomicParams) -> Result<HybridSystem> {
    if !(0.0..=1.0).contains(&p.e) {
        return Err(HybridError::Restitution(p.e));
    }
    if !(p.a > 0.0) {
        return Err(HybridError::Parameter(format!("wall separation {} must be positive", p.a)));
    }
    let field = FnField::new(Layout::symplectic(3), |s: &State| {
        let (y, vx, vy, vz) = (s.q[1], s.m[0], s.m[1], s.m[2]);
        let w = vx * vy / (1.0 + y * y);
        vec![vx, vy, vz, -y * w, 0.0, w]
    });
    let a = p.a;
    let e = p.e;
    let lower = Guard::new("wall-lower", |q| q[1]).with_grad(|_| vec![0.0, 1.0, 0.0]);
    let upper = Guard::new("wall-upper", move |q| a - q[1]).with_grad(|_| vec![0.0, -1.0, 0.0]);
    let bounce = ImpactMap::new(format!("wall(e={e})"), move |s: &State| {
        let mut post = s.clone();
        post.m[1] *= -e;
        Ok(post)
    });
    HybridSystem::new("nonholonomic_particle_walls", Arc::new(field), vec![lower, upper], vec![bounce.clone(), bounce])
}

pub fn nonholonomic_initial_state(p: &NonholonomicParams) -> Result<State> {
    let disc = 2.0 * p.energy - p.lambda * p.lambda;
    if disc < 0.0 {
        return Err(HybridError::Parameter(format!("2E − λ² = {disc} is negative")));
    }
    if !(0.0..=p.a).contains(&p.y0) {
        return Err(HybridError::Parameter(format!("y₀ = {} lies outside [0, {}]", p.y0, p.a)));
    }
    let w = (1.0 + p.y0 * p.y0).sqrt();
    let vy = if p.upward { disc.sqrt() } else { -disc.sqrt() };
    Ok(State::symplectic(vec![p.x0, p.y0, p.z0], vec![p.lambda / w, vy, p.lambda * p.y0 / w]))
}

/// Simulates the particle and compares every segment with the closed form
/// started from the segment's first sample.
pub fn nonholonomic_particle_sim(p: &NonholonomicParams, dt: f64, t_end: f64) -> Result<NonholonomicReport> {
    let hsys = nonholonomic_system(p)?;
    let s0 = nonholonomic_initial_state(p)?;
    let htraj = hybrid_integrate(&hsys, &s0, dt, t_end)?;
    let mut segment_error: f64 = 0.0;
    for seg in &htraj.segments {
        let start = &seg.samples[0];
        for s in &seg.samples {
            let cf = nonholonomic_closed_form(start, s.t - start.t);
            for i in 0..3 {
                segment_error = segment_error.max((cf[i] - s.q[i]).abs());
            }
        }
    }
    let e2 = p.e * p.e;
    let updates: Vec<WallUpdate> = htraj
        .events
        .iter()
        .map(|ev| {
            let (lambda_pre, energy_pre) = invariants(&ev.pre);
            let (lambda_post, energy_post) = invariants(&ev.post);
            let l2 = lambda_pre * lambda_pre;
            WallUpdate {
                t: ev.t,
                lambda_pre,
                energy_pre,
                lambda_post,
                energy_post,
                derived_energy: e2 * energy_pre + 0.5 * (1.0 - e2) * l2,
                printed_energy: e2 * energy_pre + 0.5 * (1.0 + e2) * l2,
            }
        })
        .collect();
    let worst = |f: fn(&WallUpdate) -> f64| updates.iter().map(f).fold(0.0, f64::max);
    let derived_residual = worst(|u| (u.energy_post - u.derived_energy).abs().max((u.lambda_post - u.lambda_pre).abs()));
    let printed_residual = worst(|u| (u.energy_post - u.printed_energy).abs());
    Ok(NonholonomicReport { htraj, segment_error, updates, derived_residual, printed_residual })
}
