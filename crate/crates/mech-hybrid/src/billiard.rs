use std::sync::Arc;

use mech_core::{Layout, ScalarField, State, SystemDef};
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};
use crate::guard::{Guard, HybridSystem, ImpactMap};

const CIRCLE_TOL: f64 = 1e-8;

/// Specular reflection at the unit circle, `v⁺ = v − 2(v·n)n` with
/// `n = q/|q|`; `z` passes through.
pub fn billiard_impact() -> ImpactMap {
    ImpactMap::new("unit-circle", |s: &State| {
        let (x, y) = (s.q[0], s.q[1]);
        let r2 = x * x + y * y;
        if (r2 - 1.0).abs() > CIRCLE_TOL {
            return Err(HybridError::OffSurface(format!("x² + y² = {r2}")));
        }
        // Normalizing keeps |v| exact when q sits a rounding error off the circle.
        let r = r2.sqrt();
        let (nx, ny) = (x / r, y / r);
        let (vx, vy) = (s.m[0], s.m[1]);
        let vn = vx * nx + vy * ny;
        let mut post = s.clone();
        post.m = vec![vx - 2.0 * vn * nx, vy - 2.0 * vn * ny];
        Ok(post)
    })
}

/// Particle in the unit disk with `L = |v|²/2 − κz`, so that `v̇ = −κv`
/// between impacts.
pub fn dissipative_billiard(kappa: f64) -> Result<HybridSystem> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(HybridError::Parameter(format!("κ = {kappa} must be finite and non-negative")));
    }
    let l = ScalarField::new(Layout::contact(2), move |s| {
        0.5 * (s.m[0] * s.m[0] + s.m[1] * s.m[1]) - kappa * s.z.unwrap_or(0.0)
    })
    .with_grad(move |s| vec![0.0, 0.0, s.m[0], s.m[1], -kappa]);
    let sys = SystemDef::herglotz(2, l);
    let guard = Guard::new("unit-circle", |q| 1.0 - q[0] * q[0] - q[1] * q[1])
        .with_grad(|q| vec![-2.0 * q[0], -2.0 * q[1]])
        .with_approach(|s| s.q[0] * s.m[0] + s.q[1] * s.m[1] > 0.0);
    let id = if kappa == 0.0 { "circular_billiard_free" } else { "dissipative_billiard" };
    HybridSystem::new(id, Arc::new(sys), vec![guard], vec![billiard_impact()])
}

/// Defects of the nonsmooth jump conditions at one impact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilliardJump {
    /// `|v⁺·τ − v⁻·τ|` with `τ` the unit tangent.
    pub tangential: f64,
    /// `| |v⁺|²/2 − |v⁻|²/2 |` (the action is continuous, so this is the energy jump).
    pub energy: f64,
    /// `| |v⁺| − |v⁻| |`.
    pub speed: f64,
    /// `|ṙ⁺ + ṙ⁻|`.
    pub radial: f64,
    /// `|θ̇⁺ − θ̇⁻|`.
    pub angular: f64,
    /// `|z⁺ − z⁻|`.
    pub action: f64,
}

impl BilliardJump {
    pub fn max(&self) -> f64 {
        [self.tangential, self.energy, self.speed, self.radial, self.angular, self.action].into_iter().fold(0.0, f64::max)
    }
}

pub fn billiard_jump_conditions(pre: &State, post: &State) -> BilliardJump {
    let (x, y) = (pre.q[0], pre.q[1]);
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    let polar = |v: &[f64]| ((x * v[0] + y * v[1]) / r, (x * v[1] - y * v[0]) / r2);
    let (rd0, th0) = polar(&pre.m);
    let (rd1, th1) = polar(&post.m);
    let tangent = |v: &[f64]| (x * v[1] - y * v[0]) / r;
    let e = |v: &[f64]| 0.5 * (v[0] * v[0] + v[1] * v[1]);
    BilliardJump {
        tangential: (tangent(&post.m) - tangent(&pre.m)).abs(),
        energy: (e(&post.m) - e(&pre.m)).abs(),
        speed: ((2.0 * e(&post.m)).sqrt() - (2.0 * e(&pre.m)).sqrt()).abs(),
        radial: (rd1 + rd0).abs(),
        angular: (th1 - th0).abs(),
        action: (post.z.unwrap_or(0.0) - pre.z.unwrap_or(0.0)).abs(),
    }
}
