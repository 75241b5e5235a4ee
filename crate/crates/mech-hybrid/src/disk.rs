use std::sync::Arc;

use mech_core::{Layout, ScalarField, State, SystemDef};

use crate::error::{HybridError, Result};
use crate::guard::{Guard, HybridSystem, ImpactMap};

const SURFACE_TOL: f64 = 1e-9;

/// Disk of mass `m`, radius `r`, inertia `m k²`, harmonic strength `omega`,
/// between rough walls at `y = 0` and `y = wall`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskParams {
    pub m: f64,
    pub r: f64,
    pub k: f64,
    pub omega: f64,
    pub wall: f64,
    pub e: f64,
}

impl Default for DiskParams {
    fn default() -> Self {
        Self { m: 1.0, r: 1.0, k: 1.0, omega: 1.0, wall: 3.0, e: 1.0 }
    }
}

/// `(p_x, p_y, p_θ) ↦ ((R²p_x + Rp_θ)/(k²+R²), −e p_y, k²(Rp_x + p_θ)/(k²+R²))`,
/// defined on the rolling surface `p_x = R p_θ/k²`.
pub fn disk_wall_impact(p: DiskParams) -> ImpactMap {
    let DiskParams { r, k, e, .. } = p;
    ImpactMap::new(format!("disk-wall(e={e})"), move |s: &State| {
        let (px, py, pt) = (s.m[0], s.m[1], s.m[2]);
        let gap = px - r * pt / (k * k);
        if gap.abs() > SURFACE_TOL * px.abs().max(1.0) {
            return Err(HybridError::OffSurface(format!("p_x − R p_θ/k² = {gap:e}")));
        }
        let d = k * k + r * r;
        let mut post = s.clone();
        post.m = vec![(r * r * px + r * pt) / d, -e * py, k * k * (r * px + pt) / d];
        Ok(post)
    })
}

/// `H = (p_x² + p_y²)/2m + p_θ²/(2mk²) + Ω²(x² + y²)/2` with wall guards on
/// the disk centre, `y ≥ R` and `y ≤ wall − R`.
pub fn disk_between_walls(p: DiskParams) -> Result<HybridSystem> {
    let DiskParams { m, r, k, omega, wall, e } = p;
    if !(0.0..=1.0).contains(&e) {
        return Err(HybridError::Restitution(e));
    }
    if !(wall > 2.0 * r) {
        return Err(HybridError::Parameter(format!("wall separation {wall} must exceed the diameter {}", 2.0 * r)));
    }
    let w2 = omega * omega;
    let h = ScalarField::new(Layout::symplectic(3), move |s| {
        (s.m[0] * s.m[0] + s.m[1] * s.m[1]) / (2.0 * m) + s.m[2] * s.m[2] / (2.0 * m * k * k)
            + 0.5 * w2 * (s.q[0] * s.q[0] + s.q[1] * s.q[1])
    })
    .with_grad(move |s| vec![w2 * s.q[0], w2 * s.q[1], 0.0, s.m[0] / m, s.m[1] / m, s.m[2] / (m * k * k)]);
    let sys = SystemDef::forced_hamiltonian(3, h, None);
    let lower = Guard::new("wall-lower", move |q| q[1] - r).with_grad(|_| vec![0.0, 1.0, 0.0]);
    let upper = Guard::new("wall-upper", move |q| wall - r - q[1]).with_grad(|_| vec![0.0, -1.0, 0.0]);
    let map = disk_wall_impact(p);
    HybridSystem::new("disk_between_walls", Arc::new(sys), vec![lower, upper], vec![map.clone(), map])
}

/// `(φ¹, φ², φ³, f₁, f₂, f₃)` with `f₁ = (p_x² + x²)/2`, `f₂ = (p_y² + y²)/2`,
/// `f₃ = p_θ²/2`, `φ¹ = arctan(x/p_x)`, `φ² = arctan(y/p_y)`, `φ³ = θ/p_θ`
/// (unit parameters).
pub fn disk_action_angle(s: &State) -> [f64; 6] {
    let (x, y, th) = (s.q[0], s.q[1], s.q[2]);
    let (px, py, pt) = (s.m[0], s.m[1], s.m[2]);
    [
        (x / px).atan(),
        (y / py).atan(),
        th / pt,
        0.5 * (px * px + x * x),
        0.5 * (py * py + y * y),
        0.5 * pt * pt,
    ]
}

/// Residuals of the impact relations in action-angle coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleRelations {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl AngleRelations {
    pub fn max(&self) -> f64 {
        [self.phi1, self.phi2, self.phi3, self.f1, self.f2, self.f3].into_iter().fold(0.0, f64::max)
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    // Angles from arctan are defined modulo π.
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Compares the predicted `(φ₊, f₊)` with the impact map pushed through the
/// coordinate functions, for unit disk parameters and wall offset `a`.
pub fn action_angle_impact_relations(s: &State, e: f64) -> Result<AngleRelations> {
    let p = DiskParams { e, ..DiskParams::default() };
    let a = s.q[1];
    let before = disk_action_angle(s);
    let (f1, f2, f3) = (before[3], before[4], before[5]);
    let cos2 = (s.m[0] * s.m[0]) / (2.0 * f1);
    let on_wall = (2.0 * f2 * before[1].sin().powi(2) - a * a).abs();
    let rolling = (f3 - p.k.powi(4) * f1 * cos2 / (p.r * p.r)).abs();
    let walls = [(a - p.r).abs(), (a - (p.wall - p.r)).abs()];
    if on_wall > 1e-8 || rolling > 1e-8 || walls[0].min(walls[1]) > 1e-8 {
        return Err(HybridError::OffSurface(format!("surface residuals {on_wall:e}, {rolling:e}")));
    }
    let after = disk_action_angle(&disk_wall_impact(p).apply(s)?);
    let phi2 = -(before[1].tan() / e).atan();
    Ok(AngleRelations {
        phi1: angle_gap(after[0], before[0]),
        phi2: angle_gap(after[1], phi2),
        phi3: (after[2] - before[2]).abs(),
        f1: (after[3] - f1).abs(),
        f2: (after[4] - (e * e * f2 + 0.5 * (1.0 - e * e) * a * a)).abs(),
        f3: (after[5] - f3).abs(),
    })
}
