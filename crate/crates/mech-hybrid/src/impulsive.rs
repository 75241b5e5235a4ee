use mech_core::spd_inverse;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};

/// Smallest admissible `σ_min/σ_max` of `C = ψ g⁻¹ ψᵀ`.
const RANK_TOL: f64 = 1e-12;

/// Momentum projector `P = Id − ψᵀ C⁻¹ ψ g⁻¹` with `C = ψ g⁻¹ ψᵀ`, giving
/// `p⁺ = P p⁻` for constraints `ψ` (one row per constraint) activated at
/// an impact. With no rows this is the identity.
pub fn impulsive_projector(g: &DMatrix<f64>, psi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if psi.ncols() != n {
        return Err(HybridError::Parameter(format!("ψ has {} columns, metric is {n}×{n}", psi.ncols())));
    }
    if psi.nrows() == 0 {
        return Ok(DMatrix::identity(n, n));
    }
    let ginv = spd_inverse(g)?;
    let c = psi * &ginv * psi.transpose();
    let sv = c.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if !(hi > 0.0) || lo / hi < RANK_TOL {
        return Err(HybridError::RankDeficient(if hi > 0.0 { lo / hi } else { 0.0 }));
    }
    let cinv = c.try_inverse().ok_or(HybridError::RankDeficient(lo / hi))?;
    Ok(DMatrix::identity(n, n) - psi.transpose() * cinv * psi * ginv)
}

/// `P̃ − αQ̃` acting on velocities, where `Q̃` is the `g`-orthogonal
/// projection onto `grad Ψ = g⁻¹ dΨ` and `P̃ = Id − Q̃`.
pub fn restitution_map(g: &DMatrix<f64>, dpsi: &DVector<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(HybridError::Restitution(alpha));
    }
    let ginv = spd_inverse(g)?;
    let grad = &ginv * dpsi;
    let norm2 = dpsi.dot(&grad);
    if !(norm2 > 1e-300) {
        return Err(HybridError::ZeroGradient);
    }
    let n = g.nrows();
    Ok(DMatrix::identity(n, n) - (&grad * dpsi.transpose()) * ((1.0 + alpha) / norm2))
}

/// Kinetic-energy accounting at one restitution event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarnotReport {
    /// `T(v⁺) − T(v⁻)`.
    pub delta_t: f64,
    /// `T(v⁺ − v⁻)`, the energy of the velocity jump.
    pub t_i: f64,
    /// `|ΔT + (1−α)/(1+α) T_I|`.
    pub residual: f64,
}

/// Checks Carnot's identity `T₊ − T₋ = −(1−α)/(1+α) T_I` for a jump made by
/// a restitution map with coefficient `α`.
pub fn carnot_energy_change(g: &DMatrix<f64>, v_minus: &DVector<f64>, v_plus: &DVector<f64>, alpha: f64) -> Result<CarnotReport> {
    if alpha == -1.0 {
        return Err(HybridError::DegenerateCarnot);
    }
    let t = |v: &DVector<f64>| 0.5 * v.dot(&(g * v));
    let delta_t = t(v_plus) - t(v_minus);
    let t_i = t(&(v_plus - v_minus));
    let residual = (delta_t + (1.0 - alpha) / (1.0 + alpha) * t_i).abs();
    Ok(CarnotReport { delta_t, t_i, residual })
}

/// Rolling sphere in `(x, y, θ_x, θ_y, θ_z)` with unit mass, radius `r` and
/// inertia `k²`: no-slip rows `ẋ − rω_y = 0`, `ẏ + rω_x = 0`.
pub fn sphere_constraint_rows(r: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 5, &[1.0, 0.0, 0.0, -r, 0.0, 0.0, 1.0, r, 0.0, 0.0])
}

pub fn sphere_metric(k: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, k * k, k * k, k * k]))
}

/// The sphere's projector written out entry by entry.
pub fn sphere_projector_closed_form(r: f64, k: f64) -> DMatrix<f64> {
    let d = k * k + r * r;
    let (a, b, c, e) = (r * r / d, r / d, k * k * r / d, k * k / d);
    DMatrix::from_row_slice(
        5,
        5,
        &[
            a, 0.0, 0.0, b, 0.0, //
            0.0, a, -b, 0.0, 0.0, //
            0.0, -c, e, 0.0, 0.0, //
            c, 0.0, 0.0, e, 0.0, //
            0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Post-impact sphere velocities `(ẋ, ẏ, ω_x, ω_y, ω_z)` in closed form.
pub fn sphere_jump_velocities(r: f64, k: f64, v: &[f64]) -> [f64; 5] {
    let (k2, d) = (k * k, r * r + k * k);
    [
        (r * r * v[0] + r * k2 * v[3]) / d,
        (r * r * v[1] - r * k2 * v[2]) / d,
        (-r * v[1] + k2 * v[2]) / d,
        (r * v[0] + k2 * v[3]) / d,
        v[4],
    ]
}

/// Cylinder of mass `m`, inertia `inertia`, radius `r` and eccentricity
/// `gamma` landing on a plane of mass `big_m`; coordinates `(x, y, φ, h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderParams {
    pub m: f64,
    pub big_m: f64,
    pub inertia: f64,
    pub r: f64,
    pub gamma: f64,
}

impl Default for CylinderParams {
    fn default() -> Self {
        Self { m: 1.3, big_m: 2.1, inertia: 0.7, r: 0.5, gamma: 0.3 }
    }
}

pub fn cylinder_metric(p: &CylinderParams) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![p.m, p.m, p.inertia, p.big_m]))
}

/// Differentials of the rolling and contact constraints
/// `x − γ sin φ − rφ` and `y − h − r − γ cos φ`.
pub fn cylinder_constraint_rows(p: &CylinderParams, phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 4, &[1.0, 0.0, -p.gamma * c - p.r, 0.0, 0.0, 1.0, p.gamma * s, -1.0])
}

/// Post-impact momenta `(p_x, p_y, p_φ, p_h)` when both constraints switch
/// on, written out in closed form.
pub fn cylinder_jump_closed_form(p: &CylinderParams, phi: f64, pm: &[f64]) -> [f64; 4] {
    let CylinderParams { m, big_m: mm, inertia: i, r, gamma: g } = *p;
    let (s, c) = phi.sin_cos();
    let c2 = (2.0 * phi).cos();
    let (px, py, pf, ph) = (pm[0], pm[1], pm[2], pm[3]);
    let roll = g * px * c + px * r + pf;
    let den = 2.0 * (m + mm) * (i + m * r * r) + g * g * m * (m + 2.0 * mm) + g * m * (g * m * c2 + 4.0 * r * (m + mm) * c);
    let lever = i + m * r * r + g * m * c * (g * c + 2.0 * r);
    let den_y = (m + mm) * lever + g * g * m * mm * s * s;
    let mix = g * s * (m * ph - mm * py) + (m + mm) * roll;
    [
        2.0 * m * (g * c + r) * mix / den,
        m / den_y * ((ph + py) * lever - g * mm * s * roll + g * g * mm * py * s * s),
        2.0 * i * mix / den,
        mm / den
            * (2.0 * (ph + py) * (i + m * r * r)
                + g * m * (4.0 * r * (ph + py) * c + 2.0 * s * roll + g * py * c2)
                + g * g * m * (2.0 * ph + py)),
    ]
}

/// Cylinder velocities `(ẋ, ẏ, φ̇, ḣ)` after a restitution impact with the
/// plane, coefficient `alpha`, along `dΨ = dy − dh + γ sin φ dφ`.
pub fn cylinder_restitution_jump(p: &CylinderParams, phi: f64, v: &[f64], alpha: f64) -> [f64; 4] {
    let gs = p.gamma * phi.sin();
    let den = 1.0 / p.m + 1.0 / p.big_m + gs * gs / p.inertia;
    let jump = (1.0 + alpha) * (v[1] - v[3] + gs * v[2]) / den;
    [v[0], v[1] - jump / p.m, v[2] - jump * gs / p.inertia, v[3] + jump / p.big_m]
}
