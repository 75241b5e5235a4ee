use mech_core::{Flavor, Layout, MechError, State, SystemDef};
use mech_integrators::{integrate_field, reference_solve, FnField, IntegratorError, Trajectory};

use crate::error::{HamJacError, Result};
use crate::section::SectionGamma;

const CLOSED_TOL: f64 = 1e-6;

/// Largest component of `d(H∘γ) + γ*α` over the probes, in the coordinate
/// form `∂H/∂q_i + α_i + Σ_j ∂H/∂p_j ∂γ_j/∂q_i` evaluated on `Im γ`.
pub fn hj_residual_forced(gamma: &SectionGamma, sys: &SystemDef, probes: &[Vec<f64>]) -> Result<f64> {
    let Flavor::ForcedHamiltonian { h, alpha } = &sys.flavor else {
        return Err(MechError::WrongFlavor { expected: "forced Hamiltonian", got: sys.flavor.name() }.into());
    };
    let asym = gamma.closedness_residual(0.0, probes);
    if asym > CLOSED_TOL {
        return Err(HamJacError::NotClosed(asym));
    }
    let n = sys.n;
    let mut worst: f64 = 0.0;
    for q in probes {
        let s = State::symplectic(q.clone(), gamma.momenta(0.0, q));
        let dh = h.gradient(&s);
        let a = alpha.as_ref().map(|a| a.components(&s)).unwrap_or_else(|| vec![0.0; n]);
        let jac = gamma.jacobian(0.0, q);
        for i in 0..n {
            let r = dh.dq()[i] + a[i] + (0..n).map(|j| dh.dm()[j] * jac[j][i]).sum::<f64>();
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// `max |H(t, q, ∂S/∂q, S) + ∂S/∂t|` over `(t, q)` probes.
pub fn hj_residual_contact_time(s: &SectionGamma, sys: &SystemDef, probes: &[(f64, Vec<f64>)]) -> Result<f64> {
    let Flavor::Cocontact { h } = &sys.flavor else {
        return Err(MechError::WrongFlavor { expected: "cocontact", got: sys.flavor.name() }.into());
    };
    let mut worst: f64 = 0.0;
    for (t, q) in probes {
        let (Some(st), Some(sv)) = (s.time_derivative(*t, q), s.action(*t, q)) else {
            return Err(MechError::WrongFlavor { expected: "generating section", got: "one-form section" }.into());
        };
        let state = State::new(*t, q.clone(), s.momenta(*t, q), Some(sv));
        worst = worst.max((h.eval(&state) + st).abs());
    }
    Ok(worst)
}

/// Outcome of comparing a lifted projected curve with the full flow.
#[derive(Clone, Debug)]
pub struct GammaRelated {
    /// Sup-norm over samples and coordinates of `γ(σ(t)) − c(t)`.
    pub deviation: f64,
    pub dt: f64,
    pub samples: usize,
    pub projected: Trajectory,
    pub full: Trajectory,
}

/// Integrates `X^γ` (base dynamics with momenta and action read off `γ`),
/// lifts it by `γ` and compares with the full flow from `γ(q0)`.
pub fn gamma_related_check(gamma: &SectionGamma, sys: &SystemDef, t0: f64, q0: &[f64], t_end: f64) -> Result<GammaRelated> {
    let layout = sys.layout();
    let base = Layout::symplectic(sys.n);
    if !gamma.in_domain(t0, q0) {
        return Err(HamJacError::LeftDomain(t0));
    }
    let qr = layout.q_range();
    let projected_field = FnField::new(base, |s: &State| {
        let n = s.q.len();
        if !gamma.in_domain(s.t, &s.q) {
            return vec![f64::NAN; 2 * n];
        }
        let lifted = gamma.lift(&layout, s.t, &s.q);
        match sys.vector_field(&lifted) {
            Ok(x) => {
                let mut out = x[qr.clone()].to_vec();
                out.resize(2 * n, 0.0);
                out
            }
            Err(_) => vec![f64::NAN; 2 * n],
        }
    });
    let left = |e: IntegratorError| match e.root() {
        IntegratorError::NonFinite { t } => HamJacError::LeftDomain(*t),
        _ => HamJacError::Integrator(e),
    };
    let sigma0 = State::new(t0, q0.to_vec(), vec![0.0; sys.n], None);
    let lift0 = gamma.lift(&layout, t0, q0);
    let full_ref = reference_solve(sys, &lift0, t_end)?;
    let proj_ref = reference_solve(&projected_field, &sigma0, t_end).map_err(left)?;
    // Both sides on the finer of the two converged steps, so samples align.
    let dt = full_ref.meta.dt.min(proj_ref.meta.dt);
    let full = if full_ref.meta.dt > dt { integrate_field(sys, &lift0, dt, t_end, "full", None)? } else { full_ref };
    let projected = if proj_ref.meta.dt > dt {
        integrate_field(&projected_field, &sigma0, dt, t_end, "projected", None).map_err(left)?
    } else {
        proj_ref
    };
    let mut deviation: f64 = 0.0;
    for (a, b) in projected.samples.iter().zip(&full.samples) {
        let lifted = gamma.lift(&layout, a.t, &a.q).to_flat(&layout);
        let target = b.to_flat(&layout);
        for (x, y) in lifted.iter().zip(&target) {
            deviation = deviation.max((x - y).abs());
        }
    }
    Ok(GammaRelated { deviation, dt, samples: full.len(), projected, full })
}
