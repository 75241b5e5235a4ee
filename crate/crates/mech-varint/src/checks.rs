use mech_core::fd_step;

use crate::lagrangian::DiscreteLagrangian;
use crate::solve::discrete_legendre;

/// Outcome of [`rayleighable_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct RayleighCheck {
    pub rayleighable: bool,
    pub residual: f64,
}

const RAYLEIGHABLE_TOL: f64 = 1e-6;

/// `∂f_i/∂(q_side)_j` by central differences; `side` 0 for `q₀`, 1 for `q₁`.
fn jac(f: &dyn Fn(&[f64], &[f64]) -> Vec<f64>, q0: &[f64], q1: &[f64], side: usize) -> Vec<Vec<f64>> {
    let n = q0.len();
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        let x = if side == 0 { q0[j] } else { q1[j] };
        let h = fd_step(x) * 10.0;
        let (mut a0, mut a1, mut b0, mut b1) = (q0.to_vec(), q1.to_vec(), q0.to_vec(), q1.to_vec());
        if side == 0 {
            a0[j] += h;
            b0[j] -= h;
        } else {
            a1[j] += h;
            b1[j] -= h;
        }
        let (fp, fm) = (f(&a0, &a1), f(&b0, &b1));
        for i in 0..n {
            out[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

/// Tests whether the discrete force one-form `f⁻ dq₀ + f⁺ dq₁` comes from a
/// discrete Rayleigh potential (`f⁺ = −D₂R_d`, `f⁻ = D₁R_d`), i.e. whether
/// `ω = f⁻ dq₀ − f⁺ dq₁` is closed at the probe pairs.
///
/// In one dimension the residual is `|D₁f⁺ + D₂f⁻|`; in higher dimension it
/// also includes the asymmetry of `D₁f⁻` and `D₂f⁺`.
pub fn rayleighable_check(dl: &DiscreteLagrangian, probes: &[(Vec<f64>, Vec<f64>)]) -> RayleighCheck {
    let n = dl.n;
    let fp = |a: &[f64], b: &[f64]| dl.fplus(a, b);
    let fm = |a: &[f64], b: &[f64]| dl.fminus(a, b);
    let mut residual: f64 = 0.0;
    for (q0, q1) in probes {
        let d1fp = jac(&fp, q0, q1, 0);
        let d2fp = jac(&fp, q0, q1, 1);
        let d1fm = jac(&fm, q0, q1, 0);
        let d2fm = jac(&fm, q0, q1, 1);
        for i in 0..n {
            for j in 0..n {
                residual = residual.max((d1fp[j][i] + d2fm[i][j]).abs());
                residual = residual.max((d1fm[i][j] - d1fm[j][i]).abs());
                residual = residual.max((d2fp[i][j] - d2fp[j][i]).abs());
            }
        }
    }
    RayleighCheck { rayleighable: residual < RAYLEIGHABLE_TOL, residual }
}

/// Drift report of [`discrete_noether_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct NoetherReport {
    /// `max |ζ(L_d) + f_d(ζ)|` over the trajectory pairs.
    pub precondition_residual: f64,
    pub precondition_holds: bool,
    /// `J(q_k, q_{k+1}) = ⟨p⁺(q_k,q_{k+1}), ζ(q_{k+1})⟩`; empty when skipped.
    pub momenta: Vec<f64>,
    /// `max |J − J₀|`, or `None` when the precondition failed and the
    /// conservation check was skipped.
    pub drift: Option<f64>,
}

const NOETHER_PRE_TOL: f64 = 1e-8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Discrete forced Noether check for the generator `ζ` along DEL iterates.
///
/// The invariance condition `D₁L_d·ζ(q₀) + D₂L_d·ζ(q₁) + f⁻·ζ(q₀) + f⁺·ζ(q₁) = 0`
/// is tested on every consecutive pair; only when it holds is the drift of
/// the discrete momentum map reported.
pub fn discrete_noether_check(
    dl: &DiscreteLagrangian,
    zeta: impl Fn(&[f64]) -> Vec<f64>,
    qs: &[Vec<f64>],
) -> NoetherReport {
    let mut pre: f64 = 0.0;
    for w in qs.windows(2) {
        let (q0, q1) = (&w[0], &w[1]);
        let (z0, z1) = (zeta(q0), zeta(q1));
        let v = dot(&dl.d1ld(q0, q1), &z0) + dot(&dl.d2ld(q0, q1), &z1) + dot(&dl.fminus(q0, q1), &z0)
            + dot(&dl.fplus(q0, q1), &z1);
        let scale = dot(&dl.d2ld(q0, q1), &z1).abs().max(1.0);
        pre = pre.max(v.abs() / scale);
    }
    let holds = pre < NOETHER_PRE_TOL;
    if !holds {
        return NoetherReport { precondition_residual: pre, precondition_holds: false, momenta: vec![], drift: None };
    }
    let momenta: Vec<f64> = qs
        .windows(2)
        .map(|w| {
            let (_, pp) = discrete_legendre(dl, &w[0], &w[1]);
            dot(&pp, &zeta(&w[1]))
        })
        .collect();
    let j0 = momenta.first().copied().unwrap_or(0.0);
    let drift = momenta.iter().fold(0.0f64, |a, j| a.max((j - j0).abs()));
    NoetherReport { precondition_residual: pre, precondition_holds: true, momenta, drift: Some(drift) }
}
