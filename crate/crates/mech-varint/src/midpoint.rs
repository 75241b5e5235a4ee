use std::sync::Arc;

use mech_core::{Flavor, MechError, ScalarField, State, SystemDef};

use crate::error::{Result, VarintError};
use crate::lagrangian::{DiscreteLagrangian, DiscreteRayleigh};

type QvFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

fn mid(q0: &[f64], q1: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let qm = q0.iter().zip(q1).map(|(a, b)| 0.5 * (a + b)).collect();
    let v = q0.iter().zip(q1).map(|(a, b)| (b - a) / h).collect();
    (qm, v)
}

fn combine(a: &[f64], ca: f64, b: &[f64], cb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| ca * a + cb * b).collect()
}

/// Midpoint discretization of a forced Lagrangian `L(q,v)` with force
/// one-form `α(q,v)` (the equations being `d/dt ∂L/∂v − ∂L/∂q = −α`).
///
/// `dl` optionally supplies `(∂L/∂q, ∂L/∂v)`; without it the partials of
/// `L_d` are differenced.
pub fn midpoint_from_lagrangian(
    n: usize,
    h: f64,
    l: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    dl: Option<Arc<dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>>,
    alpha: Option<QvFn>,
) -> Result<DiscreteLagrangian> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(VarintError::InvalidStep(h));
    }
    let mut out = DiscreteLagrangian::new(n, h, move |q0, q1| {
        let (qm, v) = mid(q0, q1, h);
        h * l(&qm, &v)
    });
    if let Some(dl) = dl {
        let dl2 = dl.clone();
        out = out.with_partials(
            move |q0, q1| {
                let (qm, v) = mid(q0, q1, h);
                let (lq, lv) = dl(&qm, &v);
                combine(&lq, 0.5 * h, &lv, -1.0)
            },
            move |q0, q1| {
                let (qm, v) = mid(q0, q1, h);
                let (lq, lv) = dl2(&qm, &v);
                combine(&lq, 0.5 * h, &lv, 1.0)
            },
        );
    }
    if let Some(alpha) = alpha {
        let a2 = alpha.clone();
        out = out.with_forces(
            move |q0, q1| {
                let (qm, v) = mid(q0, q1, h);
                alpha(&qm, &v).into_iter().map(|a| -0.5 * h * a).collect()
            },
            move |q0, q1| {
                let (qm, v) = mid(q0, q1, h);
                a2(&qm, &v).into_iter().map(|a| -0.5 * h * a).collect()
            },
        );
    }
    Ok(out)
}

/// Midpoint rule for a mechanical Rayleigh system: `L = ½vᵀg(q)v − V(q)`
/// with force `α = ∂R/∂v`.
pub fn midpoint_discretize(sys: &SystemDef, h: f64) -> Result<DiscreteLagrangian> {
    let Flavor::MechanicalRayleigh { metric, potential, rayleigh } = &sys.flavor else {
        return Err(MechError::WrongFlavor { expected: "mechanical Rayleigh", got: sys.flavor.name() }.into());
    };
    let n = sys.n;
    let (g, pot) = (metric.clone(), potential.clone());
    let l = move |q: &[f64], v: &[f64]| {
        let gm = g.at(q);
        let mut t = 0.0;
        for i in 0..n {
            for j in 0..n {
                t += 0.5 * v[i] * gm[(i, j)] * v[j];
            }
        }
        t - pot.eval(&State::symplectic(q.to_vec(), v.to_vec()))
    };
    let (g, pot) = (metric.clone(), potential.clone());
    let dl = move |q: &[f64], v: &[f64]| {
        let gm = g.at(q);
        let vq = pot.gradient(&State::symplectic(q.to_vec(), v.to_vec()));
        let lq = (0..n)
            .map(|k| {
                let dg = g.derivative(q, k);
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += 0.5 * v[i] * dg[(i, j)] * v[j];
                    }
                }
                s - vq.dq()[k]
            })
            .collect();
        let lv = (0..n).map(|i| (0..n).map(|j| gm[(i, j)] * v[j]).sum()).collect();
        (lq, lv)
    };
    let ray = rayleigh.clone();
    let alpha: QvFn = Arc::new(move |q, v| ray.gradient(&State::symplectic(q.to_vec(), v.to_vec())).dm().to_vec());
    midpoint_from_lagrangian(n, h, l, Some(Arc::new(dl)), Some(alpha))
}

/// Deterministic probe configurations spread over `[-1.5, 1.5]`.
pub(crate) fn probe_points(n: usize, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..count)
        .map(|k| {
            let c = |i: usize, off: f64| 1.5 * ((k * 7 + i * 3) as f64 * 0.913 + off).sin();
            ((0..n).map(|i| c(i, 0.17)).collect(), (0..n).map(|i| c(i, 1.31)).collect())
        })
        .collect()
}

/// `R_d(q₀,q₁) = (h²/2) R((q₀+q₁)/2, (q₁−q₀)/h)` for a velocity-only `R`.
pub fn midpoint_rayleigh(r: &ScalarField, h: f64) -> Result<DiscreteRayleigh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(VarintError::InvalidStep(h));
    }
    let n = r.layout().n;
    for (q, v) in probe_points(n, 8) {
        let g = r.gradient(&State::symplectic(q, v));
        let scale = g.values.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let rq = g.dq().iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if rq > 1e-8 * scale {
            return Err(VarintError::ConfigurationDependent(rq));
        }
    }
    let (r0, r1, r2) = (r.clone(), r.clone(), r.clone());
    let at = move |q0: &[f64], q1: &[f64]| {
        let (qm, v) = mid(q0, q1, h);
        State::symplectic(qm, v)
    };
    Ok(DiscreteRayleigh::new(n, move |q0, q1| 0.5 * h * h * r0.eval(&at(q0, q1))).with_partials(
        move |q0, q1| {
            let g = r1.gradient(&at(q0, q1));
            combine(g.dq(), 0.25 * h * h, g.dm(), -0.5 * h)
        },
        move |q0, q1| {
            let g = r2.gradient(&at(q0, q1));
            combine(g.dq(), 0.25 * h * h, g.dm(), 0.5 * h)
        },
    ))
}
