use mech_core::{Flavor, Layout, MechError, ScalarField, State, SystemDef};
use mech_integrators::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DiagnosticsError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovVerdict {
    /// Smallest `V = Σ f_i²` seen in the punctured ball.
    pub min_v: f64,
    /// Largest `X_H(V)` seen in the punctured ball.
    pub max_vdot: f64,
    pub v_positive: bool,
    pub vdot_negative: bool,
    /// Every sampled trajectory ends much closer to `x0` than it started.
    pub trajectories_contract: bool,
    pub consistent: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn offset(layout: &Layout, x0: &[f64], d: &[f64], t: f64) -> State {
    let x: Vec<f64> = x0.iter().zip(d).map(|(a, b)| a + b).collect();
    State::from_flat(layout, &x, t)
}

/// Probes whether `V = Σ f_i²` built from dissipated quantities behaves as
/// a strict Lyapunov function near the equilibrium `x0`.
///
/// Points are drawn from the punctured ball of the given radius; ten of
/// them are also integrated forward and must contract toward `x0`.
pub fn lyapunov_probe(
    sys: &SystemDef,
    x0: &State,
    fs: &[ScalarField],
    radius: f64,
    n_samples: usize,
    seed: u64,
) -> Result<LyapunovVerdict> {
    let Flavor::Contact { h } = &sys.flavor else {
        return Err(MechError::WrongFlavor { expected: "contact", got: sys.flavor.name() }.into());
    };
    let layout = sys.layout();
    x0.check(&layout)?;
    let mut failures = Vec::new();
    let xh = norm(&sys.vector_field(x0)?);
    if xh >= 1e-10 {
        failures.push(format!("|X_H(x0)| = {xh:e} is not zero"));
    }
    for (i, f) in fs.iter().enumerate() {
        let v = f.eval(x0);
        if v.abs() >= 1e-10 {
            failures.push(format!("f_{i}(x0) = {v:e} is not zero"));
        }
    }
    let rh = h.gradient(x0).dz();
    if rh <= 0.0 {
        failures.push(format!("R(H)(x0) = {rh} is not positive"));
    }
    if !failures.is_empty() {
        return Err(DiagnosticsError::Precondition(failures));
    }

    let c = x0.to_flat(&layout);
    let d = c.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_samples);
    while points.len() < n_samples {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-radius..radius)).collect();
        let r = norm(&v);
        if r > 0.0 && r <= radius {
            points.push(v);
        }
    }

    let (mut min_v, mut max_vdot) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &points {
        let s = offset(&layout, &c, p, x0.t);
        let field = sys.vector_field(&s)?;
        let (mut v, mut vdot) = (0.0, 0.0);
        for f in fs {
            let fv = f.eval(&s);
            let g = f.gradient(&s).values;
            v += fv * fv;
            vdot += 2.0 * fv * g.iter().zip(&field).map(|(a, b)| a * b).sum::<f64>();
        }
        min_v = min_v.min(v);
        max_vdot = max_vdot.max(vdot);
    }

    let mut contract = true;
    for p in points.iter().take(10) {
        let s = offset(&layout, &c, p, x0.t);
        let traj = integrate(sys, &s, 1e-2, x0.t + 20.0, None)?;
        let dist = |s: &State| {
            let x = s.to_flat(&layout);
            norm(&x.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let d0 = dist(&s);
        let second_half = &traj.samples[traj.len() / 2..];
        let worst_late = second_half.iter().map(dist).fold(0.0, f64::max);
        let end = dist(traj.final_state());
        if !(end < 0.1 * d0 && worst_late < d0) {
            contract = false;
        }
    }

    let v_positive = min_v > 0.0;
    let vdot_negative = max_vdot < 0.0;
    Ok(LyapunovVerdict {
        min_v,
        max_vdot,
        v_positive,
        vdot_negative,
        trajectories_contract: contract,
        consistent: v_positive && vdot_negative && contract,
    })
}
