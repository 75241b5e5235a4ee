use mech_core::{mechanical_legendre, mechanical_legendre_inverse, Layout, State, SystemDef};
use mech_integrators::{integrate, Trajectory, TrajectoryMeta};
use mech_varint::{discrete_hamiltonian_flow, midpoint_discretize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::registry::Run;

pub(crate) fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a: f64, b| a.max(b.abs()))
}

pub(crate) fn trajectory_of(layout: Layout, states: Vec<State>, id: &str, dt: f64, integrator: &str) -> Trajectory {
    let mut it = states.into_iter();
    let s0 = it.next().expect("at least one state");
    let meta = TrajectoryMeta { system_id: id.into(), dt, integrator: integrator.into() };
    let mut traj = Trajectory::new(layout, s0, meta);
    for s in it {
        traj.push(s);
    }
    traj
}

/// Fixed steps of size `dt` that fit in `[t0, t_end]`.
pub(crate) fn discrete_steps(cfg: &RunConfig, t0: f64) -> usize {
    (((cfg.t_end - t0) / cfg.dt) + 1e-9).floor().max(1.0) as usize
}

pub(crate) fn rk4_run(sys: &SystemDef, s0: &State, cfg: &RunConfig, id: &str) -> Result<Run> {
    let mut traj = integrate(sys, s0, cfg.dt, cfg.t_end, None)?;
    traj.meta.system_id = id.into();
    Ok(Run::smooth(traj))
}

/// Variational midpoint flow of a mechanical system, stored with
/// velocities in `m`.
pub(crate) fn midpoint_states(sys: &SystemDef, s0: &State, dt: f64, steps: usize) -> Result<Vec<State>> {
    let dl = midpoint_discretize(sys, dt)?;
    let mut p = mechanical_legendre(sys, s0)?;
    let mut q = s0.q.clone();
    let mut out = vec![s0.clone()];
    for k in 1..=steps {
        let (q1, p1) = discrete_hamiltonian_flow(&dl, &q, &p)?;
        let v = mechanical_legendre_inverse(sys, &q1, &p1)?;
        out.push(State::new(s0.t + k as f64 * dt, q1.clone(), v, None));
        q = q1;
        p = p1;
    }
    Ok(out)
}

pub(crate) fn midpoint_run(sys: &SystemDef, s0: &State, cfg: &RunConfig, id: &str) -> Result<Run> {
    let states = midpoint_states(sys, s0, cfg.dt, discrete_steps(cfg, s0.t))?;
    Ok(Run::smooth(trajectory_of(sys.layout(), states, id, cfg.dt, "midpoint-var")))
}

/// Sample of a fine reference trajectory at time `t`, which must lie on
/// its grid.
pub(crate) fn on_grid(reference: &Trajectory, t: f64) -> &State {
    let s = reference.at_time(t);
    debug_assert!((s.t - t).abs() < 1e-6 * reference.meta.dt.max(1e-12) + 1e-9);
    s
}
