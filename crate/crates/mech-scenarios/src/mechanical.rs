//! Variational scenarios: Rayleigh-damped mechanical systems and the
//! rotational discrete Noether example.

use mech_core::{Layout, Metric, ScalarField, State, SystemDef};
use mech_integrators::{integrate, reference_solve, Trajectory};
use mech_varint::{
    del_trajectory, discrete_legendre, discrete_noether_check, exact_discrete_damped_oscillator, initial_second_point,
    DiscreteLagrangian, DiscreteRayleigh,
};

use crate::check::{Check, CheckKind};
use crate::config::{IntegratorKind, RunConfig};
use crate::error::Result;
use crate::registry::Run;
use crate::support::{discrete_steps, max_abs, midpoint_run, midpoint_states, on_grid, rk4_run, trajectory_of};

fn quadratic_rayleigh(n: usize, r: f64) -> ScalarField {
    ScalarField::new(Layout::symplectic(n), move |s| 0.5 * r * s.m.iter().map(|v| v * v).sum::<f64>()).with_grad(move |s| {
        let mut g = vec![0.0; n];
        g.extend(s.m.iter().map(|v| r * v));
        g
    })
}

fn oscillator(m: f64, k: f64, r: f64) -> SystemDef {
    let v = ScalarField::new(Layout::symplectic(1), move |s| 0.5 * k * s.q[0] * s.q[0]).with_grad(move |s| vec![k * s.q[0], 0.0]);
    SystemDef::mechanical(1, Metric::diagonal(&[m]), v, quadratic_rayleigh(1, r))
}

/// `q(0) = 1`, `q̇(0) = 0`, underdamped.
fn oscillator_closed_form(m: f64, k: f64, r: f64, t: f64) -> (f64, f64) {
    let a = r / (2.0 * m);
    let b = (4.0 * k * m - r * r).sqrt() / (2.0 * m);
    let e = (-a * t).exp();
    (e * ((b * t).cos() + a / b * (b * t).sin()), -e * (a * a / b + b) * (b * t).sin())
}

struct Oscillator {
    m: f64,
    k: f64,
    r: f64,
}

impl Oscillator {
    fn from(cfg: &RunConfig) -> Self {
        Self { m: cfg.param("m"), k: cfg.param("k"), r: cfg.param("r") }
    }

    fn system(&self) -> SystemDef {
        oscillator(self.m, self.k, self.r)
    }

    fn energy(&self, s: &State) -> f64 {
        0.5 * self.m * s.m[0] * s.m[0] + 0.5 * self.k * s.q[0] * s.q[0]
    }
}

fn s_rest() -> State {
    State::symplectic(vec![1.0], vec![0.0])
}

/// DEL iterates of the exact discrete Lagrangian from `q₀ = 1`, `p₀ = 0`,
/// with velocities recovered from the right discrete Legendre transform.
fn exact_discrete_states(osc: &Oscillator, h: f64, steps: usize) -> Result<(Vec<State>, DiscreteLagrangian, DiscreteRayleigh)> {
    let (dl, rd) = exact_discrete_damped_oscillator(osc.m, osc.k, osc.r, h)?;
    let q1 = initial_second_point(&dl, &[1.0], &[0.0], None)?;
    let qs = del_trajectory(&dl, &[1.0], &q1, steps.saturating_sub(1))?;
    let mut out = Vec::with_capacity(qs.len());
    let (p0, _) = discrete_legendre(&dl, &qs[0], &qs[1]);
    out.push(State::new(0.0, qs[0].clone(), vec![p0[0] / osc.m], None));
    for (i, w) in qs.windows(2).enumerate() {
        let (_, pp) = discrete_legendre(&dl, &w[0], &w[1]);
        out.push(State::new((i + 1) as f64 * h, w[1].clone(), vec![pp[0] / osc.m], None));
    }
    Ok((out, dl, rd))
}

pub(crate) fn damped_oscillator_simulate(cfg: &RunConfig) -> Result<Run> {
    let osc = Oscillator::from(cfg);
    let sys = osc.system();
    match cfg.integrator {
        IntegratorKind::ExactDiscrete => {
            let (states, _, _) = exact_discrete_states(&osc, cfg.dt, discrete_steps(cfg, 0.0))?;
            Ok(Run::smooth(trajectory_of(sys.layout(), states, "damped_oscillator", cfg.dt, "exact-discrete")))
        }
        IntegratorKind::MidpointVar => midpoint_run(&sys, &s_rest(), cfg, "damped_oscillator"),
        IntegratorKind::Rk4 => rk4_run(&sys, &s_rest(), cfg, "damped_oscillator"),
    }
}

fn closed_form_gap(osc: &Oscillator, states: &[State]) -> (f64, f64) {
    let mut gq: f64 = 0.0;
    let mut gv: f64 = 0.0;
    for s in states {
        let (q, v) = oscillator_closed_form(osc.m, osc.k, osc.r, s.t);
        gq = gq.max((s.q[0] - q).abs());
        gv = gv.max((s.m[0] - v).abs());
    }
    (gq, gv)
}

pub(crate) fn damped_oscillator_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let osc = Oscillator::from(cfg);
    let sys = osc.system();
    let steps = discrete_steps(cfg, 0.0);
    let (states, dl, rd) = exact_discrete_states(&osc, cfg.dt, steps)?;
    let (gq, gv) = closed_form_gap(&osc, &states);
    let mut force_gap: f64 = 0.0;
    for w in states.windows(2) {
        let (a, b) = (&w[0].q, &w[1].q);
        force_gap = force_gap.max((dl.fplus(a, b)[0] - rd.fplus(a, b)[0]).abs());
        force_gap = force_gap.max((dl.fminus(a, b)[0] - rd.fminus(a, b)[0]).abs());
    }
    let monotone = states.windows(2).all(|w| osc.energy(&w[1]) <= osc.energy(&w[0]) + 1e-14);

    // Global error under step halving, over the common grid.
    let midpoint_err = |h: f64, n: usize| -> Result<f64> {
        let st = midpoint_states(&sys, &s_rest(), h, n)?;
        Ok(closed_form_gap(&osc, &st).0)
    };
    let rk4_err = |h: f64| -> Result<f64> {
        let tr = integrate(&sys, &s_rest(), h, steps as f64 * cfg.dt, None)?;
        Ok(closed_form_gap(&osc, &tr.samples).0)
    };
    let (m1, m2) = (midpoint_err(cfg.dt, steps)?, midpoint_err(cfg.dt / 2.0, 2 * steps)?);
    let (r1, r2) = (rk4_err(cfg.dt)?, rk4_err(cfg.dt / 2.0)?);

    Ok(vec![
        Check::below("exact-discrete positions vs closed form", CheckKind::ClosedForm, gq, 1e-9),
        Check::below("exact-discrete velocities vs closed form", CheckKind::ClosedForm, gv, 1e-9),
        Check::below("exact discrete forces from the discrete Rayleigh potential", CheckKind::Identity, force_gap, 1e-12),
        Check::flag("exact-discrete energy is non-increasing", CheckKind::Dissipated, monotone),
        Check::report("midpoint max position error", m1),
        Check::below("midpoint error ratio under step halving, distance from 4", CheckKind::Order, (m1 / m2 - 4.0).abs(), 0.5),
        Check::report("rk4 max position error", r1),
        Check::below("rk4 error ratio under step halving, distance from 16", CheckKind::Order, (r1 / r2 - 16.0).abs(), 3.0),
    ])
}

/// Rows `(t, E_midpoint, E_rk4, E_reference)` on the midpoint grid.
fn energy_table(sys: &SystemDef, s0: &State, cfg: &RunConfig, energy: impl Fn(&State) -> f64) -> Result<Vec<[f64; 4]>> {
    let steps = discrete_steps(cfg, s0.t);
    let t_end = s0.t + steps as f64 * cfg.dt;
    let mid = midpoint_states(sys, s0, cfg.dt, steps)?;
    let rk = integrate(sys, s0, cfg.dt, t_end, None)?;
    let reference = reference_solve(sys, s0, t_end)?;
    Ok(mid
        .iter()
        .zip(&rk.samples)
        .map(|(a, b)| [a.t, energy(a), energy(b), energy(on_grid(&reference, a.t))])
        .collect())
}

pub(crate) fn damped_oscillator_compare(cfg: &RunConfig) -> Result<Vec<[f64; 4]>> {
    let osc = Oscillator::from(cfg);
    energy_table(&osc.system(), &s_rest(), cfg, |s| osc.energy(s))
}

/// `V = |q|²(|q|² − 1)²` in the plane.
fn double_well(k: f64) -> SystemDef {
    let v = ScalarField::new(Layout::symplectic(2), |s| {
        let r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
        r2 * (r2 - 1.0).powi(2)
    })
    .with_grad(|s| {
        let r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
        let d = 2.0 * (r2 - 1.0) * (3.0 * r2 - 1.0);
        vec![d * s.q[0], d * s.q[1], 0.0, 0.0]
    });
    SystemDef::mechanical(2, Metric::identity(2), v, quadratic_rayleigh(2, k))
}

fn double_well_energy(s: &State) -> f64 {
    let r2 = s.q[0] * s.q[0] + s.q[1] * s.q[1];
    0.5 * (s.m[0] * s.m[0] + s.m[1] * s.m[1]) + r2 * (r2 - 1.0).powi(2)
}

/// Start on the `q²` axis with `v = (1/2, 0)` and total energy `11/40`,
/// so that the potential there is `3/20`; of the roots of
/// `s(s − 1)² = 3/20` the one outside the inner well is taken.
fn double_well_start() -> State {
    let f = |s: f64| s * (s - 1.0).powi(2) - 0.15;
    let (mut lo, mut hi) = (1.0, 1.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    State::symplectic(vec![0.0, (0.5 * (lo + hi)).sqrt()], vec![0.5, 0.0])
}

pub(crate) fn double_well_simulate(cfg: &RunConfig) -> Result<Run> {
    let sys = double_well(cfg.param("k"));
    match cfg.integrator {
        IntegratorKind::Rk4 => rk4_run(&sys, &double_well_start(), cfg, "double_well_rayleigh"),
        _ => midpoint_run(&sys, &double_well_start(), cfg, "double_well_rayleigh"),
    }
}

pub(crate) fn double_well_compare(cfg: &RunConfig) -> Result<Vec<[f64; 4]>> {
    energy_table(&double_well(cfg.param("k")), &double_well_start(), cfg, double_well_energy)
}

/// `max` of `|E_method − E_reference|` on the first and second halves.
fn halves(rows: &[[f64; 4]], col: usize) -> (f64, f64) {
    let t_mid = 0.5 * (rows[0][0] + rows[rows.len() - 1][0]);
    let (mut a, mut b): (f64, f64) = (0.0, 0.0);
    for r in rows {
        let e = (r[col] - r[3]).abs();
        if r[0] <= t_mid {
            a = a.max(e);
        }
        if r[0] >= t_mid {
            b = b.max(e);
        }
    }
    (a, b)
}

pub(crate) fn double_well_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let k = cfg.param("k");
    let sys = double_well(k);
    let s0 = double_well_start();
    let rows = double_well_compare(cfg)?;
    let (ma, mb) = halves(&rows, 1);
    let (ra, rb) = halves(&rows, 2);

    // Energy balance along the reference: E(t) + ∫ k|v|² = E(0).
    let steps = discrete_steps(cfg, 0.0);
    let reference = reference_solve(&sys, &s0, steps as f64 * cfg.dt)?;
    let rate = |s: &State| k * (s.m[0] * s.m[0] + s.m[1] * s.m[1]);
    let (mut lost, mut balance): (f64, f64) = (0.0, 0.0);
    let e0 = double_well_energy(&s0);
    for w in reference.samples.windows(2) {
        lost += 0.5 * (w[1].t - w[0].t) * (rate(&w[0]) + rate(&w[1]));
        balance = balance.max((double_well_energy(&w[1]) + lost - e0).abs());
    }
    let e_end = rows[rows.len() - 1][3];

    Ok(vec![
        Check::below("initial energy equals 11/40", CheckKind::ClosedForm, (e0 - 11.0 / 40.0).abs(), 1e-14),
        Check::report("midpoint max energy error, first half", ma),
        Check::report("midpoint max energy error, second half", mb),
        Check::below("midpoint energy error growth (second half over first half)", CheckKind::Order, mb / ma, 2.0),
        Check::report("rk4 max energy error, first half", ra),
        Check::report("rk4 max energy error, second half", rb),
        Check::report("rk4 energy error growth (second half over first half)", rb / ra),
        Check::below("reference energy balance E + dissipated work", CheckKind::Dissipated, balance, 1e-6),
        Check::flag("energy decays over the run", CheckKind::Dissipated, e_end < e0),
    ])
}

struct Drag {
    m: f64,
    k: f64,
    v0: f64,
}

impl Drag {
    fn from(cfg: &RunConfig) -> Self {
        Self { m: cfg.param("m"), k: cfg.param("k"), v0: cfg.param("v0") }
    }

    /// `R = k v³/3`, so that `m v̇ = −k v²` for `v > 0`.
    fn system(&self) -> SystemDef {
        let k = self.k;
        let l = Layout::symplectic(1);
        let zero = ScalarField::new(l, |_| 0.0).with_grad(|_| vec![0.0, 0.0]);
        let ray = ScalarField::new(l, move |s| k * s.m[0].powi(3) / 3.0).with_grad(move |s| vec![0.0, k * s.m[0] * s.m[0]]);
        SystemDef::mechanical(1, Metric::diagonal(&[self.m]), zero, ray)
    }

    fn start(&self) -> State {
        State::symplectic(vec![0.0], vec![self.v0])
    }

    fn invariant(&self, s: &State) -> f64 {
        self.m * (self.k * s.q[0] / self.m).exp() * s.m[0]
    }

    fn closed_form(&self, t: f64) -> (f64, f64) {
        let u = 1.0 + self.k * self.v0 * t / self.m;
        (self.m / self.k * u.ln(), self.v0 / u)
    }
}

pub(crate) fn drag_simulate(cfg: &RunConfig) -> Result<Run> {
    let d = Drag::from(cfg);
    match cfg.integrator {
        IntegratorKind::MidpointVar => midpoint_run(&d.system(), &d.start(), cfg, "drag_particle"),
        _ => rk4_run(&d.system(), &d.start(), cfg, "drag_particle"),
    }
}

pub(crate) fn drag_compare(cfg: &RunConfig) -> Result<Vec<[f64; 4]>> {
    let d = Drag::from(cfg);
    energy_table(&d.system(), &d.start(), cfg, |s| 0.5 * d.m * s.m[0] * s.m[0])
}

fn invariant_drift(traj: &Trajectory, f: impl Fn(&State) -> f64) -> f64 {
    let f0 = f(&traj.samples[0]);
    max_abs(traj.samples.iter().map(|s| f(s) - f0))
}

pub(crate) fn drag_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let d = Drag::from(cfg);
    let sys = d.system();
    let reference = reference_solve(&sys, &d.start(), cfg.t_end)?;
    let run = drag_simulate(cfg)?.trajectory;
    let mut gap: f64 = 0.0;
    for s in &reference.samples {
        let (q, v) = d.closed_form(s.t);
        gap = gap.max((s.q[0] - q).abs()).max((s.m[0] - v).abs());
    }
    Ok(vec![
        Check::below("m e^(kq/m) v conserved along the reference", CheckKind::Conserved, invariant_drift(&reference, |s| d.invariant(s)), 1e-7),
        Check::report("m e^(kq/m) v drift along the configured run", invariant_drift(&run, |s| d.invariant(s))),
        Check::below("reference vs closed form", CheckKind::ClosedForm, gap, 1e-9),
        Check::at_least("velocity is not conserved", CheckKind::Property, invariant_drift(&reference, |s| s.m[0]), 0.5),
    ])
}

/// Midpoint polar Lagrangian with `V(r) = r²/2`, forced by the discrete
/// Rayleigh potential `k h (r₁ − r₀)²/4 + ε sin(θ₀ + θ₁)`.
fn polar_system(h: f64, k: f64, eps: f64) -> DiscreteLagrangian {
    let ld = move |a: &[f64], b: &[f64]| {
        let (r1, t1, r2, t2) = (a[0], a[1], b[0], b[1]);
        let rm = 0.5 * (r1 + r2);
        h / 2.0 * ((r2 - r1) / h).powi(2) + h / 2.0 * rm * rm * ((t2 - t1) / h).powi(2) - h * rm * rm / 2.0
    };
    let f = move |a: &[f64], b: &[f64]| k * h / 4.0 * (b[0] - a[0]).powi(2) + eps * (a[1] + b[1]).sin();
    let rd = DiscreteRayleigh::new(2, f).with_partials(
        move |a, b| vec![-k * h / 2.0 * (b[0] - a[0]), eps * (a[1] + b[1]).cos()],
        move |a, b| vec![k * h / 2.0 * (b[0] - a[0]), eps * (a[1] + b[1]).cos()],
    );
    let d1 = move |a: &[f64], b: &[f64]| {
        let rm = 0.5 * (a[0] + b[0]);
        let w = (b[1] - a[1]) / h;
        vec![-(b[0] - a[0]) / h + h / 2.0 * rm * w * w - h * rm / 2.0, -rm * rm * w]
    };
    let d2 = move |a: &[f64], b: &[f64]| {
        let rm = 0.5 * (a[0] + b[0]);
        let w = (b[1] - a[1]) / h;
        vec![(b[0] - a[0]) / h + h / 2.0 * rm * w * w - h * rm / 2.0, rm * rm * w]
    };
    DiscreteLagrangian::new(2, h, ld).with_partials(d1, d2).with_rayleigh(&rd)
}

const POLAR_Q0: [f64; 2] = [1.0, 0.0];
const POLAR_Q1: [f64; 2] = [1.01, 0.05];

fn polar_iterates(cfg: &RunConfig) -> Result<(DiscreteLagrangian, Vec<Vec<f64>>)> {
    let dl = polar_system(cfg.dt, cfg.param("k"), cfg.param("eps"));
    let steps = discrete_steps(cfg, 0.0);
    let qs = del_trajectory(&dl, &POLAR_Q0, &POLAR_Q1, steps.saturating_sub(1))?;
    Ok((dl, qs))
}

pub(crate) fn noether_simulate(cfg: &RunConfig) -> Result<Run> {
    let (dl, qs) = polar_iterates(cfg)?;
    let mut states = Vec::with_capacity(qs.len());
    let (p0, _) = discrete_legendre(&dl, &qs[0], &qs[1]);
    states.push(State::symplectic(qs[0].clone(), p0));
    for (i, w) in qs.windows(2).enumerate() {
        let (_, pp) = discrete_legendre(&dl, &w[0], &w[1]);
        states.push(State::new((i + 1) as f64 * cfg.dt, w[1].clone(), pp, None));
    }
    Ok(Run::smooth(trajectory_of(Layout::symplectic(2), states, "rotational_noether", cfg.dt, "midpoint-var")))
}

pub(crate) fn noether_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (dl, qs) = polar_iterates(cfg)?;
    let (h, eps) = (cfg.dt, cfg.param("eps"));
    let rep = discrete_noether_check(&dl, |_| vec![0.0, 1.0], &qs);
    let mut out = vec![Check::below("rotation leaves L_d + forces invariant", CheckKind::Identity, rep.precondition_residual, 1e-8)];
    match rep.drift {
        Some(drift) => {
            let (a, b) = (&qs[0], &qs[1]);
            let closed = (0.5 * (a[0] + b[0])).powi(2) * (b[1] - a[1]) / h - eps * (a[1] + b[1]).cos();
            out.push(Check::below("discrete momentum map drift", CheckKind::Conserved, drift, 1e-10));
            out.push(Check::below("momentum map vs closed form", CheckKind::ClosedForm, (rep.momenta[0] - closed).abs(), 1e-12));
            out.push(Check::at_least("DEL steps", CheckKind::Event, rep.momenta.len() as f64, 1.0));
        }
        None => out.push(Check::flag("discrete momentum map drift", CheckKind::Conserved, false)),
    }
    let radial = discrete_noether_check(&dl, |_| vec![1.0, 0.0], &qs);
    out.push(Check::at_least("radial translation is not a symmetry", CheckKind::Property, radial.precondition_residual, 1e-6));
    Ok(out)
}
