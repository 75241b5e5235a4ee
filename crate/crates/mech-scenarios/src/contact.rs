//! Contact and cocontact scenarios: dissipation through the action
//! variable, contact action-angle charts and a Lyapunov probe.

use mech_core::{jacobi_bracket_contact, Layout, ScalarField, State, SystemDef};
use mech_diagnostics::{chart_pushforward, dissipated_drift, lyapunov_probe, to_chart, ContactChart};
use mech_hamjac::{gamma_related_check, hj_residual_contact_time, SectionGamma};
use mech_integrators::{integrate, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{Check, CheckKind};
use crate::config::RunConfig;
use crate::error::Result;
use crate::registry::Run;
use crate::support::{max_abs, rk4_run};

/// Mass `m(t) = 1 + a t` and `K(t) = κ ∫₀ᵗ 1/m`.
#[derive(Clone, Copy)]
struct TimeMass {
    kappa: f64,
    a: f64,
}

impl TimeMass {
    fn from(cfg: &RunConfig) -> Self {
        Self { kappa: cfg.param("kappa"), a: cfg.param("mass_rate") }
    }

    fn big_k(self, t: f64) -> f64 {
        if self.a == 0.0 {
            self.kappa * t
        } else {
            self.kappa / self.a * (1.0 + self.a * t).ln()
        }
    }

    /// `H = p²/2m + σ κ z/m`; `σ = 1` is the dissipative particle, `σ = −1`
    /// its Hamilton–Jacobi companion.
    fn system(self, sign: f64) -> SystemDef {
        let (kappa, a) = (sign * self.kappa, self.a);
        let h = ScalarField::new(Layout::cocontact(1), move |s| {
            let m = 1.0 + a * s.t;
            s.m[0] * s.m[0] / (2.0 * m) + kappa * s.z.unwrap() / m
        })
        .with_grad(move |s| {
            let m = 1.0 + a * s.t;
            let (p, z) = (s.m[0], s.z.unwrap());
            vec![-a / (m * m) * (0.5 * p * p + kappa * z), 0.0, p / m, kappa / m]
        });
        SystemDef::cocontact(1, h)
    }

    /// `(q, p, z)` from `(q₀, p₀, z₀)` at `t = 0`.
    fn closed_form(self, q0: f64, p0: f64, z0: f64, t: f64) -> [f64; 3] {
        let e = (-self.big_k(t)).exp();
        [q0 + p0 * (1.0 - e) / self.kappa, p0 * e, e * (p0 * p0 * (1.0 - e) / (2.0 * self.kappa) + z0)]
    }
}

fn free_particle_start(cfg: &RunConfig) -> State {
    State::new(0.0, vec![cfg.param("q0")], vec![cfg.param("p0")], Some(cfg.param("z0")))
}

pub(crate) fn free_particle_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&TimeMass::from(cfg).system(1.0), &free_particle_start(cfg), cfg, "free_particle_tmass")
}

pub(crate) fn free_particle_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let tm = TimeMass::from(cfg);
    let sys = tm.system(1.0);
    let s0 = free_particle_start(cfg);
    let traj = integrate(&sys, &s0, cfg.dt, cfg.t_end, None)?;
    let mut gap = [0.0f64; 3];
    for s in &traj.samples {
        let c = tm.closed_form(s0.q[0], s0.m[0], s0.z.unwrap(), s.t);
        let x = [s.q[0], s.m[0], s.z.unwrap()];
        for i in 0..3 {
            gap[i] = gap[i].max((x[i] - c[i]).abs());
        }
    }
    let p = ScalarField::new(Layout::cocontact(1), |s| s.m[0]);
    let dissipated = dissipated_drift(&traj, &p, &sys, "p")?;

    // The companion H = p²/2m − κz/m and its action-independent solution
    // S_λ = λ₁ e^K + (√(κ/2) q + λ₂)².
    let companion = tm.system(-1.0);
    let (l1, l2) = (0.7, 0.3);
    let c = (tm.kappa / 2.0).sqrt();
    let s_lambda = SectionGamma::generating(1, move |t, q| l1 * tm.big_k(t).exp() + (c * q[0] + l2).powi(2));
    let probes: Vec<(f64, Vec<f64>)> =
        (0..9).flat_map(|i| (0..9).map(move |j| (0.25 * i as f64, vec![-1.0 + 0.25 * j as f64]))).collect();
    let residual = hj_residual_contact_time(&s_lambda, &companion, &probes)?;
    let related = gamma_related_check(&s_lambda, &companion, 0.0, &[0.4], 2.0)?;

    Ok(vec![
        Check::below("p vs closed form", CheckKind::ClosedForm, gap[1], 1e-8),
        Check::below("q vs closed form", CheckKind::ClosedForm, gap[0], 1e-7),
        Check::below("z vs closed form", CheckKind::ClosedForm, gap[2], 1e-7),
        Check::below("p is dissipated", CheckKind::Dissipated, dissipated.max_abs_drift, 1e-7),
        Check::below("companion HJ residual of S_lambda", CheckKind::HjResidual, residual, 1e-10),
        Check::below("lifted curves vs full flow on [0, 2]", CheckKind::HjResidual, related.deviation, 1e-6),
    ])
}

#[derive(Clone, Copy)]
struct TwoBody {
    gamma: f64,
    m1: f64,
    m2: f64,
}

impl TwoBody {
    fn from(cfg: &RunConfig) -> Self {
        Self { gamma: cfg.param("gamma"), m1: cfg.param("m1"), m2: cfg.param("m2") }
    }

    /// `L = T + 1/r − γ z` on `q = (x₁, y₁, x₂, y₂)`.
    fn system(self) -> SystemDef {
        let TwoBody { gamma, m1, m2 } = self;
        let lag = move |s: &State| {
            let r = (s.q[0] - s.q[2]).hypot(s.q[1] - s.q[3]);
            0.5 * m1 * (s.m[0].powi(2) + s.m[1].powi(2)) + 0.5 * m2 * (s.m[2].powi(2) + s.m[3].powi(2)) + 1.0 / r
                - gamma * s.z.unwrap()
        };
        let grad = move |s: &State| {
            let (dx, dy) = (s.q[0] - s.q[2], s.q[1] - s.q[3]);
            let r3 = (dx * dx + dy * dy).powf(1.5);
            let (fx, fy) = (-dx / r3, -dy / r3);
            vec![fx, fy, -fx, -fy, m1 * s.m[0], m1 * s.m[1], m2 * s.m[2], m2 * s.m[3], -gamma]
        };
        SystemDef::herglotz(4, ScalarField::new(Layout::contact(4), lag).with_grad(grad))
    }

    fn energy(self) -> ScalarField {
        let TwoBody { gamma, m1, m2 } = self;
        ScalarField::new(Layout::contact(4), move |s| {
            let r = (s.q[0] - s.q[2]).hypot(s.q[1] - s.q[3]);
            0.5 * m1 * (s.m[0].powi(2) + s.m[1].powi(2)) + 0.5 * m2 * (s.m[2].powi(2) + s.m[3].powi(2)) - 1.0 / r
                + gamma * s.z.unwrap()
        })
    }

    fn cm_velocity(self, s: &State) -> [f64; 2] {
        let m = self.m1 + self.m2;
        [(self.m1 * s.m[0] + self.m2 * s.m[2]) / m, (self.m1 * s.m[1] + self.m2 * s.m[3]) / m]
    }

    fn angular_momentum(self, s: &State) -> f64 {
        let mu = self.m1 * self.m2 / (self.m1 + self.m2);
        let (rx, ry) = (s.q[0] - s.q[2], s.q[1] - s.q[3]);
        let (vx, vy) = (s.m[0] - s.m[2], s.m[1] - s.m[3]);
        mu * (rx * vy - ry * vx)
    }
}

fn two_body_start() -> State {
    State::contact(vec![1.0, 0.0, -0.5, 0.0], vec![0.2, 0.9, 0.1, -0.3], 0.0)
}

pub(crate) fn two_body_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&TwoBody::from(cfg).system(), &two_body_start(), cfg, "two_body_friction")
}

pub(crate) fn two_body_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let tb = TwoBody::from(cfg);
    let sys = tb.system();
    let s0 = two_body_start();
    let traj = integrate(&sys, &s0, cfg.dt, cfg.t_end, None)?;
    let (v0, l0) = (tb.cm_velocity(&s0), tb.angular_momentum(&s0));
    let (mut cm, mut speed, mut ang): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in &traj.samples {
        let decay = (-tb.gamma * s.t).exp();
        let v = tb.cm_velocity(s);
        cm = cm.max((v[0] - v0[0] * decay).abs()).max((v[1] - v0[1] * decay).abs());
        speed = speed.max((v[0].hypot(v[1]) - v0[0].hypot(v0[1]) * decay).abs());
        ang = ang.max((tb.angular_momentum(s) - l0 * decay).abs());
    }
    let energy = dissipated_drift(&traj, &tb.energy(), &sys, "E_L")?;
    Ok(vec![
        Check::below("centre-of-mass velocity decays like e^(-gamma t)", CheckKind::Dissipated, cm, 1e-6),
        Check::below("centre-of-mass speed decays like e^(-gamma t)", CheckKind::Dissipated, speed, 1e-6),
        Check::below("angular momentum decays like e^(-gamma t)", CheckKind::Dissipated, ang, 1e-6),
        Check::below("energy E_L is dissipated", CheckKind::Dissipated, energy.max_abs_drift, 1e-6),
    ])
}

fn h_plus_f() -> SystemDef {
    SystemDef::contact(1, ScalarField::new(Layout::contact(1), |s| s.m[0] + s.z.unwrap()).with_grad(|_| vec![0.0, 1.0, 1.0]))
}

fn action_angle_start() -> State {
    State::contact(vec![0.3], vec![0.8], 0.5)
}

pub(crate) fn action_angle_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&h_plus_f(), &action_angle_start(), cfg, "contact_action_angle")
}

fn x_h(_: [f64; 3]) -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn x_f(x: [f64; 3]) -> [f64; 3] {
    [0.0, -x[1], -x[2]]
}

/// Deviation from `y⁰ = y⁰₀ + t`, `y¹ = y¹₀ + t`, `A = A₀` in a chart.
fn chart_linearity(traj: &Trajectory, chart: ContactChart) -> Result<f64> {
    let flat = |s: &State| [s.q[0], s.m[0], s.z.unwrap()];
    let y0 = to_chart(chart, flat(&traj.samples[0]))?;
    let t0 = traj.samples[0].t;
    let mut worst: f64 = 0.0;
    for s in &traj.samples {
        let y = to_chart(chart, flat(s))?;
        let dt = s.t - t0;
        worst = worst.max((y[0] - y0[0] - dt).abs()).max((y[1] - y0[1] - dt).abs()).max((y[2] - y0[2]).abs());
    }
    Ok(worst)
}

pub(crate) fn action_angle_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    // The flow of h + f is the composition of the commuting flows of
    // h = p and f = z, and advances both angles at unit rate.
    let traj = integrate(&h_plus_f(), &action_angle_start(), cfg.dt, cfg.t_end, None)?;
    let l = Layout::contact(1);
    let h = ScalarField::new(l, |s| s.m[0]).with_grad(|_| vec![0.0, 1.0, 0.0]);
    let f = ScalarField::new(l, |s| s.z.unwrap()).with_grad(|_| vec![0.0, 0.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut bracket, mut straight): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(0.05..2.0), rng.random_range(0.05..2.0)];
        let s = State::contact(vec![x[0]], vec![x[1]], x[2]);
        bracket = bracket.max(jacobi_bracket_contact(&h, &f, &s)?.abs());
        for chart in [ContactChart::A, ContactChart::B] {
            let a = chart_pushforward(chart, x_h, x)?;
            let b = chart_pushforward(chart, x_f, x)?;
            straight = straight.max(max_abs([a[0] - 1.0, a[1], a[2], b[0], b[1] - 1.0, b[2]]));
        }
    }
    Ok(vec![
        Check::below("{h, f} vanishes", CheckKind::Bracket, bracket, 1e-12),
        Check::below("chart fields are coordinate fields", CheckKind::Identity, straight, 1e-6),
        Check::below("flow is linear in chart A", CheckKind::Conserved, chart_linearity(&traj, ContactChart::A)?, 1e-8),
        Check::below("flow is linear in chart B", CheckKind::Conserved, chart_linearity(&traj, ContactChart::B)?, 1e-8),
    ])
}

fn lyapunov_fields() -> (SystemDef, ScalarField, ScalarField) {
    let l = Layout::contact(1);
    let h = ScalarField::new(l, |s| 0.5 * s.m[0].powi(2) + 0.5 * s.q[0].powi(2) + s.z.unwrap())
        .with_grad(|s| vec![s.q[0], s.m[0], 1.0]);
    let f = ScalarField::new(l, |s| s.z.unwrap() - s.m[0] * s.q[0] / 2.0).with_grad(|s| vec![-s.m[0] / 2.0, -s.q[0] / 2.0, 1.0]);
    (SystemDef::contact(1, h.clone()), h, f)
}

fn lyapunov_start() -> State {
    State::contact(vec![0.05], vec![0.05], 0.02)
}

pub(crate) fn lyapunov_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&lyapunov_fields().0, &lyapunov_start(), cfg, "lyapunov_example")
}

pub(crate) fn lyapunov_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (sys, h, f) = lyapunov_fields();
    let origin = State::contact(vec![0.0], vec![0.0], 0.0);
    let verdict = lyapunov_probe(&sys, &origin, &[h.clone(), f.clone()], 0.1, 500, cfg.seed)?;
    let q = ScalarField::new(Layout::contact(1), |s| s.q[0]).with_grad(|_| vec![1.0, 0.0, 0.0]);
    let control = lyapunov_probe(&sys, &origin, &[q], 0.1, 500, cfg.seed)?;
    let s0 = lyapunov_start();
    let traj = integrate(&sys, &s0, cfg.dt, cfg.t_end, None)?;
    let dist = |s: &State| (s.q[0].powi(2) + s.m[0].powi(2) + s.z.unwrap().powi(2)).sqrt();
    Ok(vec![
        Check::flag("V = H^2 + f^2 is a strict Lyapunov function near 0", CheckKind::Stability, verdict.consistent),
        Check::report("min V on the punctured ball", verdict.min_v),
        Check::report("max dV/dt on the punctured ball", verdict.max_vdot),
        Check::flag("q alone does not give a Lyapunov function", CheckKind::Stability, !control.consistent),
        Check::below("H is dissipated", CheckKind::Dissipated, dissipated_drift(&traj, &h, &sys, "H")?.max_abs_drift, 1e-8),
        Check::below("z - pq/2 is dissipated", CheckKind::Dissipated, dissipated_drift(&traj, &f, &sys, "f")?.max_abs_drift, 1e-8),
        Check::flag("trajectory contracts toward 0", CheckKind::Stability, dist(traj.final_state()) < 0.1 * dist(&s0)),
    ])
}
