//! Scenarios with impacts: hybrid runs and the static jump examples.

use std::f64::consts::FRAC_PI_2;

use mech_core::{Layout, Metric, ScalarField, State, SystemDef};
use mech_hybrid::{
    action_angle_impact_relations, billiard_jump_conditions, carnot_energy_change, cylinder_constraint_rows,
    cylinder_jump_closed_form, cylinder_metric, cylinder_restitution_jump, disk_action_angle, disk_between_walls,
    disk_wall_impact, dissipative_billiard, hybrid_constant_check, hybrid_integrate, impulsive_projector,
    newton_impact_map, nonholonomic_initial_state, nonholonomic_particle_sim, nonholonomic_system, restitution_map,
    sphere_constraint_rows, sphere_jump_velocities, sphere_metric, sphere_projector_closed_form, CylinderParams,
    DiskParams, EventRecord, Guard, HybridError, HybridSystem, HybridTrajectory, ImpactForm, NonholonomicParams,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{Check, CheckKind};
use crate::config::RunConfig;
use crate::error::Result;
use crate::registry::Run;
use crate::support::trajectory_of;

/// Integrates to `t_end`; a Zeno abort keeps the partial run and adds a
/// report of where it stopped.
fn hybrid_run(hsys: &HybridSystem, s0: &State, cfg: &RunConfig) -> Result<(HybridTrajectory, Vec<Check>)> {
    match hybrid_integrate(hsys, s0, cfg.dt, cfg.t_end) {
        Ok(ht) => Ok((ht, Vec::new())),
        Err(HybridError::Zeno { t, partial, .. }) => Ok((*partial, vec![Check::report("zeno abort time", t)])),
        Err(e) => Err(e.into()),
    }
}

fn event_count(ht: &HybridTrajectory, least: usize) -> Check {
    Check::at_least("impact count", CheckKind::Event, ht.events.len() as f64, least as f64)
}

// Rolling disk between walls.

fn disk_params(cfg: &RunConfig) -> DiskParams {
    DiskParams { e: cfg.restitution(), ..DiskParams::default() }
}

pub(crate) fn disk_system(cfg: &RunConfig) -> Result<HybridSystem> {
    Ok(disk_between_walls(disk_params(cfg))?.with_zeno(cfg.zeno))
}

/// On the rolling set `x = p_x = p_θ = 0` the disk meets the walls on the
/// switching surface.
fn disk_start() -> State {
    State::symplectic(vec![0.0, 1.5, 0.0], vec![0.0, 1.2, 0.0])
}

pub(crate) fn disk_simulate(cfg: &RunConfig) -> Result<Run> {
    let ht = hybrid_integrate(&disk_system(cfg)?, &disk_start(), cfg.dt, cfg.t_end)?;
    Ok(Run::hybrid(&ht))
}

fn disk_f(i: usize) -> ScalarField {
    ScalarField::new(Layout::symplectic(3), move |s| disk_action_angle(s)[3 + i])
}

/// A state on one of the walls with `p_x = p_θ` and `ẏ` pointing into it
/// (unit parameters: walls at `y = 1` and `y = 2`).
fn disk_surface_state(rng: &mut ChaCha8Rng, upper: bool) -> State {
    let a = if upper { 2.0 } else { 1.0 };
    let px: f64 = rng.random_range(-1.0..1.0);
    let py: f64 = if upper { rng.random_range(0.1..1.5) } else { rng.random_range(-1.5..-0.1) };
    State::symplectic(vec![rng.random_range(-1.0..1.0), a, rng.random_range(-3.0..3.0)], vec![px, py, px])
}

pub(crate) fn disk_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let e = cfg.restitution();
    let (ht, mut checks) = hybrid_run(&disk_system(cfg)?, &disk_start(), cfg)?;
    checks.push(event_count(&ht, 1));
    let on_wall = ht.events.iter().all(|ev| (ev.pre.q[1] - 1.0).abs() < 1e-9 || (ev.pre.q[1] - 2.0).abs() < 1e-9);
    checks.push(Check::flag("impacts happen on the walls y = 1 and y = 2", CheckKind::Event, on_wall));

    if e == 1.0 {
        for i in 0..3 {
            let rep = hybrid_constant_check(&ht, &disk_f(i), None, 1e-8, "f");
            let v = rep.total_drift.max(rep.jump_residual);
            checks.push(Check::below(format!("f{} hybrid constant, total drift", i + 1), CheckKind::HybridConstant, v, 1e-8));
        }
    } else {
        for i in [0, 2] {
            let rep = hybrid_constant_check(&ht, &disk_f(i), None, 1e-8, "f");
            let v = rep.total_drift.max(rep.jump_residual);
            checks.push(Check::below(format!("f{} hybrid constant, total drift", i + 1), CheckKind::HybridConstant, v, 1e-8));
        }
        // The f2 update depends on the wall, so it is applied event by event.
        let f2 = disk_f(1);
        let mut rule_gap: f64 = 0.0;
        for ev in &ht.events {
            let a = ev.pre.q[1];
            let expected = e * e * f2.eval(&ev.pre) + 0.5 * (1.0 - e * e) * a * a;
            rule_gap = rule_gap.max((f2.eval(&ev.post) - expected).abs());
        }
        checks.push(Check::below("f2 jump follows e²f2 + (1 − e²)a²/2", CheckKind::Jump, rule_gap, 1e-10));
        let segment = hybrid_constant_check(&ht, &f2, None, 1e-8, "f2");
        checks.push(Check::below("f2 constant between impacts", CheckKind::HybridConstant, segment.segment_drift, 1e-8));
        if !ht.events.is_empty() {
            checks.push(Check::at_least(
                "f2 identity jump rule rejected",
                CheckKind::Jump,
                segment.jump_residual,
                1e-6,
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let map = disk_wall_impact(disk_params(cfg));
    let (mut relations, mut update): (f64, f64) = (0.0, 0.0);
    for k in 0..20 {
        let s = disk_surface_state(&mut rng, k % 2 == 0);
        relations = relations.max(action_angle_impact_relations(&s, e)?.max());
        let (b, a) = (disk_action_angle(&s), disk_action_angle(&map.apply(&s)?));
        let wall = s.q[1];
        update = update.max((a[3] - b[3]).abs()).max((a[5] - b[5]).abs());
        update = update.max((a[4] - (e * e * b[4] + 0.5 * (1.0 - e * e) * wall * wall)).abs());
    }
    checks.push(Check::below("action-angle impact relations at surface points", CheckKind::Jump, relations, 1e-10));
    checks.push(Check::below("impact map action updates at surface points", CheckKind::Jump, update, 1e-12));
    Ok(checks)
}

// Pendulum hitting the floor.

pub(crate) fn pendulum_system(cfg: &RunConfig) -> Result<HybridSystem> {
    let h = ScalarField::new(Layout::symplectic(1), |s| 0.5 * s.m[0] * s.m[0] + 1.0 - s.q[0].cos())
        .with_grad(|s| vec![s.q[0].sin(), s.m[0]]);
    let guard = Guard::new("floor", |q| FRAC_PI_2 - q[0]).with_grad(|_| vec![-1.0]);
    let map = newton_impact_map(Metric::identity(1), &guard, cfg.restitution(), ImpactForm::Momentum)?;
    let sys = SystemDef::forced_hamiltonian(1, h, None);
    Ok(HybridSystem::from_system("pendulum_floor", sys, vec![guard], vec![map])?.with_zeno(cfg.zeno))
}

fn pendulum_start(cfg: &RunConfig) -> State {
    State::symplectic(vec![0.0], vec![cfg.param("p0")])
}

pub(crate) fn pendulum_simulate(cfg: &RunConfig) -> Result<Run> {
    let ht = hybrid_integrate(&pendulum_system(cfg)?, &pendulum_start(cfg), cfg.dt, cfg.t_end)?;
    Ok(Run::hybrid(&ht))
}

pub(crate) fn pendulum_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let e = cfg.restitution();
    let (ht, mut checks) = hybrid_run(&pendulum_system(cfg)?, &pendulum_start(cfg), cfg)?;
    checks.push(event_count(&ht, if e == 1.0 { 5 } else { 1 }));
    let on_floor = ht.events.iter().map(|ev| (ev.pre.q[0] - FRAC_PI_2).abs()).fold(0.0, f64::max);
    checks.push(Check::below("impacts at q = π/2", CheckKind::Event, on_floor, 1e-10));
    let ratio = ht.events.iter().map(|ev| (ev.post.m[0] + e * ev.pre.m[0]).abs()).fold(0.0, f64::max);
    checks.push(Check::below("post-impact momentum is −e times pre-impact", CheckKind::Jump, ratio, 1e-12));
    let inside = ht.samples().all(|s| s.q[0] <= FRAC_PI_2 + 1e-9);
    checks.push(Check::flag("trajectory stays on the admissible side", CheckKind::Event, inside));
    let energy = ScalarField::new(Layout::symplectic(1), |s| 0.5 * s.m[0] * s.m[0] + 1.0 - s.q[0].cos());
    let rep = hybrid_constant_check(&ht, &energy, None, 1e-9, "energy");
    checks.push(Check::below("energy constant between impacts", CheckKind::Conserved, rep.segment_drift, 1e-9));
    if e == 1.0 && !ht.events.is_empty() {
        let first = ht.events[0].pre.m[0].abs();
        let spread = ht.events.iter().map(|ev| ev.pre.m[0].abs() - first).fold(0.0, |a: f64, b| a.max(b.abs()));
        checks.push(Check::below("impact speed repeats", CheckKind::Jump, spread, 1e-10));
        let gaps: Vec<f64> = ht.events.windows(2).map(|w| w[1].t - w[0].t).collect();
        let gap_spread = gaps.iter().map(|g| (g - gaps.first().copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max);
        checks.push(Check::below("impact times evenly spaced", CheckKind::Event, gap_spread, 1e-8));
    }
    Ok(checks)
}

// Circular billiards.

fn billiard_start() -> State {
    State::contact(vec![0.5, 0.0], vec![1.0, 1.0], 0.0)
}

pub(crate) fn free_billiard_system(cfg: &RunConfig) -> Result<HybridSystem> {
    Ok(dissipative_billiard(0.0)?.with_zeno(cfg.zeno))
}

pub(crate) fn billiard_system(cfg: &RunConfig) -> Result<HybridSystem> {
    Ok(dissipative_billiard(cfg.param("kappa"))?.with_zeno(cfg.zeno))
}

pub(crate) fn free_billiard_simulate(cfg: &RunConfig) -> Result<Run> {
    let ht = hybrid_integrate(&free_billiard_system(cfg)?, &billiard_start(), cfg.dt, cfg.t_end)?;
    Ok(Run::hybrid(&ht))
}

pub(crate) fn billiard_simulate(cfg: &RunConfig) -> Result<Run> {
    let ht = hybrid_integrate(&billiard_system(cfg)?, &billiard_start(), cfg.dt, cfg.t_end)?;
    Ok(Run::hybrid(&ht))
}

fn billiard_common(ht: &HybridTrajectory, kappa: f64, checks: &mut Vec<Check>) {
    checks.push(event_count(ht, 50));
    let ell = |s: &State| (s.q[0] * s.m[1] - s.q[1] * s.m[0]) * (kappa * s.t).exp();
    let mut drift: f64 = 0.0;
    for seg in &ht.segments {
        let l0 = ell(&seg.samples[0]);
        for s in &seg.samples {
            drift = drift.max((ell(s) - l0).abs());
        }
    }
    checks.push(Check::below("ℓ·exp(κt) constant between impacts", CheckKind::Dissipated, drift, 1e-6));
    let inside = ht.samples().all(|s| s.q[0] * s.q[0] + s.q[1] * s.q[1] <= 1.0 + 1e-9);
    checks.push(Check::flag("trajectory stays in the unit disk", CheckKind::Event, inside));
    let (mut speed, mut radial, mut angular, mut action): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for ev in &ht.events {
        let j = billiard_jump_conditions(&ev.pre, &ev.post);
        speed = speed.max(j.speed);
        radial = radial.max(j.radial);
        angular = angular.max(j.angular);
        action = action.max(j.action);
    }
    checks.push(Check::below("speed continuous at impacts", CheckKind::Jump, speed, 1e-12));
    checks.push(Check::below("radial velocity reversed at impacts", CheckKind::Jump, radial, 1e-12));
    checks.push(Check::below("angular momentum continuous at impacts", CheckKind::Jump, angular, 1e-10));
    checks.push(Check::flag("action continuous at impacts", CheckKind::Jump, action == 0.0));
    let speed2 = ScalarField::new(Layout::contact(2), |s| s.m[0] * s.m[0] + s.m[1] * s.m[1]);
    let rep = hybrid_constant_check(ht, &speed2, None, 1.0, "speed²");
    checks.push(Check::below("squared speed jump residual", CheckKind::HybridConstant, rep.jump_residual, 1e-12));
}

pub(crate) fn free_billiard_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (ht, mut checks) = hybrid_run(&free_billiard_system(cfg)?, &billiard_start(), cfg)?;
    billiard_common(&ht, 0.0, &mut checks);
    let ell = ScalarField::new(Layout::contact(2), |s| s.q[0] * s.m[1] - s.q[1] * s.m[0]);
    let rep = hybrid_constant_check(&ht, &ell, None, 1e-9, "ℓ");
    checks.push(Check::below("ℓ hybrid constant, total drift", CheckKind::HybridConstant, rep.total_drift, 1e-9));
    Ok(checks)
}

pub(crate) fn billiard_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let kappa = cfg.param("kappa");
    let (ht, mut checks) = hybrid_run(&billiard_system(cfg)?, &billiard_start(), cfg)?;
    billiard_common(&ht, kappa, &mut checks);
    Ok(checks)
}

// Nonholonomic particle between walls.

fn nonholonomic_params(cfg: &RunConfig) -> NonholonomicParams {
    NonholonomicParams {
        energy: cfg.param("energy"),
        lambda: cfg.param("lambda"),
        a: cfg.param("a"),
        y0: cfg.param("y0"),
        e: cfg.restitution(),
        ..NonholonomicParams::default()
    }
}

pub(crate) fn nonholonomic_hybrid(cfg: &RunConfig) -> Result<HybridSystem> {
    Ok(nonholonomic_system(&nonholonomic_params(cfg))?.with_zeno(cfg.zeno))
}

pub(crate) fn nonholonomic_simulate(cfg: &RunConfig) -> Result<Run> {
    let p = nonholonomic_params(cfg);
    let ht = hybrid_integrate(&nonholonomic_hybrid(cfg)?, &nonholonomic_initial_state(&p)?, cfg.dt, cfg.t_end)?;
    Ok(Run::hybrid(&ht))
}

pub(crate) fn nonholonomic_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = nonholonomic_params(cfg);
    let rep = nonholonomic_particle_sim(&p, cfg.dt, cfg.t_end)?;
    let lambda = rep.updates.iter().map(|u| (u.lambda_post - u.lambda_pre).abs()).fold(0.0, f64::max);
    let flat = NonholonomicParams { energy: 0.5 * p.lambda * p.lambda, y0: 0.3 * p.a, ..p };
    let still = nonholonomic_particle_sim(&flat, 1e-2, 5.0)?;
    Ok(vec![
        Check::at_least("impact count", CheckKind::Event, rep.htraj.events.len() as f64, 1.0),
        Check::below("segments vs closed form", CheckKind::ClosedForm, rep.segment_error, 1e-6),
        Check::below("energy update vs direct reflection", CheckKind::Jump, rep.derived_residual, 1e-12),
        Check::below("λ unchanged at impacts", CheckKind::Jump, lambda, 1e-12),
        Check::report("residual of the alternative energy update", rep.printed_residual),
        Check::flag("no impacts at E = λ²/2", CheckKind::Event, still.htraj.events.is_empty()),
        Check::below("constant-height segment vs closed form", CheckKind::ClosedForm, still.segment_error, 1e-9),
    ])
}

// Impulsive constraints.

fn jump_run(id: &str, layout: Layout, pre: State, post: State, label: &str) -> Run {
    let event = EventRecord {
        t: pre.t,
        guard: 0,
        label: label.into(),
        pre: pre.to_flat(&layout),
        post: post.to_flat(&layout),
    };
    let mut traj = trajectory_of(layout, vec![pre, post], id, 0.0, "closed-form");
    traj.mark(label.to_string());
    Run { trajectory: traj, events: vec![event] }
}

const SPHERE_V: [f64; 5] = [1.0, -0.5, 0.2, 0.4, -0.3];

fn sphere_post(r: f64, k: f64, v: &[f64]) -> Result<Vec<f64>> {
    let g = sphere_metric(k);
    let p = impulsive_projector(&g, &sphere_constraint_rows(r))?;
    let ginv = g.clone().try_inverse().expect("diagonal metric");
    Ok((&ginv * &p * &g * DVector::from_column_slice(v)).as_slice().to_vec())
}

pub(crate) fn sphere_simulate(cfg: &RunConfig) -> Result<Run> {
    let (r, k) = (cfg.param("r"), cfg.param("k"));
    let post = sphere_post(r, k, &SPHERE_V)?;
    let pre = State::symplectic(vec![0.0; 5], SPHERE_V.to_vec());
    let post = State::symplectic(vec![0.0; 5], post);
    Ok(jump_run("rolling_sphere_jump", Layout::symplectic(5), pre, post, "rolling"))
}

pub(crate) fn sphere_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (r, k) = (cfg.param("r"), cfg.param("k"));
    let g = sphere_metric(k);
    let psi = sphere_constraint_rows(r);
    let p = impulsive_projector(&g, &psi)?;
    let ginv = g.clone().try_inverse().expect("diagonal metric");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut admissible, mut closed): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let pm = DVector::from_fn(5, |_, _| rng.random_range(-2.0..2.0));
        let pp = &p * &pm;
        admissible = admissible.max((&psi * &ginv * &pp).amax());
        let (vm, vp) = (&ginv * &pm, &ginv * &pp);
        let cf = sphere_jump_velocities(r, k, vm.as_slice());
        closed = closed.max(vp.iter().zip(cf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(vec![
        Check::below("projector vs closed form", CheckKind::Projector, (&p - sphere_projector_closed_form(r, k)).amax(), 1e-14),
        Check::below("projector is idempotent", CheckKind::Projector, (&p * &p - &p).amax(), 1e-12),
        Check::below("post-impact momenta satisfy the constraints", CheckKind::Projector, admissible, 1e-12),
        Check::below("post-impact velocities vs closed form", CheckKind::ClosedForm, closed, 1e-12),
    ])
}

const CYLINDER_V: [f64; 4] = [0.4, -1.1, 0.3, 0.8];

pub(crate) fn cylinder_simulate(cfg: &RunConfig) -> Result<Run> {
    let c = CylinderParams::default();
    let phi = cfg.param("phi");
    let post = cylinder_restitution_jump(&c, phi, &CYLINDER_V, cfg.param("alpha"));
    let q = vec![0.0, 0.0, phi, 0.0];
    let pre = State::symplectic(q.clone(), CYLINDER_V.to_vec());
    let post = State::symplectic(q, post.to_vec());
    Ok(jump_run("rolling_cylinder_jump", Layout::symplectic(4), pre, post, "plane"))
}

pub(crate) fn cylinder_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let c = CylinderParams::default();
    let g = cylinder_metric(&c);
    let alpha = cfg.param("alpha");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut projector, mut restitution, mut carnot): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..50 {
        let phi: f64 = rng.random_range(-3.0..3.0);
        let p = impulsive_projector(&g, &cylinder_constraint_rows(&c, phi))?;
        let pm = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let pp = &p * &pm;
        let cf = cylinder_jump_closed_form(&c, phi, pm.as_slice());
        projector = projector.max(pp.iter().zip(cf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let dpsi = DVector::from_vec(vec![0.0, 1.0, c.gamma * phi.sin(), -1.0]);
        let v = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let general = restitution_map(&g, &dpsi, alpha)? * &v;
        let cf = cylinder_restitution_jump(&c, phi, v.as_slice(), alpha);
        restitution = restitution.max(general.iter().zip(cf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        carnot = carnot.max(carnot_energy_change(&g, &v, &general, alpha)?.residual);
    }
    Ok(vec![
        Check::below("projector vs closed-form jump", CheckKind::Projector, projector, 1e-12),
        Check::below("restitution jump vs general map", CheckKind::ClosedForm, restitution, 1e-12),
        Check::below("Carnot energy balance", CheckKind::Identity, carnot, 1e-12),
    ])
}

// Carnot accounting for random restitution events.

fn random_event(rng: &mut ChaCha8Rng) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>, f64)> {
    let n = rng.random_range(1..6);
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let g = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
    let dpsi = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let vm = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let alpha = 1.0 - rng.random_range(0.0..1.0);
    let vp = restitution_map(&g, &dpsi, alpha)? * &vm;
    Ok((g, vm, vp, alpha))
}

fn carnot_events(cfg: &RunConfig) -> usize {
    cfg.param("events").max(1.0) as usize
}

/// One row per event: kinetic energy before and after, at unit spacing.
pub(crate) fn carnot_simulate(cfg: &RunConfig) -> Result<Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut states = Vec::new();
    for i in 0..carnot_events(cfg) {
        let (g, vm, vp, _) = random_event(&mut rng)?;
        let t = |v: &DVector<f64>| 0.5 * v.dot(&(&g * v));
        states.push(State::new(i as f64, vec![t(&vm)], vec![t(&vp)], None));
    }
    Ok(Run::smooth(trajectory_of(Layout::symplectic(1), states, "carnot_restitution", 1.0, "closed-form")))
}

pub(crate) fn carnot_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut worst, mut gained): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for _ in 0..carnot_events(cfg) {
        let (g, vm, vp, alpha) = random_event(&mut rng)?;
        let rep = carnot_energy_change(&g, &vm, &vp, alpha)?;
        worst = worst.max(rep.residual);
        gained = gained.max(rep.delta_t);
    }
    let g = DMatrix::identity(2, 2);
    let dpsi = DVector::from_vec(vec![0.0, 1.0]);
    let vm = DVector::from_vec(vec![0.0, -1.0]);
    let vp = restitution_map(&g, &dpsi, 0.5)? * &vm;
    let hand = carnot_energy_change(&g, &vm, &vp, 0.5)?;
    let hand_gap = (hand.delta_t + 0.375).abs().max((hand.t_i - 1.125).abs());
    let elastic = carnot_energy_change(&g, &vm, &(restitution_map(&g, &dpsi, 1.0)? * &vm), 1.0)?;
    Ok(vec![
        Check::below("Carnot balance over random events", CheckKind::Identity, worst, 1e-12),
        Check::below("kinetic energy never increases", CheckKind::Dissipated, gained.max(0.0), 1e-12),
        Check::below("hand example ΔT = −3/8, T_I = 9/8", CheckKind::ClosedForm, hand_gap, 1e-15),
        Check::flag("elastic event conserves kinetic energy", CheckKind::Identity, elastic.delta_t == 0.0),
    ])
}
