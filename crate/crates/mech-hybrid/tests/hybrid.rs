use std::sync::Arc;

use mech_core::{Layout, Metric, ScalarField, State, SystemDef};
use mech_hybrid::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plane_guard() -> Guard {
    Guard::new("floor", |q| q[1]).with_grad(|_| vec![0.0, 1.0])
}

#[test]
fn newton_map_reflects_normal_momentum() {
    let map = newton_impact_map(Metric::identity(2), &plane_guard(), 1.0, ImpactForm::Momentum).unwrap();
    let post = map.apply(&State::symplectic(vec![0.3, 0.0], vec![1.0, -2.0])).unwrap();
    assert_eq!(post.m, vec![1.0, 2.0]);
    assert_eq!(post.q, vec![0.3, 0.0]);
    let again = map.apply(&post).unwrap();
    assert_eq!(again.m, vec![1.0, -2.0]);
}

#[test]
fn newton_map_scales_normal_component() {
    let e = 0.4;
    let map = newton_impact_map(Metric::identity(2), &plane_guard(), e, ImpactForm::Velocity).unwrap();
    let post = map.apply(&State::symplectic(vec![0.0, 0.0], vec![0.7, -1.5])).unwrap();
    assert!((post.m[0] - 0.7).abs() < 1e-15);
    assert!((post.m[1] - 0.6).abs() < 1e-15);
}

#[test]
fn newton_map_energy_and_involution_under_a_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let g = &a * a.transpose() + DMatrix::identity(3, 3);
        let ginv = g.clone().try_inverse().unwrap();
        let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let guard = Guard::new("sphere", move |q| 2.0 - q.iter().zip(&c).map(|(x, c)| (x - c).powi(2)).sum::<f64>());
        let q: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s = State::symplectic(q, p.clone());
        let elastic = newton_impact_map(Metric::Constant(g.clone()), &guard, 1.0, ImpactForm::Momentum).unwrap();
        let post = elastic.apply(&s).unwrap();
        let back = elastic.apply(&post).unwrap();
        let t = |m: &[f64]| {
            let v = DVector::from_column_slice(m);
            0.5 * v.dot(&(&ginv * &v))
        };
        assert!((t(&post.m) - t(&p)).abs() < 1e-12);
        for (x, y) in back.m.iter().zip(&p) {
            assert!((x - y).abs() < 1e-12);
        }
        let dh = DVector::from_vec(guard.grad(&s.q));
        let normal = DVector::from_column_slice(&p).dot(&(&ginv * &dh));
        let lossy = newton_impact_map(Metric::Constant(g.clone()), &guard, 0.5, ImpactForm::Momentum).unwrap();
        if normal.abs() > 1e-6 {
            assert!(t(&lossy.apply(&s).unwrap().m) < t(&p));
        }
    }
}

#[test]
fn newton_map_rejects_bad_input() {
    assert!(matches!(
        newton_impact_map(Metric::identity(2), &plane_guard(), 1.5, ImpactForm::Momentum),
        Err(HybridError::Restitution(_))
    ));
    let flat = Guard::new("flat", |_| 1.0).with_grad(|_| vec![0.0, 0.0]);
    let map = newton_impact_map(Metric::identity(2), &flat, 1.0, ImpactForm::Momentum).unwrap();
    assert!(matches!(map.apply(&State::symplectic(vec![0.0; 2], vec![1.0; 2])), Err(HybridError::ZeroGradient)));
}

#[test]
fn mismatched_lists_are_rejected() {
    let sys = SystemDef::forced_hamiltonian(2, ScalarField::new(Layout::symplectic(2), |_| 0.0), None);
    let err = HybridSystem::from_system("x", sys, vec![plane_guard()], vec![]).unwrap_err();
    assert!(matches!(err, HybridError::Mismatch { guards: 1, impacts: 0 }));
}

fn pendulum(e: f64) -> HybridSystem {
    let h = ScalarField::new(Layout::symplectic(1), |s| 0.5 * s.m[0] * s.m[0] + 1.0 - s.q[0].cos())
        .with_grad(|s| vec![s.q[0].sin(), s.m[0]]);
    let guard = Guard::new("floor", |q| std::f64::consts::FRAC_PI_2 - q[0]).with_grad(|_| vec![-1.0]);
    let map = newton_impact_map(Metric::identity(1), &guard, e, ImpactForm::Momentum).unwrap();
    HybridSystem::from_system("pendulum_floor", SystemDef::forced_hamiltonian(1, h, None), vec![guard], vec![map]).unwrap()
}

#[test]
fn elastic_pendulum_impacts_repeat_momentum() {
    let ht = hybrid_integrate(&pendulum(1.0), &State::symplectic(vec![0.0], vec![1.5]), 1e-3, 30.0).unwrap();
    assert!(ht.events.len() >= 5, "{} impacts", ht.events.len());
    let first = ht.events[0].pre.m[0].abs();
    for ev in &ht.events {
        assert!((ev.pre.m[0].abs() - first).abs() < 1e-10);
        assert!((ev.pre.q[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(ev.pre.m[0] > 0.0 && ev.post.m[0] < 0.0);
    }
    let gaps: Vec<f64> = ht.events.windows(2).map(|w| w[1].t - w[0].t).collect();
    for g in &gaps {
        assert!((g - gaps[0]).abs() < 1e-8);
    }
    for seg in &ht.segments {
        assert!(seg.samples.iter().all(|s| s.q[0] <= std::f64::consts::FRAC_PI_2 + 1e-9));
    }
}

fn bouncing_ball(e: f64) -> HybridSystem {
    let h = ScalarField::new(Layout::symplectic(1), |s| 0.5 * s.m[0] * s.m[0] + s.q[0]).with_grad(|s| vec![1.0, s.m[0]]);
    let guard = Guard::new("floor", |q| q[0]).with_grad(|_| vec![1.0]);
    let map = newton_impact_map(Metric::identity(1), &guard, e, ImpactForm::Momentum).unwrap();
    HybridSystem::from_system("ball", SystemDef::forced_hamiltonian(1, h, None), vec![guard], vec![map]).unwrap()
}

#[test]
fn plastic_impact_triggers_zeno_guard() {
    let err = hybrid_integrate(&bouncing_ball(0.0), &State::symplectic(vec![1.0], vec![0.0]), 1e-2, 5.0).unwrap_err();
    match err {
        HybridError::Zeno { events, partial, .. } => {
            assert!(events >= 1);
            assert_eq!(partial.events.len(), events);
            assert!((partial.events[0].t - 2f64.sqrt()).abs() < 1e-9);
        }
        other => panic!("expected a Zeno abort, got {other:?}"),
    }
}

#[test]
fn event_cap_triggers_zeno_guard() {
    let hsys = bouncing_ball(1.0).with_zeno(ZenoConfig { max_events: 3, min_gap: 1e-9 });
    let err = hybrid_integrate(&hsys, &State::symplectic(vec![1.0], vec![0.0]), 1e-2, 50.0).unwrap_err();
    assert!(matches!(err, HybridError::Zeno { events: 3, .. }));
}

#[test]
fn starting_outside_is_an_error() {
    let err = hybrid_integrate(&bouncing_ball(1.0), &State::symplectic(vec![-0.1], vec![0.0]), 1e-2, 1.0).unwrap_err();
    assert!(matches!(err, HybridError::EscapedDomain { .. }));
}

#[test]
fn grazing_contact_is_stepped_through() {
    // A free particle sliding along y = 0 never enters the wall.
    let h = ScalarField::new(Layout::symplectic(2), |s| 0.5 * (s.m[0] * s.m[0] + s.m[1] * s.m[1]))
        .with_grad(|s| vec![0.0, 0.0, s.m[0], s.m[1]]);
    let guard = plane_guard();
    let map = newton_impact_map(Metric::identity(2), &guard, 1.0, ImpactForm::Momentum).unwrap();
    let hsys = HybridSystem::from_system("slide", SystemDef::forced_hamiltonian(2, h, None), vec![guard], vec![map]).unwrap();
    let ht = hybrid_integrate(&hsys, &State::symplectic(vec![0.0, 0.0], vec![1.0, 0.0]), 0.1, 2.0).unwrap();
    assert!(ht.events.is_empty());
}

#[test]
fn flatten_keeps_pre_and_post_rows_adjacent() {
    let ht = hybrid_integrate(&bouncing_ball(1.0), &State::symplectic(vec![1.0], vec![0.0]), 1e-2, 5.0).unwrap();
    let flat = ht.flatten();
    assert!(flat.events.len() >= 2 * ht.events.len() - 1);
    for ev in &ht.events {
        let i = flat.samples.iter().position(|s| s.t == ev.t).unwrap();
        assert_eq!(flat.samples[i].m, ev.pre.m);
        assert_eq!(flat.samples[i + 1].m, ev.post.m);
        assert_eq!(flat.samples[i + 1].t, ev.t);
    }
    assert_eq!(ht.event_records().len(), ht.events.len());
}

#[test]
fn billiard_reflection_example() {
    let s = State::contact(vec![1.0, 0.0], vec![1.0, 1.0], 0.2);
    let post = billiard_impact().apply(&s).unwrap();
    assert_eq!(post.m, vec![-1.0, 1.0]);
    assert_eq!(post.z, Some(0.2));
    assert!(billiard_jump_conditions(&s, &post).max() < 1e-14);
    let off = State::contact(vec![0.5, 0.0], vec![1.0, 1.0], 0.0);
    assert!(matches!(billiard_impact().apply(&off), Err(HybridError::OffSurface(_))));
}

#[test]
fn dissipative_billiard_run() {
    let kappa = 1e-4;
    let hsys = dissipative_billiard(kappa).unwrap();
    let s0 = State::contact(vec![0.5, 0.0], vec![1.0, 1.0], 0.0);
    let ht = hybrid_integrate(&hsys, &s0, 1e-2, 100.0).unwrap();
    assert!(ht.events.len() >= 50, "{} impacts", ht.events.len());
    let mut drift: f64 = 0.0;
    for seg in &ht.segments {
        let ell = |s: &State| (s.q[0] * s.m[1] - s.q[1] * s.m[0]) * (kappa * s.t).exp();
        let l0 = ell(&seg.samples[0]);
        for s in &seg.samples {
            drift = drift.max((ell(s) - l0).abs());
            assert!(s.q[0] * s.q[0] + s.q[1] * s.q[1] <= 1.0 + 1e-9);
        }
    }
    assert!(drift < 1e-6, "ℓe^(κt) drift {drift}");
    for ev in &ht.events {
        let j = billiard_jump_conditions(&ev.pre, &ev.post);
        assert!(j.speed < 1e-12 && j.radial < 1e-12 && j.angular < 1e-10 && j.action == 0.0, "{j:?}");
    }
    let speed2 = ScalarField::new(Layout::contact(2), |s| s.m[0] * s.m[0] + s.m[1] * s.m[1]);
    let rep = hybrid_constant_check(&ht, &speed2, None, 1.0, "speed²");
    assert!(rep.jump_residual < 1e-12);
}

fn surface_state(rng: &mut ChaCha8Rng, upper: bool) -> State {
    // On a wall with p_x = p_θ (unit parameters).
    let a = if upper { 2.0 } else { 1.0 };
    let px: f64 = rng.random_range(-1.0..1.0);
    let py: f64 = if upper { rng.random_range(0.1..1.5) } else { rng.random_range(-1.5..-0.1) };
    State::symplectic(vec![rng.random_range(-1.0..1.0), a, rng.random_range(-3.0..3.0)], vec![px, py, px])
}

#[test]
fn disk_impact_example_and_surface_check() {
    let map = disk_wall_impact(DiskParams::default());
    let post = map.apply(&State::symplectic(vec![0.0, 1.0, 0.0], vec![1.0, -1.0, 1.0])).unwrap();
    assert_eq!(post.m, vec![1.0, 1.0, 1.0]);
    let off = State::symplectic(vec![0.0, 1.0, 0.0], vec![1.0, -1.0, 0.5]);
    assert!(matches!(map.apply(&off), Err(HybridError::OffSurface(_))));
}

#[test]
fn disk_impact_preserves_f1_f3_and_updates_f2() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in [1.0, 0.5] {
        let map = disk_wall_impact(DiskParams { e, ..DiskParams::default() });
        for k in 0..20 {
            let s = surface_state(&mut rng, k % 2 == 0);
            let (b, a) = (disk_action_angle(&s), disk_action_angle(&map.apply(&s).unwrap()));
            let wall = s.q[1];
            assert!((a[3] - b[3]).abs() < 1e-14 && (a[5] - b[5]).abs() < 1e-14);
            assert!((a[4] - (e * e * b[4] + 0.5 * (1.0 - e * e) * wall * wall)).abs() < 1e-12);
        }
    }
}

#[test]
fn disk_action_angle_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for e in [1.0, 0.5] {
        for k in 0..20 {
            let s = surface_state(&mut rng, k % 2 == 1);
            let rel = action_angle_impact_relations(&s, e).unwrap();
            assert!(rel.max() < 1e-10, "{rel:?}");
        }
    }
    let off = State::symplectic(vec![0.0, 1.5, 0.0], vec![0.5, 1.0, 0.5]);
    assert!(action_angle_impact_relations(&off, 0.5).is_err());
}

fn disk_f(i: usize) -> ScalarField {
    ScalarField::new(Layout::symplectic(3), move |s| disk_action_angle(s)[3 + i])
}

fn disk_run(e: f64, t_end: f64) -> HybridTrajectory {
    let hsys = disk_between_walls(DiskParams { e, ..DiskParams::default() }).unwrap();
    // On the rolling set x = p_x = p_θ = 0 the disk meets the walls on the
    // switching surface.
    let s0 = State::symplectic(vec![0.0, 1.5, 0.0], vec![0.0, 1.2, 0.0]);
    hybrid_integrate(&hsys, &s0, 1e-3, t_end).unwrap()
}

#[test]
fn elastic_disk_has_hybrid_constants() {
    let ht = disk_run(1.0, 30.0);
    assert!(ht.events.len() >= 10, "{} impacts", ht.events.len());
    for i in 0..3 {
        let rep = hybrid_constant_check(&ht, &disk_f(i), None, 1e-8, "f");
        assert!(rep.pass && rep.total_drift < 1e-8, "{rep:?}");
    }
}

#[test]
fn inelastic_disk_follows_f2_rule() {
    let e = 0.5;
    // The spring pulls the disk onto the lower wall, where inelastic
    // bounces accumulate; stop well before that.
    let ht = disk_run(e, 4.0);
    assert!(!ht.events.is_empty());
    for ev in &ht.events {
        let a = ev.pre.q[1];
        let (b, c) = (disk_action_angle(&ev.pre)[4], disk_action_angle(&ev.post)[4]);
        assert!((c - (e * e * b + 0.5 * (1.0 - e * e) * a * a)).abs() < 1e-10);
    }
    // The rule depends on which wall was hit, so compare event by event.
    let walls: Vec<f64> = ht.events.iter().map(|ev| ev.pre.q[1]).collect();
    assert!(walls.iter().all(|w| (w - 1.0).abs() < 1e-9 || (w - 2.0).abs() < 1e-9));
    let rep = hybrid_constant_check(&ht, &disk_f(1), None, 1e-8, "f2");
    assert!(!rep.pass, "identity rule must fail at e = 0.5");
}

#[test]
fn inelastic_disk_rule_check_on_one_wall() {
    let e = 0.5;
    let hsys = disk_between_walls(DiskParams { e, ..DiskParams::default() }).unwrap();
    let s0 = State::symplectic(vec![0.0, 1.5, 0.0], vec![0.0, -0.3, 0.0]);
    let ht = hybrid_integrate(&hsys, &s0, 1e-3, 1.0).unwrap();
    assert_eq!(ht.events.len(), 1);
    let rule = move |f: f64| e * e * f + 0.5 * (1.0 - e * e);
    let rep = hybrid_constant_check(&ht, &disk_f(1), Some(&rule), 1e-8, "f2");
    assert!(rep.pass && rep.jump_residual < 1e-10, "{rep:?}");
}

#[test]
fn carnot_hand_example() {
    let g = DMatrix::identity(2, 2);
    let map = restitution_map(&g, &DVector::from_vec(vec![0.0, 1.0]), 0.5).unwrap();
    let vm = DVector::from_vec(vec![0.0, -1.0]);
    let vp = &map * &vm;
    let rep = carnot_energy_change(&g, &vm, &vp, 0.5).unwrap();
    assert!((rep.delta_t + 0.375).abs() < 1e-15);
    assert!((rep.t_i - 1.125).abs() < 1e-15);
    assert!(rep.residual < 1e-14);
    let elastic = restitution_map(&g, &DVector::from_vec(vec![0.0, 1.0]), 1.0).unwrap();
    let rep = carnot_energy_change(&g, &vm, &(&elastic * &vm), 1.0).unwrap();
    assert_eq!(rep.delta_t, 0.0);
    assert_eq!(rep.residual, 0.0);
    assert!(matches!(carnot_energy_change(&g, &vm, &vp, -1.0), Err(HybridError::DegenerateCarnot)));
}

#[test]
fn carnot_random_events() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..6);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let g = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
        let dpsi = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let vm = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let alpha = 1.0 - rng.random_range(0.0..1.0);
        let vp = restitution_map(&g, &dpsi, alpha).unwrap() * &vm;
        worst = worst.max(carnot_energy_change(&g, &vm, &vp, alpha).unwrap().residual);
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn sphere_projector_matches_closed_form() {
    let (r, k) = (0.7, 0.45);
    let g = sphere_metric(k);
    let psi = sphere_constraint_rows(r);
    let p = impulsive_projector(&g, &psi).unwrap();
    assert!((&p - sphere_projector_closed_form(r, k)).amax() < 1e-14);
    assert!((&p * &p - &p).amax() < 1e-12);
    let ginv = g.clone().try_inverse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let pm = DVector::from_fn(5, |_, _| rng.random_range(-2.0..2.0));
        let pp = &p * &pm;
        assert!((&psi * &ginv * &pp).amax() < 1e-12);
        let vm = &ginv * &pm;
        let vp = &ginv * &pp;
        let cf = sphere_jump_velocities(r, k, vm.as_slice());
        for i in 0..5 {
            assert!((vp[i] - cf[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn empty_and_dependent_constraints() {
    let g = DMatrix::identity(3, 3);
    assert_eq!(impulsive_projector(&g, &DMatrix::zeros(0, 3)).unwrap(), g);
    let psi = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
    assert!(matches!(impulsive_projector(&g, &psi), Err(HybridError::RankDeficient(_))));
}

#[test]
fn cylinder_projector_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = CylinderParams::default();
    let g = cylinder_metric(&c);
    for _ in 0..50 {
        let phi = rng.random_range(-3.0..3.0);
        let p = impulsive_projector(&g, &cylinder_constraint_rows(&c, phi)).unwrap();
        let pm = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let pp = &p * &pm;
        let cf = cylinder_jump_closed_form(&c, phi, pm.as_slice());
        for i in 0..4 {
            assert!((pp[i] - cf[i]).abs() < 1e-12, "φ = {phi}: {pp} vs {cf:?}");
        }
    }
    let cf = cylinder_jump_closed_form(&c, 0.9, &[0.4, -1.1, 0.3, 0.8]);
    assert!((cf[0] - 0.530).abs() < 1e-3 && (cf[1] + 0.227).abs() < 1e-3);
}

#[test]
fn cylinder_restitution_matches_general_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c = CylinderParams::default();
    let g = cylinder_metric(&c);
    for _ in 0..50 {
        let phi: f64 = rng.random_range(-3.0..3.0);
        let alpha = rng.random_range(0.0..1.0);
        let dpsi = DVector::from_vec(vec![0.0, 1.0, c.gamma * phi.sin(), -1.0]);
        let v = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let general = restitution_map(&g, &dpsi, alpha).unwrap() * &v;
        let cf = cylinder_restitution_jump(&c, phi, v.as_slice(), alpha);
        for i in 0..4 {
            assert!((general[i] - cf[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn nonholonomic_segments_follow_closed_form() {
    let p = NonholonomicParams { energy: 1.0, lambda: 1.0, y0: 0.5, e: 0.8, ..Default::default() };
    let rep = nonholonomic_particle_sim(&p, 1e-3, 10.0).unwrap();
    assert!(rep.htraj.events.len() >= 3);
    assert!(rep.segment_error < 1e-6, "{}", rep.segment_error);
    assert!(rep.derived_residual < 1e-12, "{}", rep.derived_residual);
    assert!(rep.printed_residual > 0.1);
    for u in &rep.updates {
        // Re-fit (λ, E) from the post-impact state directly.
        assert!((u.lambda_post - u.lambda_pre).abs() < 1e-12);
    }
}

#[test]
fn nonholonomic_constant_height() {
    let p = NonholonomicParams { energy: 0.5, lambda: 1.0, y0: 0.3, ..Default::default() };
    let rep = nonholonomic_particle_sim(&p, 1e-2, 5.0).unwrap();
    assert!(rep.htraj.events.is_empty());
    assert!(rep.segment_error < 1e-9);
    let end = rep.htraj.final_state();
    assert_eq!(end.q[1], 0.3);
}

#[test]
fn nonholonomic_parameter_domain() {
    let p = NonholonomicParams { energy: 0.2, lambda: 1.0, ..Default::default() };
    assert!(matches!(nonholonomic_particle_sim(&p, 1e-2, 1.0), Err(HybridError::Parameter(_))));
}

#[test]
fn fn_field_systems_are_shareable() {
    fn assert_send_sync<T: Send + Sync>(_: &T) {}
    let h = dissipative_billiard(0.0).unwrap();
    assert_send_sync(&h);
    let _: Arc<HybridSystem> = Arc::new(h);
}
