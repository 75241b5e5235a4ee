use std::sync::Arc;

use mech_core::*;
use mech_varint::*;
use proptest::prelude::*;

fn oscillator(m: f64, k: f64, r: f64) -> SystemDef {
    let l = Layout::symplectic(1);
    let v = ScalarField::new(l, move |s| 0.5 * k * s.q[0] * s.q[0]).with_grad(move |s| vec![k * s.q[0], 0.0]);
    let ray = ScalarField::new(l, move |s| 0.5 * r * s.m[0] * s.m[0]).with_grad(move |s| vec![0.0, r * s.m[0]]);
    SystemDef::mechanical(1, Metric::diagonal(&[m]), v, ray)
}

/// `q(0) = 1`, `q̇(0) = 0`.
fn closed_form(m: f64, k: f64, r: f64, t: f64) -> f64 {
    let a = r / (2.0 * m);
    let b = (4.0 * k * m - r * r).sqrt() / (2.0 * m);
    (-a * t).exp() * ((b * t).cos() + a / b * (b * t).sin())
}

fn closed_form_velocity(m: f64, k: f64, r: f64, t: f64) -> f64 {
    let a = r / (2.0 * m);
    let b = (4.0 * k * m - r * r).sqrt() / (2.0 * m);
    -(-a * t).exp() * (a * a / b + b) * (b * t).sin()
}

/// Midpoint rule flow of the damped oscillator, solved by hand from the
/// left and right discrete Legendre transforms.
fn midpoint_flow(m: f64, k: f64, r: f64, h: f64, q: f64, p: f64) -> (f64, f64) {
    let q1 = (4.0 * h * p + (4.0 * m + 2.0 * r * h - k * h * h) * q) / (4.0 * m + 2.0 * r * h + k * h * h);
    let p1 = (m / h - r / 2.0) * (q1 - q) - k * h * (q + q1) / 4.0;
    (q1, p1)
}

fn midpoint_next(m: f64, k: f64, r: f64, h: f64, q0: f64, q1: f64) -> f64 {
    (-h * h * k * (q0 + 2.0 * q1) + 2.0 * h * q0 * r - 4.0 * m * (q0 - 2.0 * q1)) / (h * h * k + 2.0 * h * r + 4.0 * m)
}

#[test]
fn midpoint_lagrangian_value() {
    let dl = midpoint_discretize(&oscillator(1.0, 1.0, 0.0), 0.1).unwrap();
    assert!((dl.ld(&[0.0], &[0.1]) - 0.049875).abs() < 1e-15);
    assert!(!dl.fplus(&[0.0], &[0.1]).iter().any(|f| *f != 0.0));
}

#[test]
fn midpoint_forces() {
    let r = 0.3;
    let dl = midpoint_discretize(&oscillator(1.0, 1.0, r), 0.1).unwrap();
    let (q0, q1) = ([0.4], [-0.2]);
    let expected = -r * (q1[0] - q0[0]) / 2.0;
    assert!((dl.fplus(&q0, &q1)[0] - expected).abs() < 1e-15);
    assert!((dl.fminus(&q0, &q1)[0] - expected).abs() < 1e-15);
}

#[test]
fn midpoint_lagrangian_converges_cubically() {
    let (m, k, r) = (1.0, 1.0, 0.3);
    let err = |h: f64| {
        let mid = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
        let (exact, _) = exact_discrete_damped_oscillator(m, k, r, h).unwrap();
        let (q0, q1) = ([closed_form(m, k, r, 0.0)], [closed_form(m, k, r, h)]);
        (mid.ld(&q0, &q1) - exact.ld(&q0, &q1)).abs()
    };
    let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
    assert!((7.0..9.0).contains(&(e1 / e2)), "{}", e1 / e2);
    assert!((7.0..9.0).contains(&(e2 / e3)), "{}", e2 / e3);
}

#[test]
fn midpoint_rayleigh_potentials() {
    let r = 0.3;
    let ray = ScalarField::new(Layout::symplectic(1), move |s| 0.5 * r * s.m[0] * s.m[0]);
    let rd = midpoint_rayleigh(&ray, 0.1).unwrap();
    let (q0, q1) = ([0.4], [-0.2]);
    assert!((rd.rd(&q0, &q1) - r * ((q1[0] - q0[0]) / 2.0).powi(2)).abs() < 1e-15);
    // Generated forces agree with the midpoint forces.
    let expected = -r * (q1[0] - q0[0]) / 2.0;
    assert!((rd.fplus(&q0, &q1)[0] - expected).abs() < 1e-8);
    assert!((rd.fminus(&q0, &q1)[0] - expected).abs() < 1e-8);

    let zero = midpoint_rayleigh(&ScalarField::new(Layout::symplectic(1), |_| 0.0), 0.1).unwrap();
    assert_eq!(zero.fplus(&q0, &q1), vec![0.0]);
    assert_eq!(zero.fminus(&q0, &q1), vec![0.0]);

    // Double well with k = 1e-3, two dimensions.
    let kd = 1e-3;
    let h = 0.1;
    let ray2 = ScalarField::new(Layout::symplectic(2), move |s| 0.5 * kd * (s.m[0].powi(2) + s.m[1].powi(2)));
    let rd2 = midpoint_rayleigh(&ray2, h).unwrap();
    let (a, b): ([f64; 2], [f64; 2]) = ([0.1, 1.0], [0.15, 1.02]);
    let dist2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
    assert!((rd2.rd(&a, &b) - kd * h * h / 4.0 * dist2 / (h * h)).abs() < 1e-15);
}

#[test]
fn configuration_dependent_rayleigh_rejected() {
    let ray = ScalarField::new(Layout::symplectic(1), |s| s.q[0] * s.m[0] * s.m[0]);
    assert!(matches!(midpoint_rayleigh(&ray, 0.1), Err(VarintError::ConfigurationDependent(_))));
}

fn pairs() -> Vec<(Vec<f64>, Vec<f64>)> {
    vec![(vec![0.3], vec![0.5]), (vec![-1.0], vec![0.2]), (vec![2.0], vec![1.5])]
}

#[test]
fn rayleighable_examples() {
    let (exact, _) = exact_discrete_damped_oscillator(1.0, 1.0, 0.3, 0.1).unwrap();
    let c = rayleighable_check(&exact, &pairs());
    assert!(c.rayleighable && c.residual < 1e-8, "{c:?}");

    let mid = midpoint_discretize(&oscillator(1.0, 1.0, 0.3), 0.1).unwrap();
    assert!(rayleighable_check(&mid, &pairs()).rayleighable);

    let bad = DiscreteLagrangian::new(1, 0.1, |_, _| 0.0).with_forces(|q0, _| vec![q0[0]], |_, _| vec![0.0]);
    let c = rayleighable_check(&bad, &pairs());
    assert!(!c.rayleighable);
    assert!((c.residual - 1.0).abs() < 1e-8);

    // f⁺ depending on q₁ alone is −D₂ of −q₁²/2.
    let second = DiscreteLagrangian::new(1, 0.1, |_, _| 0.0).with_forces(|_, q1| vec![q1[0]], |_, _| vec![0.0]);
    assert!(rayleighable_check(&second, &pairs()).rayleighable);
}

#[test]
fn rayleighable_detects_curl_in_two_dimensions() {
    // f⁻ = (q₀², −q₀¹): D₁f⁻ is antisymmetric, so there is no potential.
    let dl = DiscreteLagrangian::new(2, 0.1, |_, _| 0.0).with_forces(|_, _| vec![0.0, 0.0], |q0, _| vec![q0[1], -q0[0]]);
    let c = rayleighable_check(&dl, &[(vec![0.1, 0.2], vec![0.3, 0.4])]);
    assert!(!c.rayleighable);
    assert!((c.residual - 2.0).abs() < 1e-8);
}

#[test]
fn free_particle_step_and_momenta() {
    let (m, h) = (2.0, 0.1);
    let dl = DiscreteLagrangian::new(1, h, move |q0, q1| h * m * ((q1[0] - q0[0]) / h).powi(2) / 2.0);
    let step = del_step(&dl, &[0.0], &[0.3]).unwrap();
    assert!((step.q_next[0] - 0.6).abs() < 1e-9);
    let (pm, pp) = discrete_legendre(&dl, &[0.0], &[0.3]);
    assert!((pm[0] - m * 3.0).abs() < 1e-7 && (pp[0] - m * 3.0).abs() < 1e-7);
}

#[test]
fn exact_discrete_del_samples_the_solution() {
    let (m, k, r, h) = (1.0, 1.0, 0.3, 0.1);
    let (dl, _) = exact_discrete_damped_oscillator(m, k, r, h).unwrap();
    let qs = del_trajectory(&dl, &[1.0], &[closed_form(m, k, r, h)], 100).unwrap();
    for (i, q) in qs.iter().enumerate() {
        assert!((q[0] - closed_form(m, k, r, i as f64 * h)).abs() < 1e-9, "step {i}");
    }
}

#[test]
fn exact_discrete_rayleigh_generates_forces() {
    let (dl, rd) = exact_discrete_damped_oscillator(2.0, 3.0, 0.7, 0.2).unwrap();
    for (q0, q1) in pairs() {
        assert!((dl.fplus(&q0, &q1)[0] - rd.fplus(&q0, &q1)[0]).abs() < 1e-14);
        assert!((dl.fminus(&q0, &q1)[0] - rd.fminus(&q0, &q1)[0]).abs() < 1e-14);
        // Partials of R_d agree with differences.
        let a = DiscreteLagrangian::new(1, 0.2, {
            let rd = rd.clone();
            move |a, b| rd.rd(a, b)
        })
        .with_partials(
            {
                let rd = rd.clone();
                move |a, b| rd.d1rd(a, b)
            },
            {
                let rd = rd.clone();
                move |a, b| rd.d2rd(a, b)
            },
        );
        assert!(a.partials_fd_mismatch(&q0, &q1) < 1e-8);
        assert!(dl.partials_fd_mismatch(&q0, &q1) < 1e-8);
    }
}

#[test]
fn exact_discrete_undamped_limit() {
    let (m, k, h) = (1.5, 2.0, 0.1);
    let (dl, _) = exact_discrete_damped_oscillator(m, k, 0.0, h).unwrap();
    let w = (k / m).sqrt();
    let (q0, q1) = ([0.3], [0.7]);
    let ho = m * w / (2.0 * (w * h).sin()) * ((q0[0] * q0[0] + q1[0] * q1[0]) * (w * h).cos() - 2.0 * q0[0] * q1[0]);
    assert!((dl.ld(&q0, &q1) - ho).abs() < 1e-12);
    assert_eq!(dl.fplus(&q0, &q1), vec![0.0]);
    assert_eq!(dl.fminus(&q0, &q1), vec![0.0]);
}

#[test]
fn exact_discrete_rejects_overdamping() {
    assert!(matches!(exact_discrete_damped_oscillator(1.0, 1.0, 2.0, 0.1), Err(VarintError::NotUnderdamped(_))));
    assert!(matches!(exact_discrete_damped_oscillator(1.0, 1.0, 3.0, 0.1), Err(VarintError::NotUnderdamped(_))));
}

#[test]
fn midpoint_step_matches_projected_flow() {
    let (m, k, r, h) = (1.0, 1.0, 0.3, 0.1);
    let dl = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
    let (q0, q1) = (1.0, 0.995);
    let step = del_step(&dl, &[q0], &[q1]).unwrap();
    assert!((step.q_next[0] - midpoint_next(m, k, r, h, q0, q1)).abs() < 1e-13);
}

#[test]
fn midpoint_legendre_transforms() {
    let (m, k, r, h) = (1.3, 0.7, 0.3, 0.1);
    let dl = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
    let (q0, q1) = (0.4, 0.55);
    let (pm, pp) = discrete_legendre(&dl, &[q0], &[q1]);
    let pm_hand = (m / h + r / 2.0) * (q1 - q0) + k * h * (q0 + q1) / 4.0;
    let pp_hand = (m / h - r / 2.0) * (q1 - q0) - k * h * (q0 + q1) / 4.0;
    assert!((pm[0] - pm_hand).abs() < 1e-13);
    assert!((pp[0] - pp_hand).abs() < 1e-13);
}

#[test]
fn midpoint_hamiltonian_flow_closed_form() {
    let (m, k, r, h) = (1.3, 0.7, 0.3, 0.1);
    let dl = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
    let (q, p) = (0.4, -0.8);
    let (q1, p1) = discrete_hamiltonian_flow(&dl, &[q], &[p]).unwrap();
    let (eq, ep) = midpoint_flow(m, k, r, h, q, p);
    assert!((q1[0] - eq).abs() < 1e-12);
    assert!((p1[0] - ep).abs() < 1e-12);

    let free = midpoint_discretize(&oscillator(m, 0.0, 0.0), h).unwrap();
    let (q1, p1) = discrete_hamiltonian_flow(&free, &[q], &[p]).unwrap();
    assert!((q1[0] - (q + h * p / m)).abs() < 1e-13);
    assert!((p1[0] - p).abs() < 1e-13);
}

#[test]
fn flow_iterates_match_del_iterates() {
    let (m, k, r, h) = (1.0, 1.0, 0.3, 0.1);
    let dl = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
    let (mut q, mut p) = (vec![1.0], vec![0.0]);
    let q1 = initial_second_point(&dl, &q, &p, None).unwrap();
    let qs = del_trajectory(&dl, &q, &q1, 200).unwrap();
    for k in 0..200 {
        let (qn, pn) = discrete_hamiltonian_flow(&dl, &q, &p).unwrap();
        assert!((qn[0] - qs[k + 1][0]).abs() < 1e-10, "step {k}");
        let (_, pplus) = discrete_legendre(&dl, &qs[k], &qs[k + 1]);
        assert!((pn[0] - pplus[0]).abs() < 1e-10);
        q = qn;
        p = pn;
    }
}

#[test]
fn midpoint_is_second_order() {
    let (m, k, r) = (1.0, 1.0, 0.3);
    let t = 2.0;
    let err = |h: f64| {
        let dl = midpoint_discretize(&oscillator(m, k, r), h).unwrap();
        let q1 = initial_second_point(&dl, &[1.0], &[0.0], None).unwrap();
        let steps = (t / h).round() as usize;
        let qs = del_trajectory(&dl, &[1.0], &q1, steps - 1).unwrap();
        (qs[steps][0] - closed_form(m, k, r, t)).abs()
    };
    let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
    assert!((3.5..=4.5).contains(&(e1 / e2)), "{}", e1 / e2);
    assert!((3.5..=4.5).contains(&(e2 / e3)), "{}", e2 / e3);
    let _ = closed_form_velocity;
}

/// Polar particle with a discrete Rayleigh potential coupling the radii and
/// the angle sum; `V` here already carries the step factor.
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
        let (r1, t1, r2, t2) = (a[0], a[1], b[0], b[1]);
        let rm = 0.5 * (r1 + r2);
        let w = (t2 - t1) / h;
        vec![-(r2 - r1) / h + h / 2.0 * rm * w * w - h * rm / 2.0, -h * rm * rm * w / h]
    };
    let d2 = move |a: &[f64], b: &[f64]| {
        let (r1, t1, r2, t2) = (a[0], a[1], b[0], b[1]);
        let rm = 0.5 * (r1 + r2);
        let w = (t2 - t1) / h;
        vec![(r2 - r1) / h + h / 2.0 * rm * w * w - h * rm / 2.0, h * rm * rm * w / h]
    };
    let dl = DiscreteLagrangian::new(2, h, ld).with_partials(d1, d2).with_rayleigh(&rd);
    let (a, b) = ([1.0, 0.1], [1.2, 0.3]);
    assert!(dl.partials_fd_mismatch(&a, &b) < 1e-8);
    dl
}

#[test]
fn rotational_noether_momentum_conserved() {
    let (h, k, eps) = (0.1, 0.2, 1e-3);
    let dl = polar_system(h, k, eps);
    let qs = del_trajectory(&dl, &[1.0, 0.0], &[1.01, 0.05], 300).unwrap();
    let rep = discrete_noether_check(&dl, |_| vec![0.0, 1.0], &qs);
    assert!(rep.precondition_holds, "{rep:?}");
    assert!(rep.drift.unwrap() < 1e-10, "{rep:?}");
    // The momentum map has the closed form of the rotational example.
    let (a, b) = (&qs[0], &qs[1]);
    let j = (0.5 * (a[0] + b[0])).powi(2) * (b[1] - a[1]) / h - eps * (a[1] + b[1]).cos();
    assert!((rep.momenta[0] - j).abs() < 1e-12);
}

#[test]
fn free_particle_translation_momentum() {
    let h = 0.1;
    let dl = DiscreteLagrangian::new(1, h, move |q0, q1| h * ((q1[0] - q0[0]) / h).powi(2) / 2.0);
    let qs = del_trajectory(&dl, &[0.0], &[0.1], 50).unwrap();
    let rep = discrete_noether_check(&dl, |_| vec![1.0], &qs);
    assert!(rep.precondition_holds && rep.drift.unwrap() < 1e-8);
}

#[test]
fn damped_translation_precondition_fails() {
    let dl = midpoint_discretize(&oscillator(1.0, 1.0, 0.3), 0.1).unwrap();
    let q1 = initial_second_point(&dl, &[1.0], &[0.0], None).unwrap();
    let qs = del_trajectory(&dl, &[1.0], &q1, 20).unwrap();
    let rep = discrete_noether_check(&dl, |_| vec![1.0], &qs);
    assert!(!rep.precondition_holds);
    assert!(rep.drift.is_none() && rep.momenta.is_empty());
    assert!(rep.precondition_residual > 1e-3);
}

#[test]
fn newton_failure_reported() {
    // D₁L_d does not depend on q₂, so the DEL equation has no solution.
    let dl = DiscreteLagrangian::new(1, 0.1, |q0, q1| q0[0] * q0[0] + q1[0]);
    assert!(matches!(del_step(&dl, &[0.0], &[1.0]), Err(VarintError::Newton { .. })));
}

#[test]
fn generic_midpoint_without_partials() {
    // Pendulum with drag; the partials come from differences.
    let (h, r) = (0.05, 0.2);
    let dl = midpoint_from_lagrangian(
        1,
        h,
        |q, v| 0.5 * v[0] * v[0] + q[0].cos(),
        None,
        Some(Arc::new(move |_q: &[f64], v: &[f64]| vec![r * v[0]])),
    )
    .unwrap();
    let q1 = initial_second_point(&dl, &[0.5], &[0.0], None).unwrap();
    let qs = del_trajectory(&dl, &[0.5], &q1, 40).unwrap();
    assert!(qs.iter().all(|q| q[0].abs() <= 0.5 + 1e-6));
    assert!(matches!(midpoint_from_lagrangian(1, 0.0, |_, _| 0.0, None, None), Err(VarintError::InvalidStep(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn del_residual_and_momentum_matching(
        q0 in -1.5..1.5f64, p0 in -1.5..1.5f64, r in 0.0..1.0f64, h in 0.01..0.3f64
    ) {
        let dl = midpoint_discretize(&oscillator(1.0, 1.0, r), h).unwrap();
        let q1 = initial_second_point(&dl, &[q0], &[p0], None).unwrap();
        let qs = del_trajectory(&dl, &[q0], &q1, 30).unwrap();
        for w in qs.windows(3) {
            let res = del_residual(&dl, &w[0], &w[1], &w[2])[0].abs();
            let scale = discrete_legendre(&dl, &w[0], &w[1]).1[0].abs().max(1.0);
            prop_assert!(res < 1e-12 * scale * 10.0, "residual {res}");
            let (_, pp) = discrete_legendre(&dl, &w[0], &w[1]);
            let (pm, _) = discrete_legendre(&dl, &w[1], &w[2]);
            prop_assert!((pp[0] - pm[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_partials_match_differences(
        q0 in -2.0..2.0f64, q1 in -2.0..2.0f64, r in 0.0..1.5f64, h in 0.01..0.5f64
    ) {
        let mid = midpoint_discretize(&oscillator(1.2, 0.8, r), h).unwrap();
        prop_assert!(mid.partials_fd_mismatch(&[q0], &[q1]) < 1e-6);
        let (exact, _) = exact_discrete_damped_oscillator(1.2, 0.8, r, h).unwrap();
        prop_assert!(exact.partials_fd_mismatch(&[q0], &[q1]) < 1e-6);
    }

    #[test]
    fn exact_discrete_interpolates(r in 0.0..1.5f64, h in 0.02..0.4f64) {
        let (m, k) = (1.0, 1.0);
        let (dl, _) = exact_discrete_damped_oscillator(m, k, r, h).unwrap();
        let qs = del_trajectory(&dl, &[1.0], &[closed_form(m, k, r, h)], 20).unwrap();
        for (i, q) in qs.iter().enumerate() {
            prop_assert!((q[0] - closed_form(m, k, r, i as f64 * h)).abs() < 1e-9);
        }
        // Momenta from the right transform are the continuous momenta.
        let (_, pp) = discrete_legendre(&dl, &qs[0], &qs[1]);
        prop_assert!((pp[0] - m * closed_form_velocity(m, k, r, h)).abs() < 1e-9);
    }
}
