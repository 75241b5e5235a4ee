use mech_core::{poisson_bracket, CovectorField, Layout, ScalarField, State, SystemDef};
use mech_hamjac::*;
use mech_integrators::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KAPPA: [f64; 2] = [1.0, 2.0];

fn kinetic(n: usize) -> ScalarField {
    ScalarField::new(Layout::symplectic(n), |s| 0.5 * s.m.iter().map(|p| p * p).sum::<f64>()).with_grad(move |s| {
        let mut g = vec![0.0; n];
        g.extend_from_slice(&s.m);
        g
    })
}

/// `H = |p|²/2` with `α_i = κ_i p_i²`.
fn quadratic_drag(kappa: &'static [f64]) -> SystemDef {
    let n = kappa.len();
    let alpha = CovectorField::new(n, move |s| (0..n).map(|i| kappa[i] * s.m[i] * s.m[i]).collect());
    SystemDef::forced_hamiltonian(n, kinetic(n), Some(alpha))
}

fn drag_section(kappa: &'static [f64], lambda: Vec<f64>) -> SectionGamma {
    SectionGamma::one_form(kappa.len(), move |q| (0..q.len()).map(|i| lambda[i] * (-kappa[i] * q[i]).exp()).collect())
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let pts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    pts.iter().flat_map(|&a| pts.iter().map(move |&b| vec![a, b])).collect()
}

#[test]
fn exponential_sections_solve_forced_hj() {
    let sys = quadratic_drag(&KAPPA);
    for lambda in [vec![1.0, 1.0], vec![-0.7, 2.5], vec![0.0, 0.3]] {
        let r = hj_residual_forced(&drag_section(&KAPPA, lambda), &sys, &grid(10, 0.0, 1.0)).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }
}

#[test]
fn non_solution_has_large_residual() {
    let sys = quadratic_drag(&KAPPA);
    let g = SectionGamma::one_form(2, |q| vec![(-q[0]).exp() + 0.1, (-2.0 * q[1]).exp()]);
    assert!(hj_residual_forced(&g, &sys, &grid(5, 0.0, 1.0)).unwrap() > 1e-2);
}

#[test]
fn constant_energy_sections_have_zero_residual() {
    // Unforced oscillator, γ = √(2E − q²) keeps H∘γ = E.
    let h = ScalarField::new(Layout::symplectic(1), |s| 0.5 * (s.m[0] * s.m[0] + s.q[0] * s.q[0]))
        .with_grad(|s| vec![s.q[0], s.m[0]]);
    let sys = SystemDef::forced_hamiltonian(1, h, None);
    let g = SectionGamma::one_form(1, |q| vec![(2.0 - q[0] * q[0]).sqrt()]);
    let probes: Vec<Vec<f64>> = (0..11).map(|i| vec![-1.0 + 0.2 * i as f64]).collect();
    assert!(hj_residual_forced(&g, &sys, &probes).unwrap() < 1e-10);
}

#[test]
fn open_sections_are_rejected() {
    let sys = quadratic_drag(&KAPPA);
    let g = SectionGamma::one_form(2, |q| vec![q[1], -q[0]]);
    assert!(matches!(hj_residual_forced(&g, &sys, &grid(3, 0.0, 1.0)), Err(HamJacError::NotClosed(_))));
}

fn calogero_moser() -> SystemDef {
    let h = ScalarField::new(Layout::symplectic(2), |s| {
        let d = s.q[0] - s.q[1];
        0.5 * (s.m[0] * s.m[0] + s.m[1] * s.m[1] + 1.0 / (d * d))
    })
    .with_grad(|s| {
        let d = s.q[0] - s.q[1];
        let c = -1.0 / (d * d * d);
        vec![c, -c, s.m[0], s.m[1]]
    });
    let alpha = CovectorField::new(2, |s| {
        let j = s.m[0] + s.m[1];
        vec![j, -j]
    });
    SystemDef::forced_hamiltonian(2, h, Some(alpha))
}

fn cm_probes() -> Vec<Vec<f64>> {
    (0..10).flat_map(|i| (0..4).map(move |j| vec![1.0 + i as f64 / 9.0 + 0.3 * j as f64, 0.3 * j as f64])).collect()
}

#[test]
fn calogero_moser_reduced_family() {
    // γ̃² − μγ̃ = −1/(2q²) − μq + c on the level p₁ + p₂ = μ.
    let (mu, c) = (1.0, 5.0);
    for sign in [1.0, -1.0] {
        let g = SectionGamma::one_form(2, move |q| {
            let d = q[0] - q[1];
            let g1 = 0.5 * (mu + sign * (mu * mu - 2.0 / (d * d) - 4.0 * mu * d + 4.0 * c).sqrt());
            vec![g1, mu - g1]
        });
        let r = hj_residual_forced(&g, &calogero_moser(), &cm_probes()).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }
}

#[test]
fn calogero_moser_linear_family_is_reported() {
    let (mu, lambda) = (1.0, 0.0);
    let g = SectionGamma::one_form(2, move |q| {
        let d = q[0] - q[1];
        let g1 = d + 1.0 / (2.0 * mu * d * d) + lambda;
        vec![g1, mu - g1]
    });
    let r = hj_residual_forced(&g, &calogero_moser(), &cm_probes()).unwrap();
    eprintln!("linear Calogero–Moser family: residual {r:e}");
    assert!(r.is_finite());
}

#[test]
fn drag_section_is_gamma_related() {
    static K1: [f64; 1] = [1.0];
    let sys = quadratic_drag(&K1);
    let rel = gamma_related_check(&drag_section(&K1, vec![1.0]), &sys, 0.0, &[0.0], 1.0).unwrap();
    assert!(rel.deviation < 1e-9, "deviation {}", rel.deviation);
    assert_eq!(rel.projected.len(), rel.full.len());

    let off = SectionGamma::one_form(1, |q| vec![(-q[0]).exp() + 0.1]);
    let bad = gamma_related_check(&off, &sys, 0.0, &[0.0], 1.0).unwrap();
    assert!(bad.deviation > 1e-3, "deviation {}", bad.deviation);
}

#[test]
fn leaving_the_domain_is_an_error() {
    static K1: [f64; 1] = [1.0];
    let sys = quadratic_drag(&K1);
    let g = drag_section(&K1, vec![1.0]).with_domain(|_, q| q[0] < 0.2);
    assert!(matches!(gamma_related_check(&g, &sys, 0.0, &[0.0], 1.0), Err(HamJacError::LeftDomain(_))));
}

fn drag_solution() -> CompleteSolution {
    CompleteSolution::new(Layout::symplectic(2), 2, FiberKind::Momenta, |_, q, _, l| {
        ((0..2).map(|i| l[i] * (-KAPPA[i] * q[i]).exp()).collect(), None)
    })
    .unwrap()
}

#[test]
fn drag_invariants_are_recovered_and_conserved() {
    let sys = quadratic_drag(&KAPPA);
    let s0 = State::symplectic(vec![0.1, -0.2], vec![0.8, 0.5]);
    let traj = integrate(&sys, &s0, 1e-2, 5.0, None).unwrap();
    let phi = drag_solution();
    let reports = complete_solution_invariants(&phi, &traj, &["f1", "f2"]).unwrap();
    for r in &reports {
        assert!(r.max_abs_drift < 1e-7, "{r:?}");
    }
    for s in traj.samples.iter().step_by(50) {
        let lam = phi.invert(s, None).unwrap();
        for a in 0..2 {
            assert!((lam[a] - s.m[a] * (KAPPA[a] * s.q[a]).exp()).abs() < 1e-12);
        }
    }
}

#[test]
fn drag_invariants_are_in_involution() {
    let phi = drag_solution();
    let (f1, f2) = (phi.invariant_field(0), phi.invariant_field(1));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let q: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = poisson_bracket(&f1, &f2, &State::symplectic(q, p)).unwrap();
        assert!(b.abs() < 1e-6, "bracket {b}");
    }
}

#[test]
fn parameter_count_must_match_fiber() {
    let err = CompleteSolution::new(Layout::symplectic(2), 3, FiberKind::Momenta, |_, _, _, _| (vec![0.0; 2], None));
    assert!(matches!(err, Err(HamJacError::ParameterCount { params: 3, equations: 2 })));
}

/// `H = p²/(2m(t)) − κ z/m(t)` as a cocontact system.
fn variable_mass(kappa: f64, mass: fn(f64) -> f64) -> SystemDef {
    let h = ScalarField::new(Layout::cocontact(1), move |s| {
        let m = mass(s.t);
        s.m[0] * s.m[0] / (2.0 * m) - kappa * s.z.unwrap() / m
    });
    SystemDef::cocontact(1, h)
}

/// `S_λ = λ₁ e^{K(t)} + (√(κ/2) q + λ₂)²` with `K = κ ∫₀ᵗ 1/m`.
fn variable_mass_action(kappa: f64, big_k: fn(f64) -> f64, l1: f64, l2: f64) -> SectionGamma {
    let c = (kappa / 2.0).sqrt();
    SectionGamma::generating(1, move |t, q| l1 * big_k(t).exp() + (c * q[0] + l2).powi(2))
}

fn unit_mass(_: f64) -> f64 {
    1.0
}
fn growing_mass(t: f64) -> f64 {
    1.0 + t
}
fn k_unit(t: f64) -> f64 {
    t
}
fn k_growing(t: f64) -> f64 {
    (1.0 + t).ln()
}

#[test]
fn variable_mass_action_solves_time_dependent_hj() {
    let probes: Vec<(f64, Vec<f64>)> =
        (0..9).flat_map(|i| (0..9).map(move |j| (0.25 * i as f64, vec![-1.0 + 0.25 * j as f64]))).collect();
    for (m, k) in [(unit_mass as fn(f64) -> f64, k_unit as fn(f64) -> f64), (growing_mass, k_growing)] {
        let s = variable_mass_action(1.0, k, 0.7, 0.3);
        let r = hj_residual_contact_time(&s, &variable_mass(1.0, m), &probes).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }
    // The constant-mass case with arbitrary κ.
    let kappa = 0.6;
    let c = (kappa / 2.0_f64).sqrt();
    let s = SectionGamma::generating(1, move |t, q| (kappa * t).exp() + (c * q[0] - 0.4).powi(2));
    let h = ScalarField::new(Layout::cocontact(1), move |s| 0.5 * s.m[0] * s.m[0] - kappa * s.z.unwrap());
    let r = hj_residual_contact_time(&s, &SystemDef::cocontact(1, h), &probes).unwrap();
    assert!(r < 1e-10, "residual {r}");
}

#[test]
fn trivial_time_dependent_hj() {
    let h = ScalarField::new(Layout::cocontact(1), |_| 0.0);
    let s = SectionGamma::generating(1, |_, _| 3.0);
    assert_eq!(hj_residual_contact_time(&s, &SystemDef::cocontact(1, h), &[(0.5, vec![1.0])]).unwrap(), 0.0);
}

#[test]
fn variable_mass_curves_match_closed_form() {
    let (l1, l2, kappa) = (0.7, 0.3, 1.0);
    let r2 = 2.0f64.sqrt();
    let cases: [(fn(f64) -> f64, fn(f64) -> f64, f64, f64); 2] = [(unit_mass, k_unit, 0.0, 2.0), (growing_mass, k_growing, 1.0, 3.0)];
    for (m, k, t0, t1) in cases {
        let sys = variable_mass(kappa, m);
        let s_lambda = variable_mass_action(kappa, k, l1, l2);
        let rel = gamma_related_check(&s_lambda, &sys, t0, &[0.4], t1).unwrap();
        assert!(rel.deviation < 1e-6, "deviation {}", rel.deviation);
        // σ(t) from the closed form, normalised by c = σ(1).
        let sigma = |t: f64, c: f64| {
            if m(2.0) == 1.0 {
                (t - 1.0).exp() * (r2 * l2 * (1.0 - (-(t - 1.0)).exp()) + c)
            } else {
                0.5 * (1.0 + t) * (2.0 * r2 * l2 * (0.5 - 1.0 / (1.0 + t)) + c)
            }
        };
        // Started at t = 0 with unit mass, σ(0; c) = σ(0; 0) + c/e.
        let c = if t0 == 1.0 { 0.4 } else { (0.4 - sigma(0.0, 0.0)) * 1f64.exp() };
        for s in &rel.full.samples {
            let q = sigma(s.t, c);
            let p = (2.0 * kappa).sqrt() * ((kappa / 2.0).sqrt() * q + l2);
            let z = l1 * k(s.t).exp() + ((kappa / 2.0).sqrt() * q + l2).powi(2);
            let gap = (q - s.q[0]).abs().max((p - s.m[0]).abs()).max((z - s.z.unwrap()).abs());
            assert!(gap < 1e-6, "t = {}: gap {gap}", s.t);
        }
    }
}

#[test]
fn variable_mass_invariants() {
    let kappa = 1.0;
    let sys = variable_mass(kappa, growing_mass);
    let phi = CompleteSolution::new(Layout::cocontact(1), 2, FiberKind::MomentaAndAction, move |t, q, _, l| {
        let c = (kappa / 2.0_f64).sqrt();
        let b = c * q[0] + l[1];
        (vec![(2.0 * kappa).sqrt() * b], Some(l[0] * k_growing(t).exp() + b * b))
    })
    .unwrap();
    let s0 = State::new(0.0, vec![0.2], vec![-0.3], Some(0.9));
    let traj = integrate(&sys, &s0, 1e-2, 2.0, None).unwrap();
    let reports = complete_solution_invariants(&phi, &traj, &["f1", "f2"]).unwrap();
    for r in &reports {
        assert!(r.max_abs_drift < 1e-7, "{r:?}");
    }
    for s in &traj.samples {
        let lam = phi.invert(s, None).unwrap();
        let (p, z) = (s.m[0], s.z.unwrap());
        let f1 = (-k_growing(s.t)).exp() * (z - p * p / (2.0 * kappa));
        let f2 = (p - kappa * s.q[0]) / (2.0 * kappa).sqrt();
        assert!((lam[0] - f1).abs() < 1e-10 && (lam[1] - f2).abs() < 1e-10);
    }
}

#[test]
fn forced_damped_oscillator_recovers_conserved_quantity() {
    // m = k = γ = 1 and F = sin t: underdamped, so the hyperbolic functions
    // of the imaginary rate become trigonometric ones of ω = √3.
    let w = 3.0f64.sqrt();
    let x = |t: f64| t / 2.0;
    let integral = move |t: f64| gauss_legendre(|s| s.sin() * x(s).exp() * ((w * x(s)).cos() + (w * x(s)).sin() / w), 1.0, t, 40);
    let g = move |t: f64, q: f64, p: f64| {
        x(t).exp() * ((w * x(t)).sin() / w * (2.0 * q + p) + p * (w * x(t)).cos()) - integral(t)
    };
    let big_p = move |t: f64, q: f64, l: f64| {
        (-x(t)).exp() * (w * integral(t) - 2.0 * q * x(t).exp() * (w * x(t)).sin() + w * l)
            / ((w * x(t)).sin() + w * (w * x(t)).cos())
    };
    let h = ScalarField::new(Layout::cocontact(1), |s| {
        let (q, p, z) = (s.q[0], s.m[0], s.z.unwrap());
        0.5 * p * p + 0.5 * q * q - q * s.t.sin() + z
    });
    let sys = SystemDef::cocontact(1, h);
    let phi = CompleteSolution::new(Layout::cocontact(1), 1, FiberKind::Momenta, move |t, q, _, l| (vec![big_p(t, q[0], l[0])], None))
        .unwrap();
    let s0 = State::new(1.0, vec![0.5], vec![-0.2], Some(0.0));
    let traj = integrate(&sys, &s0, 1e-2, 2.2, None).unwrap();
    let reports = complete_solution_invariants(&phi, &traj, &["g"]).unwrap();
    assert!(reports[0].max_abs_drift < 1e-7, "{:?}", reports[0]);
    for s in &traj.samples {
        let lam = phi.invert(s, None).unwrap()[0];
        assert!((lam - g(s.t, s.q[0], s.m[0])).abs() < 1e-10);
    }
}

#[test]
fn discrete_hj_on_damped_midpoint_oscillator() {
    let osc = MidpointOscillator { m: 1.0, k: 1.0, r: 0.3, h: 0.1 };
    let rep = discrete_hj_check(&osc, 1.0, 0.99, 50).unwrap();
    assert_eq!(rep.sequence.len(), 51);
    assert!(rep.passes(1e-10), "{rep:?}");
    assert!(rep.plus_vs_unforced > 1e-4);
    eprintln!("printed three-point left momentum: gap {:e}", rep.printed_gamma_minus_gap);
}

#[test]
fn discrete_hj_without_damping_uses_unforced_momentum() {
    let osc = MidpointOscillator { m: 1.0, k: 1.0, r: 0.0, h: 0.1 };
    let rep = discrete_hj_check(&osc, 1.0, 0.99, 50).unwrap();
    assert!(rep.passes(1e-10), "{rep:?}");
    assert_eq!(rep.plus_vs_unforced, 0.0);
}
