//! Hamilton–Jacobi scenarios: forced HJ families and conserved quantities
//! recovered from complete solutions.

use mech_core::{poisson_bracket, CovectorField, Layout, ScalarField, State, SystemDef};
use mech_diagnostics::conserved_drift;
use mech_hamjac::{
    complete_solution_invariants, gamma_related_check, gauss_legendre, hj_residual_forced, CompleteSolution, FiberKind,
    SectionGamma,
};
use mech_integrators::{integrate, reference_solve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{Check, CheckKind};
use crate::config::RunConfig;
use crate::error::Result;
use crate::registry::Run;
use crate::support::rk4_run;

fn kinetic(n: usize) -> ScalarField {
    ScalarField::new(Layout::symplectic(n), |s| 0.5 * s.m.iter().map(|p| p * p).sum::<f64>()).with_grad(move |s| {
        let mut g = vec![0.0; n];
        g.extend_from_slice(&s.m);
        g
    })
}

fn kappas(cfg: &RunConfig) -> [f64; 2] {
    [cfg.param("kappa1"), cfg.param("kappa2")]
}

/// `H = |p|²/2` with `α_i = κ_i p_i²`.
fn quadratic_drag(kappa: [f64; 2]) -> SystemDef {
    let alpha = CovectorField::new(2, move |s| (0..2).map(|i| kappa[i] * s.m[i] * s.m[i]).collect());
    SystemDef::forced_hamiltonian(2, kinetic(2), Some(alpha))
}

fn drag_section(kappa: [f64; 2], lambda: [f64; 2]) -> SectionGamma {
    SectionGamma::one_form(2, move |q| (0..2).map(|i| lambda[i] * (-kappa[i] * q[i]).exp()).collect())
}

/// `f_a = p_a e^{κ_a q_a}` with its gradient.
fn drag_invariant(kappa: [f64; 2], a: usize) -> ScalarField {
    ScalarField::new(Layout::symplectic(2), move |s| s.m[a] * (kappa[a] * s.q[a]).exp()).with_grad(move |s| {
        let e = (kappa[a] * s.q[a]).exp();
        let mut g = vec![0.0; 4];
        g[a] = kappa[a] * s.m[a] * e;
        g[2 + a] = e;
        g
    })
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let pts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    pts.iter().flat_map(|&a| pts.iter().map(move |&b| vec![a, b])).collect()
}

fn forced_family_start() -> State {
    State::symplectic(vec![0.1, -0.2], vec![0.8, 0.5])
}

pub(crate) fn forced_family_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&quadratic_drag(kappas(cfg)), &forced_family_start(), cfg, "hj_forced_family")
}

pub(crate) fn forced_family_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let kappa = kappas(cfg);
    let sys = quadratic_drag(kappa);
    let probes = grid(10, 0.0, 1.0);
    let mut residual: f64 = 0.0;
    for lambda in [[1.0, 1.0], [-0.7, 2.5], [0.0, 0.3]] {
        residual = residual.max(hj_residual_forced(&drag_section(kappa, lambda), &sys, &probes)?);
    }
    let off = SectionGamma::one_form(2, move |q| vec![(-kappa[0] * q[0]).exp() + 0.1, (-kappa[1] * q[1]).exp()]);
    let off_residual = hj_residual_forced(&off, &sys, &probes)?;

    let reference = reference_solve(&sys, &forced_family_start(), cfg.t_end)?;
    let (f1, f2) = (drag_invariant(kappa, 0), drag_invariant(kappa, 1));
    let d1 = conserved_drift(&reference, &f1, "f1").max_abs_drift;
    let d2 = conserved_drift(&reference, &f2, "f2").max_abs_drift;

    // The invariants are the inverse fibres of the complete solution.
    let phi = CompleteSolution::new(Layout::symplectic(2), 2, FiberKind::Momenta, move |_, q, _, l| {
        ((0..2).map(|i| l[i] * (-kappa[i] * q[i]).exp()).collect(), None)
    })?;
    let mut inversion: f64 = 0.0;
    for s in reference.samples.iter().step_by(50) {
        let lam = phi.invert(s, None)?;
        inversion = inversion.max((lam[0] - f1.eval(s)).abs()).max((lam[1] - f2.eval(s)).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bracket: f64 = 0.0;
    for _ in 0..100 {
        let q: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        bracket = bracket.max(poisson_bracket(&f1, &f2, &State::symplectic(q, p))?.abs());
    }
    let related = gamma_related_check(&drag_section(kappa, [1.0, 1.0]), &sys, 0.0, &[0.0, 0.0], 1.0)?;

    Ok(vec![
        Check::below("forced HJ residual on the probe grid", CheckKind::HjResidual, residual, 1e-10),
        Check::at_least("perturbed section is not a solution", CheckKind::HjResidual, off_residual, 1e-2),
        Check::below("f1 = p1 e^(kappa1 q1) conserved", CheckKind::Conserved, d1, 1e-7),
        Check::below("f2 = p2 e^(kappa2 q2) conserved", CheckKind::Conserved, d2, 1e-7),
        Check::below("complete solution inverts to f1, f2", CheckKind::Identity, inversion, 1e-12),
        Check::below("{f1, f2} vanishes", CheckKind::Bracket, bracket, 1e-10),
        Check::below("projected and full flows are gamma-related", CheckKind::HjResidual, related.deviation, 1e-9),
    ])
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

fn total_momentum() -> ScalarField {
    ScalarField::new(Layout::symplectic(2), |s| s.m[0] + s.m[1]).with_grad(|_| vec![0.0, 0.0, 1.0, 1.0])
}

/// `p₁² − J p₁ + 1/(2d²) + J d` with `J = p₁ + p₂`, `d = q₁ − q₂`.
fn calogero_second_invariant() -> ScalarField {
    ScalarField::new(Layout::symplectic(2), |s| {
        let (d, j) = (s.q[0] - s.q[1], s.m[0] + s.m[1]);
        s.m[0] * s.m[0] - j * s.m[0] + 0.5 / (d * d) + j * d
    })
    .with_grad(|s| {
        let (d, j) = (s.q[0] - s.q[1], s.m[0] + s.m[1]);
        let dq = j - 1.0 / (d * d * d);
        vec![dq, -dq, d - s.m[1], d - s.m[0]]
    })
}

fn cm_probes() -> Vec<Vec<f64>> {
    (0..10).flat_map(|i| (0..4).map(move |j| vec![1.0 + i as f64 / 9.0 + 0.3 * j as f64, 0.3 * j as f64])).collect()
}

fn calogero_start() -> State {
    State::symplectic(vec![1.5, 0.0], vec![0.6, 0.4])
}

pub(crate) fn calogero_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&calogero_moser(), &calogero_start(), cfg, "calogero_moser")
}

pub(crate) fn calogero_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (mu, c) = (cfg.param("mu"), cfg.param("c"));
    let sys = calogero_moser();
    // γ̃² − μγ̃ = −1/(2d²) − μd + c on the level p₁ + p₂ = μ.
    let mut residual: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let g = SectionGamma::one_form(2, move |q| {
            let d = q[0] - q[1];
            let g1 = 0.5 * (mu + sign * (mu * mu - 2.0 / (d * d) - 4.0 * mu * d + 4.0 * c).sqrt());
            vec![g1, mu - g1]
        });
        residual = residual.max(hj_residual_forced(&g, &sys, &cm_probes())?);
    }
    let linear = SectionGamma::one_form(2, move |q| {
        let d = q[0] - q[1];
        let g1 = d + 1.0 / (2.0 * mu * d * d);
        vec![g1, mu - g1]
    });
    let linear_residual = hj_residual_forced(&linear, &sys, &cm_probes())?;

    let reference = reference_solve(&sys, &calogero_start(), cfg.t_end)?;
    let (j, f2) = (total_momentum(), calogero_second_invariant());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bracket: f64 = 0.0;
    for _ in 0..100 {
        let q = vec![rng.random_range(0.5..2.0), rng.random_range(-0.4..0.4)];
        let p = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        bracket = bracket.max(poisson_bracket(&j, &f2, &State::symplectic(q, p))?.abs());
    }
    Ok(vec![
        Check::below("reduced HJ residual, both branches", CheckKind::HjResidual, residual, 1e-9),
        Check::report("linear family HJ residual", linear_residual),
        Check::below("p1 + p2 conserved", CheckKind::Conserved, conserved_drift(&reference, &j, "J").max_abs_drift, 1e-8),
        Check::below("second invariant conserved", CheckKind::Conserved, conserved_drift(&reference, &f2, "f2").max_abs_drift, 1e-8),
        Check::below("invariants in involution", CheckKind::Bracket, bracket, 1e-10),
    ])
}

#[derive(Clone, Copy)]
struct Falling {
    m: f64,
    g: f64,
    gamma: f64,
}

impl Falling {
    fn from(cfg: &RunConfig) -> Self {
        Self { m: cfg.param("m"), g: cfg.param("g"), gamma: cfg.param("gamma") }
    }

    /// `H = p²/2m + m g q + γ z/m`, time carried from `t = 1`.
    fn system(self) -> SystemDef {
        let Falling { m, g, gamma } = self;
        let h = ScalarField::new(Layout::cocontact(1), move |s| s.m[0] * s.m[0] / (2.0 * m) + m * g * s.q[0] + gamma * s.z.unwrap() / m)
            .with_grad(move |s| vec![0.0, m * g, s.m[0] / m, gamma / m]);
        SystemDef::cocontact(1, h)
    }

    fn growth(self, t: f64) -> f64 {
        (self.gamma * (t - 1.0) / self.m).exp()
    }

    /// `f = e^Γ p + g m² (e^Γ − 1)/γ`, `Γ = γ(t − 1)/m`.
    fn invariant(self, t: f64, p: f64) -> f64 {
        let e = self.growth(t);
        e * p + self.g * self.m * self.m * (e - 1.0) / self.gamma
    }

    fn momentum(self, t: f64, f: f64) -> f64 {
        let e = self.growth(t);
        (f - self.g * self.m * self.m * (e - 1.0) / self.gamma) / e
    }
}

fn falling_start() -> State {
    State::new(1.0, vec![0.0], vec![0.3], Some(0.0))
}

pub(crate) fn falling_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&Falling::from(cfg).system(), &falling_start(), cfg, "falling_particle")
}

pub(crate) fn falling_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let fp = Falling::from(cfg);
    let traj = integrate(&fp.system(), &falling_start(), cfg.dt, cfg.t_end, None)?;
    let phi = CompleteSolution::new(Layout::cocontact(1), 1, FiberKind::Momenta, move |t, _, _, l| (vec![fp.momentum(t, l[0])], None))?;
    let reports = complete_solution_invariants(&phi, &traj, &["f"])?;
    let f = ScalarField::new(Layout::cocontact(1), move |s| fp.invariant(s.t, s.m[0]));
    let mut inversion: f64 = 0.0;
    for s in &traj.samples {
        inversion = inversion.max((phi.invert(s, None)?[0] - f.eval(s)).abs());
    }
    let p = ScalarField::new(Layout::cocontact(1), |s| s.m[0]);
    Ok(vec![
        Check::below("f conserved along the flow", CheckKind::Conserved, conserved_drift(&traj, &f, "f").max_abs_drift, 1e-8),
        Check::below("complete-solution invariant conserved", CheckKind::Conserved, reports[0].max_abs_drift, 1e-8),
        Check::below("complete solution inverts to f", CheckKind::Identity, inversion, 1e-10),
        Check::at_least("momentum is not conserved", CheckKind::Property, conserved_drift(&traj, &p, "p").max_abs_drift, 0.1),
    ])
}

const W: f64 = 1.732_050_807_568_877_2;

/// Damped oscillator driven by `sin t` with `m = k = γ = 1`.
fn forced_oscillator() -> SystemDef {
    let h = ScalarField::new(Layout::cocontact(1), |s| {
        let (q, p, z) = (s.q[0], s.m[0], s.z.unwrap());
        0.5 * p * p + 0.5 * q * q - q * s.t.sin() + z
    });
    SystemDef::cocontact(1, h)
}

/// `∫₁ᵗ sin s e^{s/2} (cos ωs/2 + sin(ωs/2)/ω) ds`.
fn forcing_integral(t: f64) -> f64 {
    let x = |s: f64| s / 2.0;
    gauss_legendre(|s| s.sin() * x(s).exp() * ((W * x(s)).cos() + (W * x(s)).sin() / W), 1.0, t, 40)
}

fn g_invariant(t: f64, q: f64, p: f64) -> f64 {
    let x = t / 2.0;
    x.exp() * ((W * x).sin() / W * (2.0 * q + p) + p * (W * x).cos()) - forcing_integral(t)
}

fn forced_oscillator_solution() -> Result<CompleteSolution> {
    let big_p = |t: f64, q: f64, l: f64| {
        let x = t / 2.0;
        (-x).exp() * (W * forcing_integral(t) - 2.0 * q * x.exp() * (W * x).sin() + W * l) / ((W * x).sin() + W * (W * x).cos())
    };
    Ok(CompleteSolution::new(Layout::cocontact(1), 1, FiberKind::Momenta, move |t, q, _, l| (vec![big_p(t, q[0], l[0])], None))?)
}

fn forced_oscillator_start() -> State {
    State::new(1.0, vec![0.5], vec![-0.2], Some(0.0))
}

pub(crate) fn forced_oscillator_simulate(cfg: &RunConfig) -> Result<Run> {
    rk4_run(&forced_oscillator(), &forced_oscillator_start(), cfg, "damped_forced_oscillator")
}

pub(crate) fn forced_oscillator_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let traj = integrate(&forced_oscillator(), &forced_oscillator_start(), cfg.dt, cfg.t_end, None)?;
    let phi = forced_oscillator_solution()?;
    let reports = complete_solution_invariants(&phi, &traj, &["g"])?;
    let mut inversion: f64 = 0.0;
    for s in &traj.samples {
        inversion = inversion.max((phi.invert(s, None)?[0] - g_invariant(s.t, s.q[0], s.m[0])).abs());
    }
    Ok(vec![
        Check::below("g conserved along the flow", CheckKind::Conserved, reports[0].max_abs_drift, 1e-7),
        Check::below("complete solution inverts to g", CheckKind::Identity, inversion, 1e-10),
    ])
}
