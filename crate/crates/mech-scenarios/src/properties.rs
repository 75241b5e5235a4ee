//! Seeded property sweeps: bracket identities with analytic fields,
//! analytic gradients against differences and elastic impact maps.

use mech_core::{
    dissipative_bracket, gradient_fd_mismatch, jacobi_bracket_contact, poisson_bracket, Layout, Metric, ScalarField,
    State, SystemDef,
};
use mech_hybrid::{billiard_impact, disk_wall_impact, newton_impact_map, DiskParams, Guard, ImpactForm, ImpactMap};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{Check, CheckKind};
use crate::error::Result;

pub const PROBES: usize = 100;
const N: usize = 2;

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

/// `a·x + xᵀBx + c·sin x` over the flat coordinates of `layout`, with its
/// gradient written out.
pub fn random_poly(rng: &mut ChaCha8Rng, layout: Layout) -> ScalarField {
    let d = layout.len();
    let (a, b, c) = (uniform(rng, d, 1.0), uniform(rng, d * d, 1.0), uniform(rng, d, 1.0));
    let (a2, b2, c2) = (a.clone(), b.clone(), c.clone());
    ScalarField::new(layout, move |s| {
        let x = s.to_flat(&layout);
        let mut v = 0.0;
        for i in 0..d {
            v += a[i] * x[i] + c[i] * x[i].sin();
            for j in 0..d {
                v += b[i * d + j] * x[i] * x[j];
            }
        }
        v
    })
    .with_grad(move |s| {
        let x = s.to_flat(&layout);
        (0..d)
            .map(|i| {
                let mut g = a2[i] + c2[i] * x[i].cos();
                for j in 0..d {
                    g += (b2[i * d + j] + b2[j * d + i]) * x[j];
                }
                g
            })
            .collect()
    })
}

pub fn product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    let (f1, g1, f2, g2) = (f.clone(), g.clone(), f.clone(), g.clone());
    ScalarField::new(f.layout(), move |s| f1.eval(s) * g1.eval(s)).with_grad(move |s| {
        let (fv, gv) = (f2.eval(s), g2.eval(s));
        let (df, dg) = (f2.gradient(s).values, g2.gradient(s).values);
        df.iter().zip(&dg).map(|(a, b)| a * gv + b * fv).collect()
    })
}

fn probe(rng: &mut ChaCha8Rng, layout: Layout) -> State {
    State::from_flat(&layout, &uniform(rng, layout.len(), 1.0), 0.0)
}

fn bracket_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (sl, cl) = (Layout::symplectic(N), Layout::contact(N));
    let (mut poisson, mut jacobi, mut leibniz, mut sym, mut dleib, mut grads): (f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..PROBES {
        let (f, g) = (random_poly(rng, sl), random_poly(rng, sl));
        let s = probe(rng, sl);
        poisson = poisson.max((poisson_bracket(&f, &g, &s)? + poisson_bracket(&g, &f, &s)?).abs());

        let (f, g, h) = (random_poly(rng, cl), random_poly(rng, cl), random_poly(rng, cl));
        let s = probe(rng, cl);
        jacobi = jacobi.max((jacobi_bracket_contact(&f, &g, &s)? + jacobi_bracket_contact(&g, &f, &s)?).abs());
        let leib = jacobi_bracket_contact(&f, &product(&g, &h), &s)?
            - jacobi_bracket_contact(&f, &g, &s)? * h.eval(&s)
            - jacobi_bracket_contact(&f, &h, &s)? * g.eval(&s)
            + g.eval(&s) * h.eval(&s) * f.gradient(&s).dz();
        leibniz = leibniz.max(leib.abs());
        grads = grads.max(gradient_fd_mismatch(&f, &s));

        let a = DMatrix::from_vec(N, N, uniform(rng, N * N, 1.0));
        let metric = &a * a.transpose() + DMatrix::identity(N, N);
        let zero = ScalarField::new(sl, |_| 0.0);
        let sys = SystemDef::mechanical(N, Metric::Constant(metric), zero.clone(), zero);
        let (f, g, h) = (random_poly(rng, sl), random_poly(rng, sl), random_poly(rng, sl));
        let s = probe(rng, sl);
        let fg = dissipative_bracket(&f, &g, &sys, &s)?;
        sym = sym.max((fg - dissipative_bracket(&g, &f, &sys, &s)?).abs());
        let lhs = dissipative_bracket(&f, &product(&g, &h), &sys, &s)?;
        let rhs = fg * h.eval(&s) + dissipative_bracket(&f, &h, &sys, &s)? * g.eval(&s);
        dleib = dleib.max((lhs - rhs).abs());
        grads = grads.max(gradient_fd_mismatch(&f, &s));
    }
    Ok(vec![
        Check::below("Poisson bracket antisymmetry", CheckKind::Property, poisson, 1e-8),
        Check::below("Jacobi bracket antisymmetry", CheckKind::Property, jacobi, 1e-8),
        Check::below("Jacobi bracket weak Leibniz rule", CheckKind::Property, leibniz, 1e-8),
        Check::below("dissipative bracket symmetry", CheckKind::Property, sym, 1e-8),
        Check::below("dissipative bracket Leibniz rule", CheckKind::Property, dleib, 1e-8),
        Check::below("analytic gradients vs central differences", CheckKind::Property, grads, 1e-5),
    ])
}

fn involution_gap(map: &ImpactMap, s: &State) -> Result<f64> {
    let back = map.apply(&map.apply(s)?)?;
    let gap = back.m.iter().zip(&s.m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(back.q.iter().zip(&s.q).map(|(a, b)| (a - b).abs()).fold(gap, f64::max))
}

fn impact_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let disk = disk_wall_impact(DiskParams::default());
    let billiard = billiard_impact();
    let (mut newton, mut circle, mut wall): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..PROBES {
        let a = DMatrix::from_vec(3, 3, uniform(rng, 9, 1.0));
        let g = &a * a.transpose() + DMatrix::identity(3, 3);
        let c = uniform(rng, 3, 1.0);
        let guard = Guard::new("sphere", move |q| 2.0 - q.iter().zip(&c).map(|(x, c)| (x - c).powi(2)).sum::<f64>());
        let map = newton_impact_map(Metric::Constant(g), &guard, 1.0, ImpactForm::Momentum)?;
        let s = State::symplectic(uniform(rng, 3, 1.0), uniform(rng, 3, 2.0));
        newton = newton.max(involution_gap(&map, &s)?);

        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = State::contact(vec![th.cos(), th.sin()], uniform(rng, 2, 2.0), rng.random_range(-1.0..1.0));
        circle = circle.max(involution_gap(&billiard, &s)?);

        let px: f64 = rng.random_range(-1.0..1.0);
        let y = if rng.random_bool(0.5) { 2.0 } else { 1.0 };
        let s = State::symplectic(vec![rng.random_range(-1.0..1.0), y, rng.random_range(-3.0..3.0)], vec![
            px,
            rng.random_range(-1.5..1.5),
            px,
        ]);
        wall = wall.max(involution_gap(&disk, &s)?);
    }
    Ok(vec![
        Check::below("elastic Newton map is an involution", CheckKind::Property, newton, 1e-12),
        Check::below("billiard reflection is an involution", CheckKind::Property, circle, 1e-12),
        Check::below("elastic disk wall map is an involution", CheckKind::Property, wall, 1e-12),
    ])
}

/// Every property sweep, seeded for reproducibility.
pub fn property_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = bracket_checks(&mut rng)?;
    out.extend(impact_checks(&mut rng)?);
    Ok(out)
}
