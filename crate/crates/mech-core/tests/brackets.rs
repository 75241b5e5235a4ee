use mech_core::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

const N: usize = 2;

/// `a·x + xᵀ B x + c·sin(x)` over a flat layout.
#[derive(Clone, Debug)]
struct Poly {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Poly {
    fn field(&self, layout: Layout) -> ScalarField {
        let d = layout.len();
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
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
}

fn poly(d: usize) -> impl Strategy<Value = Poly> {
    (
        prop::collection::vec(-1.0..1.0f64, d),
        prop::collection::vec(-1.0..1.0f64, d * d),
        prop::collection::vec(-1.0..1.0f64, d),
    )
        .prop_map(|(a, b, c)| Poly { a, b, c })
}

fn point(layout: Layout) -> impl Strategy<Value = State> {
    prop::collection::vec(-1.0..1.0f64, layout.len()).prop_map(move |x| State::from_flat(&layout, &x, 0.0))
}

fn product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    let (f1, g1, f2, g2) = (f.clone(), g.clone(), f.clone(), g.clone());
    ScalarField::new(f.layout(), move |s| f1.eval(s) * g1.eval(s)).with_grad(move |s| {
        let (fv, gv) = (f2.eval(s), g2.eval(s));
        let (df, dg) = (f2.gradient(s).values, g2.gradient(s).values);
        df.iter().zip(&dg).map(|(a, b)| a * gv + b * fv).collect()
    })
}

type Bracket = fn(&ScalarField, &ScalarField, &State) -> Result<f64>;

/// `{f,g}` as a field with difference-quotient derivatives.
fn bracket_field(br: Bracket, f: &ScalarField, g: &ScalarField) -> ScalarField {
    let (f, g) = (f.clone(), g.clone());
    ScalarField::new(f.layout(), move |s| br(&f, &g, s).unwrap())
}

fn jacobiator(br: Bracket, f: &ScalarField, g: &ScalarField, h: &ScalarField, s: &State) -> f64 {
    br(f, &bracket_field(br, g, h), s).unwrap()
        + br(g, &bracket_field(br, h, f), s).unwrap()
        + br(h, &bracket_field(br, f, g), s).unwrap()
}

fn spd(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        &a * a.transpose() + DMatrix::identity(n, n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_gradients_match_differences(p in poly(2 * N + 1), s in point(Layout::contact(N))) {
        let f = p.field(Layout::contact(N));
        prop_assert!(gradient_fd_mismatch(&f, &s) < 1e-5);
    }

    #[test]
    fn poisson_is_antisymmetric(p in poly(2 * N), q in poly(2 * N), s in point(Layout::symplectic(N))) {
        let l = Layout::symplectic(N);
        let (f, g) = (p.field(l), q.field(l));
        let sum = poisson_bracket(&f, &g, &s).unwrap() + poisson_bracket(&g, &f, &s).unwrap();
        prop_assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn poisson_jacobi_identity(
        p in poly(2 * N), q in poly(2 * N), r in poly(2 * N), s in point(Layout::symplectic(N))
    ) {
        let l = Layout::symplectic(N);
        let j = jacobiator(poisson_bracket, &p.field(l), &q.field(l), &r.field(l), &s);
        prop_assert!(j.abs() < 1e-4, "jacobiator {j}");
    }

    #[test]
    fn poisson_generates_hamiltonian_flow(p in poly(2 * N), q in poly(2 * N), s in point(Layout::symplectic(N))) {
        let l = Layout::symplectic(N);
        let (h, g) = (p.field(l), q.field(l));
        let sys = SystemDef::forced_hamiltonian(N, h.clone(), None);
        let x = sys.vector_field(&s).unwrap();
        let dg = g.gradient(&s).values;
        let rate: f64 = dg.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((rate - poisson_bracket(&g, &h, &s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn jacobi_bracket_antisymmetry_and_weak_leibniz(
        p in poly(2 * N + 1), q in poly(2 * N + 1), r in poly(2 * N + 1), s in point(Layout::contact(N))
    ) {
        let l = Layout::contact(N);
        let (f, g, h) = (p.field(l), q.field(l), r.field(l));
        let anti = jacobi_bracket_contact(&f, &g, &s).unwrap() + jacobi_bracket_contact(&g, &f, &s).unwrap();
        prop_assert!(anti.abs() < 1e-8);
        let gh = product(&g, &h);
        let fz = f.gradient(&s).dz();
        let leib = jacobi_bracket_contact(&f, &gh, &s).unwrap()
            - jacobi_bracket_contact(&f, &g, &s).unwrap() * h.eval(&s)
            - jacobi_bracket_contact(&f, &h, &s).unwrap() * g.eval(&s)
            + g.eval(&s) * h.eval(&s) * fz;
        prop_assert!(leib.abs() < 1e-8, "weak Leibniz defect {leib}");
    }

    #[test]
    fn jacobi_bracket_jacobi_identity(
        p in poly(2 * N + 1), q in poly(2 * N + 1), r in poly(2 * N + 1), s in point(Layout::contact(N))
    ) {
        let l = Layout::contact(N);
        let j = jacobiator(jacobi_bracket_contact, &p.field(l), &q.field(l), &r.field(l), &s);
        prop_assert!(j.abs() < 1e-4, "jacobiator {j}");
    }

    #[test]
    fn contact_evolution_through_bracket(p in poly(2 * N + 1), q in poly(2 * N + 1), s in point(Layout::contact(N))) {
        let l = Layout::contact(N);
        let (h, g) = (p.field(l), q.field(l));
        let sys = SystemDef::contact(N, h.clone());
        let x = sys.vector_field(&s).unwrap();
        let dg = g.gradient(&s).values;
        let rate: f64 = dg.iter().zip(&x).map(|(a, b)| a * b).sum();
        let expected = jacobi_bracket_contact(&h, &g, &s).unwrap() - g.eval(&s) * h.gradient(&s).dz();
        prop_assert!((rate - expected).abs() < 1e-10);
    }

    #[test]
    fn dissipative_bracket_symmetry_and_leibniz(
        p in poly(2 * N), q in poly(2 * N), r in poly(2 * N), g in spd(N), s in point(Layout::symplectic(N))
    ) {
        let l = Layout::symplectic(N);
        let zero = ScalarField::new(l, |_| 0.0);
        let sys = SystemDef::mechanical(N, Metric::Constant(g), zero.clone(), zero);
        let (a, b, c) = (p.field(l), q.field(l), r.field(l));
        let ab = dissipative_bracket(&a, &b, &sys, &s).unwrap();
        let ba = dissipative_bracket(&b, &a, &sys, &s).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        let bc = product(&b, &c);
        let lhs = dissipative_bracket(&a, &bc, &sys, &s).unwrap();
        let rhs = ab * c.eval(&s) + dissipative_bracket(&a, &c, &sys, &s).unwrap() * b.eval(&s);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn dissipative_bracket_of_rayleigh_gives_force() {
    // With R = k|v|²/2 and g = I, {R, v_i} = k v_i.
    let l = Layout::symplectic(2);
    let k = 0.3;
    let r = ScalarField::new(l, move |s| 0.5 * k * (s.m[0] * s.m[0] + s.m[1] * s.m[1]));
    let v0 = ScalarField::new(l, |s| s.m[0]);
    let zero = ScalarField::new(l, |_| 0.0);
    let sys = SystemDef::mechanical(2, Metric::identity(2), zero.clone(), zero);
    let s = State::symplectic(vec![0.1, 0.2], vec![1.5, -0.5]);
    let b = dissipative_bracket(&r, &v0, &sys, &s).unwrap();
    assert!((b - k * 1.5).abs() < 1e-8);
}

#[test]
fn layout_mismatch_is_an_error() {
    let f = ScalarField::new(Layout::symplectic(1), |_| 0.0);
    let g = ScalarField::new(Layout::contact(1), |_| 0.0);
    let s = State::contact(vec![0.0], vec![0.0], 0.0);
    assert!(matches!(poisson_bracket(&f, &g, &s), Err(MechError::DimensionMismatch { .. })));
    assert_eq!(jacobi_bracket_contact(&f, &f, &State::symplectic(vec![0.0], vec![0.0])), Err(MechError::MissingZ));
}
