use nalgebra::{DMatrix, DVector};

/// Fourth-order central difference of `f` at `x`.
pub fn deriv4(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = x.abs().max(1.0) * 1e-3;
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Composite five-point Gauss–Legendre quadrature of `f` over `[a, b]`
/// (signed, so `b < a` is allowed).
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let c = a + (i as f64 + 0.5) * h;
            (0..5).map(|j| W[j] * f(c + 0.5 * h * X[j])).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Damped Newton on `F(x) = 0` with a central-difference Jacobian.
pub(crate) fn newton(f: impl Fn(&[f64]) -> Vec<f64>, x0: Vec<f64>, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut res = norm(&fx);
    for _ in 0..max_iter {
        if res < tol {
            break;
        }
        let mut jac = DMatrix::zeros(fx.len(), n);
        for j in 0..n {
            let h = x[j].abs().max(1.0) * 1e-7;
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for i in 0..fx.len() {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let Some(dx) = jac.lu().solve(&DVector::from_column_slice(&fx)) else { break };
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a - lambda * d).collect();
            let ft = f(&trial);
            let rt = norm(&ft);
            if rt.is_finite() && (rt < res || lambda < 1e-4) {
                x = trial;
                fx = ft;
                res = rt;
                break;
            }
            lambda *= 0.5;
        }
    }
    (x, res)
}
