use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::state::{Layout, State};

type EvalFn = dyn Fn(&State) -> f64 + Send + Sync;
type GradFn = dyn Fn(&State) -> Vec<f64> + Send + Sync;
type HessFn = dyn Fn(&State) -> DMatrix<f64> + Send + Sync;
type CovFn = dyn Fn(&State) -> Vec<f64> + Send + Sync;

/// Central-difference step used everywhere a derivative is not supplied.
pub fn fd_step(x: f64) -> f64 {
    x.abs().max(1.0) * 1e-6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradKind {
    Analytic,
    FiniteDifference,
}

/// Gradient over the flat coordinates of a layout.
#[derive(Clone, Debug)]
pub struct Gradient {
    pub layout: Layout,
    pub values: Vec<f64>,
    pub kind: GradKind,
}

impl Gradient {
    pub fn dt(&self) -> f64 {
        self.layout.t_index().map_or(0.0, |i| self.values[i])
    }

    pub fn dq(&self) -> &[f64] {
        &self.values[self.layout.q_range()]
    }

    pub fn dm(&self) -> &[f64] {
        &self.values[self.layout.m_range()]
    }

    pub fn dz(&self) -> f64 {
        self.layout.z_index().map_or(0.0, |i| self.values[i])
    }
}

/// A smooth function on phase space, optionally with analytic derivatives.
#[derive(Clone)]
pub struct ScalarField {
    layout: Layout,
    eval: Arc<EvalFn>,
    grad: Option<Arc<GradFn>>,
    hess: Option<Arc<HessFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("layout", &self.layout)
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_hessian", &self.hess.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(layout: Layout, f: impl Fn(&State) -> f64 + Send + Sync + 'static) -> Self {
        Self { layout, eval: Arc::new(f), grad: None, hess: None }
    }

    pub fn with_grad(mut self, g: impl Fn(&State) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(
        mut self,
        h: impl Fn(&State) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hess = Some(Arc::new(h));
        self
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn eval(&self, s: &State) -> f64 {
        (self.eval)(s)
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// Analytic gradient when available, central differences otherwise.
    pub fn gradient(&self, s: &State) -> Gradient {
        match &self.grad {
            Some(g) => Gradient { layout: self.layout, values: g(s), kind: GradKind::Analytic },
            None => Gradient {
                layout: self.layout,
                values: self.fd_gradient(s),
                kind: GradKind::FiniteDifference,
            },
        }
    }

    pub fn fd_gradient(&self, s: &State) -> Vec<f64> {
        let layout = self.layout;
        let x = s.to_flat(&layout);
        (0..x.len())
            .map(|i| {
                let h = fd_step(x[i]);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fp = self.eval(&State::from_flat(&layout, &xp, s.t));
                let fm = self.eval(&State::from_flat(&layout, &xm, s.t));
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    /// Hessian over the flat coordinates. Without an analytic Hessian it
    /// differences the analytic gradient, or uses second differences of the
    /// value when no gradient is attached either.
    pub fn hessian(&self, s: &State) -> DMatrix<f64> {
        if let Some(h) = &self.hess {
            return h(s);
        }
        let layout = self.layout;
        let x = s.to_flat(&layout);
        let d = x.len();
        let mut out = DMatrix::zeros(d, d);
        let at = |y: &[f64]| State::from_flat(&layout, y, s.t);
        if self.grad.is_some() {
            for j in 0..d {
                let h = fd_step(x[j]);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let gp = self.gradient(&at(&xp)).values;
                let gm = self.gradient(&at(&xm)).values;
                for i in 0..d {
                    out[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
                }
            }
            return (&out + out.transpose()) * 0.5;
        }
        let step: Vec<f64> = x.iter().map(|v| v.abs().max(1.0) * 1e-4).collect();
        let f0 = self.eval(s);
        let shifted = |i: usize, a: f64, j: usize, b: f64| {
            let mut y = x.clone();
            y[i] += a * step[i];
            y[j] += b * step[j];
            self.eval(&at(&y))
        };
        for i in 0..d {
            let hi = step[i];
            out[(i, i)] = (shifted(i, 1.0, i, 0.0) - 2.0 * f0 + shifted(i, -1.0, i, 0.0)) / (hi * hi);
            for j in 0..i {
                let v = (shifted(i, 1.0, j, 1.0) - shifted(i, 1.0, j, -1.0) - shifted(i, -1.0, j, 1.0)
                    + shifted(i, -1.0, j, -1.0))
                    / (4.0 * hi * step[j]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

/// A semibasic one-form `α_i dq^i`, evaluated on phase space.
#[derive(Clone)]
pub struct CovectorField {
    n: usize,
    f: Arc<CovFn>,
}

impl fmt::Debug for CovectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovectorField").field("n", &self.n).finish()
    }
}

impl CovectorField {
    pub fn new(n: usize, f: impl Fn(&State) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { n, f: Arc::new(f) }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, move |_| vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self, s: &State) -> Vec<f64> {
        (self.f)(s)
    }
}

/// Maximum relative disagreement between the analytic and the
/// finite-difference gradient at `s`.
pub fn gradient_fd_mismatch(f: &ScalarField, s: &State) -> f64 {
    let Some(g) = &f.grad else { return 0.0 };
    let a = g(s);
    let d = f.fd_gradient(s);
    a.iter().zip(&d).map(|(a, d)| (a - d).abs() / a.abs().max(d.abs()).max(1.0)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_field() -> ScalarField {
        let layout = Layout::contact(1);
        ScalarField::new(layout, |s| s.q[0] * s.q[0] * s.m[0] + s.z.unwrap().sin())
            .with_grad(|s| vec![2.0 * s.q[0] * s.m[0], s.q[0] * s.q[0], s.z.unwrap().cos()])
    }

    #[test]
    fn fd_matches_analytic() {
        let s = State::contact(vec![0.7], vec![-1.3], 0.4);
        assert!(gradient_fd_mismatch(&quad_field(), &s) < 1e-8);
    }

    #[test]
    fn fd_hessian_is_symmetric() {
        let s = State::contact(vec![0.7], vec![-1.3], 0.4);
        let h = quad_field().hessian(&s);
        assert!((h[(0, 1)] - 2.0 * 0.7).abs() < 1e-7);
        assert!((h[(0, 0)] - 2.0 * -1.3).abs() < 1e-7);
        assert!((h[(2, 2)] + 0.4f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn gradient_accessors() {
        let s = State::contact(vec![0.7], vec![-1.3], 0.4);
        let g = quad_field().gradient(&s);
        assert_eq!(g.kind, GradKind::Analytic);
        assert_eq!(g.dt(), 0.0);
        assert!((g.dm()[0] - 0.49).abs() < 1e-15);
        assert!((g.dz() - 0.4f64.cos()).abs() < 1e-15);
    }
}
