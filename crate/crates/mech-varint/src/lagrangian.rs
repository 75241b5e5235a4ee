use std::fmt;
use std::sync::Arc;

use mech_core::fd_step;

pub type LdFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type PairFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

fn partial(f: &LdFn, q0: &[f64], q1: &[f64], second: bool) -> Vec<f64> {
    let n = q0.len();
    (0..n)
        .map(|i| {
            let (mut a, mut b) = (q0.to_vec(), q1.to_vec());
            let (mut c, mut d) = (q0.to_vec(), q1.to_vec());
            let x = if second { q1[i] } else { q0[i] };
            let h = fd_step(x);
            if second {
                b[i] += h;
                d[i] -= h;
            } else {
                a[i] += h;
                c[i] -= h;
            }
            (f(&a, &b) - f(&c, &d)) / (2.0 * h)
        })
        .collect()
}

/// A discrete Lagrangian `L_d(q₀,q₁)` with discrete forces `f_d^±` and
/// step size `h`. Missing partials fall back to central differences.
#[derive(Clone)]
pub struct DiscreteLagrangian {
    pub n: usize,
    pub h: f64,
    ld: LdFn,
    d1: Option<PairFn>,
    d2: Option<PairFn>,
    fplus: Option<PairFn>,
    fminus: Option<PairFn>,
}

impl fmt::Debug for DiscreteLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteLagrangian")
            .field("n", &self.n)
            .field("h", &self.h)
            .field("analytic_partials", &(self.d1.is_some() && self.d2.is_some()))
            .field("forced", &(self.fplus.is_some() || self.fminus.is_some()))
            .finish()
    }
}

impl DiscreteLagrangian {
    pub fn new(n: usize, h: f64, ld: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { n, h, ld: Arc::new(ld), d1: None, d2: None, fplus: None, fminus: None }
    }

    pub fn with_partials(
        mut self,
        d1: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        d2: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Arc::new(d1));
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_forces(
        mut self,
        fplus: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        fminus: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.fplus = Some(Arc::new(fplus));
        self.fminus = Some(Arc::new(fminus));
        self
    }

    /// Forces generated by a discrete Rayleigh potential.
    pub fn with_rayleigh(self, rd: &DiscreteRayleigh) -> Self {
        let (a, b) = (rd.clone(), rd.clone());
        self.with_forces(move |q0, q1| a.fplus(q0, q1), move |q0, q1| b.fminus(q0, q1))
    }

    pub fn ld(&self, q0: &[f64], q1: &[f64]) -> f64 {
        (self.ld)(q0, q1)
    }

    pub fn d1ld(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        match &self.d1 {
            Some(d) => d(q0, q1),
            None => partial(&self.ld, q0, q1, false),
        }
    }

    pub fn d2ld(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        match &self.d2 {
            Some(d) => d(q0, q1),
            None => partial(&self.ld, q0, q1, true),
        }
    }

    pub fn fplus(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        self.fplus.as_ref().map_or_else(|| vec![0.0; self.n], |f| f(q0, q1))
    }

    pub fn fminus(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        self.fminus.as_ref().map_or_else(|| vec![0.0; self.n], |f| f(q0, q1))
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }

    pub fn is_forced(&self) -> bool {
        self.fplus.is_some() || self.fminus.is_some()
    }

    /// Largest relative gap between the supplied partials and central
    /// differences of `L_d` (zero when no partials are supplied).
    pub fn partials_fd_mismatch(&self, q0: &[f64], q1: &[f64]) -> f64 {
        let rel = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0)).fold(0.0, f64::max)
        };
        let mut worst: f64 = 0.0;
        if let Some(d) = &self.d1 {
            worst = worst.max(rel(&d(q0, q1), &partial(&self.ld, q0, q1, false)));
        }
        if let Some(d) = &self.d2 {
            worst = worst.max(rel(&d(q0, q1), &partial(&self.ld, q0, q1, true)));
        }
        worst
    }
}

/// A discrete Rayleigh potential `R_d(q₀,q₁)`; it generates
/// `f⁺ = −D₂R_d` and `f⁻ = D₁R_d`.
#[derive(Clone)]
pub struct DiscreteRayleigh {
    pub n: usize,
    rd: LdFn,
    d1: Option<PairFn>,
    d2: Option<PairFn>,
}

impl fmt::Debug for DiscreteRayleigh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteRayleigh").field("n", &self.n).finish()
    }
}

impl DiscreteRayleigh {
    pub fn new(n: usize, rd: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { n, rd: Arc::new(rd), d1: None, d2: None }
    }

    pub fn with_partials(
        mut self,
        d1: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        d2: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Arc::new(d1));
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn rd(&self, q0: &[f64], q1: &[f64]) -> f64 {
        (self.rd)(q0, q1)
    }

    pub fn d1rd(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        match &self.d1 {
            Some(d) => d(q0, q1),
            None => partial(&self.rd, q0, q1, false),
        }
    }

    pub fn d2rd(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        match &self.d2 {
            Some(d) => d(q0, q1),
            None => partial(&self.rd, q0, q1, true),
        }
    }

    pub fn fplus(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        self.d2rd(q0, q1).into_iter().map(|v| -v).collect()
    }

    pub fn fminus(&self, q0: &[f64], q1: &[f64]) -> Vec<f64> {
        self.d1rd(q0, q1)
    }
}
