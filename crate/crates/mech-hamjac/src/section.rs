use std::fmt;
use std::sync::Arc;

use mech_core::{Layout, State};

use crate::numeric::deriv4;

type PFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;
type SFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;
type DsFn = dyn Fn(f64, &[f64]) -> (f64, Vec<f64>) + Send + Sync;
type DomainFn = dyn Fn(f64, &[f64]) -> bool + Send + Sync;

#[derive(Clone)]
enum Kind {
    /// `q ↦ γ(t, q)` momenta only.
    OneForm(Arc<PFn>),
    /// `p = ∂S/∂q`, `z = S`, with optional analytic `(∂S/∂t, ∂S/∂q)`.
    Generating(Arc<SFn>, Option<Arc<DsFn>>),
}

/// A section of phase space over configuration space (with time as a
/// parameter): either a one-form `γ(t, q)` or the 1-jet `(∂S/∂q, S)` of a
/// generating function.
#[derive(Clone)]
pub struct SectionGamma {
    pub n: usize,
    kind: Kind,
    domain: Option<Arc<DomainFn>>,
}

impl fmt::Debug for SectionGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            Kind::OneForm(_) => "one-form",
            Kind::Generating(..) => "generating function",
        };
        f.debug_struct("SectionGamma").field("n", &self.n).field("kind", &kind).finish()
    }
}

impl SectionGamma {
    pub fn one_form(n: usize, gamma: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self::time_one_form(n, move |_, q| gamma(q))
    }

    pub fn time_one_form(n: usize, gamma: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { n, kind: Kind::OneForm(Arc::new(gamma)), domain: None }
    }

    /// The 1-jet of `S(t, q)`; momenta come from difference quotients.
    pub fn generating(n: usize, s: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { n, kind: Kind::Generating(Arc::new(s), None), domain: None }
    }

    /// A generating section with analytic partials `(∂S/∂t, ∂S/∂q)`.
    pub fn generating_with_partials(
        n: usize,
        s: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        ds: impl Fn(f64, &[f64]) -> (f64, Vec<f64>) + Send + Sync + 'static,
    ) -> Self {
        Self { n, kind: Kind::Generating(Arc::new(s), Some(Arc::new(ds))), domain: None }
    }

    pub fn with_domain(mut self, d: impl Fn(f64, &[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Some(Arc::new(d));
        self
    }

    pub fn in_domain(&self, t: f64, q: &[f64]) -> bool {
        self.domain.as_ref().is_none_or(|d| d(t, q)) && q.iter().all(|v| v.is_finite())
    }

    pub fn is_generating(&self) -> bool {
        matches!(self.kind, Kind::Generating(..))
    }

    pub fn momenta(&self, t: f64, q: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::OneForm(g) => g(t, q),
            Kind::Generating(_, Some(ds)) => ds(t, q).1,
            Kind::Generating(s, None) => (0..self.n)
                .map(|i| {
                    deriv4(
                        |x| {
                            let mut y = q.to_vec();
                            y[i] = x;
                            s(t, &y)
                        },
                        q[i],
                    )
                })
                .collect(),
        }
    }

    /// `S(t, q)` for a generating section.
    pub fn action(&self, t: f64, q: &[f64]) -> Option<f64> {
        match &self.kind {
            Kind::OneForm(_) => None,
            Kind::Generating(s, _) => Some(s(t, q)),
        }
    }

    /// `∂S/∂t` for a generating section.
    pub fn time_derivative(&self, t: f64, q: &[f64]) -> Option<f64> {
        match &self.kind {
            Kind::OneForm(_) => None,
            Kind::Generating(_, Some(ds)) => Some(ds(t, q).0),
            Kind::Generating(s, None) => Some(deriv4(|x| s(x, q), t)),
        }
    }

    /// The point of phase space above `(t, q)` in the given layout.
    pub fn lift(&self, layout: &Layout, t: f64, q: &[f64]) -> State {
        let z = if layout.has_z { Some(self.action(t, q).unwrap_or(0.0)) } else { None };
        State::new(t, q.to_vec(), self.momenta(t, q), z)
    }

    /// `J[i][j] = ∂γ_i/∂q_j`.
    pub fn jacobian(&self, t: f64, q: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for j in 0..self.n {
            for (i, row) in out.iter_mut().enumerate() {
                row[j] = deriv4(
                    |x| {
                        let mut y = q.to_vec();
                        y[j] = x;
                        self.momenta(t, &y)[i]
                    },
                    q[j],
                );
            }
        }
        out
    }

    /// Largest asymmetry of `∂γ_i/∂q_j` over the probes.
    pub fn closedness_residual(&self, t: f64, probes: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for q in probes {
            let j = self.jacobian(t, q);
            for a in 0..self.n {
                for b in 0..a {
                    worst = worst.max((j[a][b] - j[b][a]).abs());
                }
            }
        }
        worst
    }
}
