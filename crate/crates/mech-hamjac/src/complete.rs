use std::fmt;
use std::sync::Arc;

use mech_core::{Layout, ScalarField, State};
use mech_diagnostics::{QuantityKind, QuantityReport};
use mech_integrators::Trajectory;

use crate::error::{HamJacError, Result};
use crate::numeric::newton;

/// Which fiber coordinates the parameters fix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberKind {
    /// `λ` fixes the momenta; `z`, if the layout has one, is an input.
    Momenta,
    /// `λ` fixes the momenta and the action.
    MomentaAndAction,
}

type PhiFn = dyn Fn(f64, &[f64], Option<f64>, &[f64]) -> (Vec<f64>, Option<f64>) + Send + Sync;
type GuessFn = dyn Fn(&State) -> Vec<f64> + Send + Sync;

/// A parametrised family `Φ_λ` of HJ solutions, locally a diffeomorphism
/// onto phase space.
#[derive(Clone)]
pub struct CompleteSolution {
    pub n: usize,
    pub params: usize,
    pub layout: Layout,
    pub kind: FiberKind,
    phi: Arc<PhiFn>,
    guess: Option<Arc<GuessFn>>,
}

impl fmt::Debug for CompleteSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompleteSolution")
            .field("n", &self.n)
            .field("params", &self.params)
            .field("kind", &self.kind)
            .finish()
    }
}

impl CompleteSolution {
    /// `phi(t, q, z, λ) -> (p, z)`; the returned `z` is read only for
    /// [`FiberKind::MomentaAndAction`].
    pub fn new(
        layout: Layout,
        params: usize,
        kind: FiberKind,
        phi: impl Fn(f64, &[f64], Option<f64>, &[f64]) -> (Vec<f64>, Option<f64>) + Send + Sync + 'static,
    ) -> Result<Self> {
        let equations = layout.n + usize::from(kind == FiberKind::MomentaAndAction);
        if equations != params || (kind == FiberKind::MomentaAndAction && !layout.has_z) {
            return Err(HamJacError::ParameterCount { params, equations });
        }
        Ok(Self { n: layout.n, params, layout, kind, phi: Arc::new(phi), guess: None })
    }

    /// Initial guess for the fiber inversion; defaults to the state's own
    /// momenta (then `z`) padded with zeros.
    pub fn with_guess(mut self, g: impl Fn(&State) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.guess = Some(Arc::new(g));
        self
    }

    pub fn eval(&self, t: f64, q: &[f64], z: Option<f64>, lambda: &[f64]) -> (Vec<f64>, Option<f64>) {
        (self.phi)(t, q, z, lambda)
    }

    /// The phase-space point `Φ_λ(t, q)`.
    pub fn point(&self, t: f64, q: &[f64], z: Option<f64>, lambda: &[f64]) -> State {
        let (p, zz) = self.eval(t, q, z, lambda);
        let z = match self.kind {
            FiberKind::Momenta => z,
            FiberKind::MomentaAndAction => zz,
        };
        State::new(t, q.to_vec(), p, if self.layout.has_z { z } else { None })
    }

    fn default_guess(&self, s: &State) -> Vec<f64> {
        if let Some(g) = &self.guess {
            return g(s);
        }
        let mut g = s.m.clone();
        g.extend(s.z);
        g.resize(self.params, 0.0);
        g
    }

    /// `λ` with `Φ_λ(t, q) = s`, by damped Newton.
    pub fn invert(&self, s: &State, guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let x0 = guess.map(<[f64]>::to_vec).unwrap_or_else(|| self.default_guess(s));
        let with_z = self.kind == FiberKind::MomentaAndAction;
        let scale = s.m.iter().chain(s.z.iter()).fold(1.0f64, |a, b| a.max(b.abs()));
        let residual = |lam: &[f64]| {
            let (p, z) = self.eval(s.t, &s.q, s.z, lam);
            let mut r: Vec<f64> = p.iter().zip(&s.m).map(|(a, b)| a - b).collect();
            if with_z {
                r.push(z.unwrap_or(f64::NAN) - s.z.unwrap_or(f64::NAN));
            }
            r
        };
        let (lam, res) = newton(residual, x0, 1e-13 * scale, 60);
        if !(res <= 1e-10 * scale) {
            return Err(HamJacError::Inversion { t: s.t, residual: res });
        }
        Ok(lam)
    }

    /// `f_a = λ_a ∘ Φ⁻¹` as a phase-space function (NaN where inversion fails).
    pub fn invariant_field(&self, a: usize) -> ScalarField {
        let me = self.clone();
        ScalarField::new(self.layout, move |s| me.invert(s, None).map(|l| l[a]).unwrap_or(f64::NAN))
    }
}

/// Recovers `λ(c(t)) = Φ⁻¹(c(t))` along the trajectory and reports the drift
/// of each parameter. Each inversion starts from the previous sample's `λ`.
pub fn complete_solution_invariants(phi: &CompleteSolution, traj: &Trajectory, names: &[&str]) -> Result<Vec<QuantityReport>> {
    let mut prev: Option<Vec<f64>> = None;
    let mut first: Vec<f64> = Vec::new();
    let mut drift = vec![0.0f64; phi.params];
    for s in &traj.samples {
        let lam = phi.invert(s, prev.as_deref())?;
        if first.is_empty() {
            first = lam.clone();
        }
        for (d, (a, b)) in drift.iter_mut().zip(lam.iter().zip(&first)) {
            *d = d.max((a - b).abs());
        }
        prev = Some(lam);
    }
    Ok(drift
        .into_iter()
        .enumerate()
        .map(|(a, d)| QuantityReport {
            name: names.get(a).map_or_else(|| format!("lambda_{a}"), |s| s.to_string()),
            kind: QuantityKind::Conserved,
            max_abs_drift: d,
            samples: traj.len(),
            tolerance: None,
            pass: None,
        })
        .collect())
}
