use std::fmt;
use std::sync::Arc;

use mech_core::{spd_inverse, Layout, Metric, State, SystemDef};
use mech_integrators::VectorField;
use nalgebra::DVector;

use crate::error::{HybridError, Result};

type HFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type ApproachFn = dyn Fn(&State) -> bool + Send + Sync;
type ApplyFn = dyn Fn(&State) -> Result<State> + Send + Sync;

/// A one-sided constraint `h(q) ≥ 0` with the predicate that selects states
/// moving into the wall.
#[derive(Clone)]
pub struct Guard {
    pub label: String,
    h: Arc<HFn>,
    grad: Option<Arc<GradFn>>,
    approach: Arc<ApproachFn>,
}

impl fmt::Debug for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Guard").field("label", &self.label).finish()
    }
}

impl Guard {
    /// A guard whose approach predicate is `dh·m < 0` with `m` the state's
    /// momenta or velocities; use [`Guard::with_approach`] when the metric
    /// makes the pairing differ.
    pub fn new(label: impl Into<String>, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let h: Arc<HFn> = Arc::new(h);
        let hh = h.clone();
        let approach = Arc::new(move |s: &State| {
            let dh = fd_grad(&*hh, &s.q);
            dh.iter().zip(&s.m).map(|(a, b)| a * b).sum::<f64>() < 0.0
        });
        Self { label: label.into(), h, grad: None, approach }
    }

    pub fn with_grad(mut self, grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        let grad: Arc<GradFn> = Arc::new(grad);
        let g = grad.clone();
        self.approach = Arc::new(move |s: &State| g(&s.q).iter().zip(&s.m).map(|(a, b)| a * b).sum::<f64>() < 0.0);
        self.grad = Some(grad);
        self
    }

    /// Replaces the approach predicate.
    pub fn with_approach(mut self, a: impl Fn(&State) -> bool + Send + Sync + 'static) -> Self {
        self.approach = Arc::new(a);
        self
    }

    pub fn h(&self, q: &[f64]) -> f64 {
        (self.h)(q)
    }

    pub fn grad(&self, q: &[f64]) -> Vec<f64> {
        match &self.grad {
            Some(g) => g(q),
            None => fd_grad(&*self.h, q),
        }
    }

    pub fn approaching(&self, s: &State) -> bool {
        (self.approach)(s)
    }
}

fn fd_grad(h: &HFn, q: &[f64]) -> Vec<f64> {
    (0..q.len())
        .map(|i| {
            let d = q[i].abs().max(1.0) * 1e-6;
            let (mut a, mut b) = (q.to_vec(), q.to_vec());
            a[i] += d;
            b[i] -= d;
            (h(&a) - h(&b)) / (2.0 * d)
        })
        .collect()
}

/// `Δ`; must leave `q` unchanged.
#[derive(Clone)]
pub struct ImpactMap {
    pub label: String,
    apply: Arc<ApplyFn>,
}

impl fmt::Debug for ImpactMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImpactMap").field("label", &self.label).finish()
    }
}

impl ImpactMap {
    pub fn new(label: impl Into<String>, apply: impl Fn(&State) -> Result<State> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), apply: Arc::new(apply) }
    }

    pub fn apply(&self, s: &State) -> Result<State> {
        (self.apply)(s)
    }
}

/// Whether the impact map acts on momenta or on velocities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImpactForm {
    /// `p⁺ = p − (1+e) ⟨⟨p, dh⟩⟩/‖dh‖² dh`.
    Momentum,
    /// `v⁺ = v − (1+e) dh(v)/‖dh‖² g⁻¹(dh)`.
    Velocity,
}

/// Newton's restitution law for the guard `h` under the metric `g`.
pub fn newton_impact_map(metric: Metric, guard: &Guard, e: f64, form: ImpactForm) -> Result<ImpactMap> {
    if !(0.0..=1.0).contains(&e) {
        return Err(HybridError::Restitution(e));
    }
    let guard = guard.clone();
    let label = format!("{}:newton(e={e})", guard.label);
    Ok(ImpactMap::new(label, move |s: &State| {
        let dh = DVector::from_vec(guard.grad(&s.q));
        let ginv = spd_inverse(&metric.at(&s.q))?;
        let sharp = &ginv * &dh;
        let norm2 = dh.dot(&sharp);
        if !(norm2 > 1e-300) {
            return Err(HybridError::ZeroGradient);
        }
        let m = DVector::from_column_slice(&s.m);
        let out = match form {
            ImpactForm::Momentum => &m - &dh * ((1.0 + e) * m.dot(&sharp) / norm2),
            ImpactForm::Velocity => &m - &sharp * ((1.0 + e) * dh.dot(&m) / norm2),
        };
        let mut post = s.clone();
        post.m = out.iter().copied().collect();
        Ok(post)
    }))
}

/// Zeno safeguards: a cap on the number of impacts and a minimal time gap
/// between consecutive impacts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZenoConfig {
    pub max_events: usize,
    pub min_gap: f64,
}

impl Default for ZenoConfig {
    fn default() -> Self {
        Self { max_events: 10_000, min_gap: 1e-9 }
    }
}

/// A flow with guards and matching impact maps.
#[derive(Clone)]
pub struct HybridSystem {
    pub id: String,
    pub field: Arc<dyn VectorField + Send + Sync>,
    pub guards: Vec<Guard>,
    pub impacts: Vec<ImpactMap>,
    pub zeno: ZenoConfig,
}

impl fmt::Debug for HybridSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridSystem")
            .field("id", &self.id)
            .field("guards", &self.guards)
            .field("impacts", &self.impacts)
            .field("zeno", &self.zeno)
            .finish()
    }
}

impl HybridSystem {
    pub fn new(
        id: impl Into<String>,
        field: Arc<dyn VectorField + Send + Sync>,
        guards: Vec<Guard>,
        impacts: Vec<ImpactMap>,
    ) -> Result<Self> {
        if guards.len() != impacts.len() {
            return Err(HybridError::Mismatch { guards: guards.len(), impacts: impacts.len() });
        }
        Ok(Self { id: id.into(), field, guards, impacts, zeno: ZenoConfig::default() })
    }

    pub fn from_system(id: impl Into<String>, sys: SystemDef, guards: Vec<Guard>, impacts: Vec<ImpactMap>) -> Result<Self> {
        Self::new(id, Arc::new(sys), guards, impacts)
    }

    pub fn with_zeno(mut self, zeno: ZenoConfig) -> Self {
        self.zeno = zeno;
        self
    }

    pub fn layout(&self) -> Layout {
        self.field.layout()
    }
}
