use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{MechError, Result};
use crate::field::{fd_step, CovectorField, ScalarField};
use crate::state::{Layout, State};

type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Largest condition number accepted when inverting a Hessian or metric.
pub const MAX_CONDITION: f64 = 1e12;

/// Riemannian metric on configuration space.
#[derive(Clone)]
pub enum Metric {
    Constant(DMatrix<f64>),
    Variable(Arc<MetricFn>),
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Constant(g) => f.debug_tuple("Constant").field(g).finish(),
            Metric::Variable(_) => f.write_str("Variable(..)"),
        }
    }
}

impl Metric {
    pub fn identity(n: usize) -> Self {
        Metric::Constant(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Metric::Constant(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn variable(g: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Metric::Variable(Arc::new(g))
    }

    pub fn at(&self, q: &[f64]) -> DMatrix<f64> {
        match self {
            Metric::Constant(g) => g.clone(),
            Metric::Variable(g) => g(q),
        }
    }

    /// `∂g/∂q^k` by central differences (zero for a constant metric).
    pub fn derivative(&self, q: &[f64], k: usize) -> DMatrix<f64> {
        match self {
            Metric::Constant(g) => DMatrix::zeros(g.nrows(), g.ncols()),
            Metric::Variable(g) => {
                let h = fd_step(q[k]);
                let mut qp = q.to_vec();
                let mut qm = q.to_vec();
                qp[k] += h;
                qm[k] -= h;
                (g(&qp) - g(&qm)) / (2.0 * h)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Metric::Constant(_))
    }
}

/// Inverse of `g` after checking symmetry and positive-definiteness.
pub fn spd_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let asym = (g - g.transpose()).amax();
    if asym > 1e-12 * g.amax().max(1.0) {
        return Err(MechError::NonSpdMetric);
    }
    let chol = g.clone().cholesky().ok_or(MechError::NonSpdMetric)?;
    Ok(chol.inverse())
}

/// Solves `w x = b` by LU with partial pivoting, rejecting ill-conditioned `w`.
pub fn lu_solve(w: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = w.clone().lu();
    let inv = lu.try_inverse().ok_or(MechError::SingularHessian { cond: f64::INFINITY })?;
    let cond = one_norm(w) * one_norm(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(MechError::SingularHessian { cond });
    }
    lu.solve(b).ok_or(MechError::SingularHessian { cond })
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// The system flavors handled by the library.
#[derive(Clone, Debug)]
pub enum Flavor {
    /// `H(q,p)` with an external force `α`.
    ForcedHamiltonian { h: ScalarField, alpha: Option<CovectorField> },
    /// `H(q,p,z)`.
    Contact { h: ScalarField },
    /// `H(t,q,p,z)`.
    Cocontact { h: ScalarField },
    /// `L = ½ vᵀg(q)v − V(q)` with Rayleigh potential `𝓡(q,v)`.
    MechanicalRayleigh { metric: Metric, potential: ScalarField, rayleigh: ScalarField },
    /// Action-dependent `L(t?,q,v,z)`.
    HerglotzLagrangian { l: ScalarField },
}

impl Flavor {
    pub fn name(&self) -> &'static str {
        match self {
            Flavor::ForcedHamiltonian { .. } => "forced Hamiltonian",
            Flavor::Contact { .. } => "contact",
            Flavor::Cocontact { .. } => "cocontact",
            Flavor::MechanicalRayleigh { .. } => "mechanical Rayleigh",
            Flavor::HerglotzLagrangian { .. } => "Herglotz Lagrangian",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SystemDef {
    pub n: usize,
    pub flavor: Flavor,
}

impl SystemDef {
    pub fn forced_hamiltonian(n: usize, h: ScalarField, alpha: Option<CovectorField>) -> Self {
        Self { n, flavor: Flavor::ForcedHamiltonian { h, alpha } }
    }

    pub fn contact(n: usize, h: ScalarField) -> Self {
        Self { n, flavor: Flavor::Contact { h } }
    }

    pub fn cocontact(n: usize, h: ScalarField) -> Self {
        Self { n, flavor: Flavor::Cocontact { h } }
    }

    pub fn mechanical(n: usize, metric: Metric, potential: ScalarField, rayleigh: ScalarField) -> Self {
        Self { n, flavor: Flavor::MechanicalRayleigh { metric, potential, rayleigh } }
    }

    pub fn herglotz(n: usize, l: ScalarField) -> Self {
        Self { n, flavor: Flavor::HerglotzLagrangian { l } }
    }

    pub fn layout(&self) -> Layout {
        match &self.flavor {
            Flavor::ForcedHamiltonian { .. } | Flavor::MechanicalRayleigh { .. } => Layout::symplectic(self.n),
            Flavor::Contact { .. } => Layout::contact(self.n),
            Flavor::Cocontact { .. } => Layout::cocontact(self.n),
            Flavor::HerglotzLagrangian { l } => Layout::new(self.n, l.layout().has_t, true),
        }
    }

    /// The flavor's vector field in the flat layout.
    pub fn vector_field(&self, s: &State) -> Result<Vec<f64>> {
        let out = match &self.flavor {
            Flavor::ForcedHamiltonian { .. } => forced_hamiltonian_field(self, s)?,
            Flavor::Contact { .. } => contact_hamiltonian_field(self, s)?,
            Flavor::Cocontact { .. } => cocontact_hamiltonian_field(self, s)?,
            Flavor::MechanicalRayleigh { .. } => mechanical_rayleigh_field(self, s)?,
            Flavor::HerglotzLagrangian { .. } => herglotz_lagrangian_field(self, s)?,
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(MechError::NonFinite("vector field"))
        }
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        s.check(&self.layout())
    }
}

fn wrong(expected: &'static str, sys: &SystemDef) -> MechError {
    MechError::WrongFlavor { expected, got: sys.flavor.name() }
}

/// `q̇ = ∂H/∂p`, `ṗ = −∂H/∂q − α`.
pub fn forced_hamiltonian_field(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::ForcedHamiltonian { h, alpha } = &sys.flavor else {
        return Err(wrong("forced Hamiltonian", sys));
    };
    sys.check_state(s)?;
    let g = h.gradient(s);
    let a = match alpha {
        Some(a) => {
            let c = a.components(s);
            if c.len() != sys.n {
                return Err(MechError::DimensionMismatch { expected: sys.n, got: c.len() });
            }
            c
        }
        None => vec![0.0; sys.n],
    };
    let mut out = g.dm().to_vec();
    out.extend(g.dq().iter().zip(&a).map(|(hq, a)| -hq - a));
    Ok(out)
}

fn contact_core(h: &ScalarField, s: &State, out: &mut Vec<f64>) -> Result<()> {
    s.z()?;
    let g = h.gradient(s);
    let hz = g.dz();
    out.extend_from_slice(g.dm());
    out.extend(g.dq().iter().zip(&s.m).map(|(hq, p)| -hq - p * hz));
    let php: f64 = s.m.iter().zip(g.dm()).map(|(p, hp)| p * hp).sum();
    out.push(php - h.eval(s));
    Ok(())
}

/// `q̇ = H_p`, `ṗ = −H_q − p H_z`, `ż = p·H_p − H`.
pub fn contact_hamiltonian_field(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::Contact { h } = &sys.flavor else {
        return Err(wrong("contact", sys));
    };
    sys.check_state(s)?;
    let mut out = Vec::with_capacity(2 * sys.n + 1);
    contact_core(h, s, &mut out)?;
    Ok(out)
}

/// The contact field with `ṫ = 1` prepended.
pub fn cocontact_hamiltonian_field(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::Cocontact { h } = &sys.flavor else {
        return Err(wrong("cocontact", sys));
    };
    sys.check_state(s)?;
    let mut out = Vec::with_capacity(2 * sys.n + 2);
    out.push(1.0);
    contact_core(h, s, &mut out)?;
    Ok(out)
}

/// Forced Euler–Lagrange field `(q̇, v̇)` of a mechanical Rayleigh system.
pub fn mechanical_rayleigh_field(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::MechanicalRayleigh { metric, potential, rayleigh } = &sys.flavor else {
        return Err(wrong("mechanical Rayleigh", sys));
    };
    sys.check_state(s)?;
    let n = sys.n;
    let g = metric.at(&s.q);
    let v = DVector::from_column_slice(&s.m);
    let dv = potential.gradient(s);
    let dr = rayleigh.gradient(s);
    let mut rhs = DVector::from_fn(n, |i, _| -dv.dq()[i] - dr.dm()[i]);
    if !metric.is_constant() {
        for k in 0..n {
            let dg = metric.derivative(&s.q, k);
            let quad = (v.transpose() * &dg * &v)[(0, 0)];
            rhs[k] += 0.5 * quad;
            rhs -= &dg * &v * v[k];
        }
    }
    let ginv = spd_inverse(&g)?;
    let acc = ginv * rhs;
    let mut out = s.m.clone();
    out.extend(acc.iter());
    Ok(out)
}

/// Herglotz–Euler–Lagrange field `(ṫ?, q̇ = v, v̇, ż = L)`.
pub fn herglotz_lagrangian_field(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::HerglotzLagrangian { l } = &sys.flavor else {
        return Err(wrong("Herglotz Lagrangian", sys));
    };
    let layout = sys.layout();
    sys.check_state(s)?;
    let n = sys.n;
    let g = l.gradient(s);
    let hess = l.hessian(s);
    let qr = layout.q_range();
    let vr = layout.m_range();
    let zi = layout.z_index().ok_or(MechError::MissingZ)?;
    let lval = l.eval(s);
    let lz = g.dz();
    let w = DMatrix::from_fn(n, n, |i, j| hess[(vr.start + i, vr.start + j)]);
    let rhs = DVector::from_fn(n, |i, _| {
        let vi = vr.start + i;
        let mut r = g.dq()[i] + g.dm()[i] * lz;
        for k in 0..n {
            r -= hess[(vi, qr.start + k)] * s.m[k];
        }
        r -= hess[(vi, zi)] * lval;
        if let Some(ti) = layout.t_index() {
            r -= hess[(vi, ti)];
        }
        r
    });
    // A vanishing velocity Hessian shows up as difference noise, which the
    // condition number alone does not catch.
    let scale = g.values.iter().fold(lval.abs().max(1.0), |a, v| a.max(v.abs()));
    if w.amax() < 1e-7 * scale {
        return Err(MechError::SingularHessian { cond: f64::INFINITY });
    }
    let acc = lu_solve(&w, &rhs)?;
    let mut out = Vec::with_capacity(layout.len());
    if layout.has_t {
        out.push(1.0);
    }
    out.extend_from_slice(&s.m);
    out.extend(acc.iter());
    out.push(lval);
    Ok(out)
}

/// `p = g(q) v`.
pub fn mechanical_legendre(sys: &SystemDef, s: &State) -> Result<Vec<f64>> {
    let Flavor::MechanicalRayleigh { metric, .. } = &sys.flavor else {
        return Err(wrong("mechanical Rayleigh", sys));
    };
    sys.check_state(s)?;
    let g = metric.at(&s.q);
    spd_inverse(&g)?;
    Ok((g * DVector::from_column_slice(&s.m)).iter().copied().collect())
}

/// `v = g(q)⁻¹ p`.
pub fn mechanical_legendre_inverse(sys: &SystemDef, q: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    let Flavor::MechanicalRayleigh { metric, .. } = &sys.flavor else {
        return Err(wrong("mechanical Rayleigh", sys));
    };
    if q.len() != sys.n || p.len() != sys.n {
        return Err(MechError::DimensionMismatch { expected: sys.n, got: q.len().min(p.len()) });
    }
    let ginv = spd_inverse(&metric.at(q))?;
    Ok((ginv * DVector::from_column_slice(p)).iter().copied().collect())
}
