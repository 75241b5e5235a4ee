use nalgebra::DVector;

use crate::error::{MechError, Result};
use crate::field::ScalarField;
use crate::state::State;
use crate::system::{spd_inverse, Flavor, SystemDef};

fn same_layout(f: &ScalarField, g: &ScalarField, s: &State) -> Result<()> {
    let lf = f.layout();
    if lf != g.layout() {
        return Err(MechError::DimensionMismatch { expected: lf.len(), got: g.layout().len() });
    }
    s.check(&lf)
}

/// `Σ (∂f/∂q_i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q_i)`.
pub fn poisson_bracket(f: &ScalarField, g: &ScalarField, s: &State) -> Result<f64> {
    same_layout(f, g, s)?;
    let df = f.gradient(s);
    let dg = g.gradient(s);
    Ok((0..s.n()).map(|i| df.dq()[i] * dg.dm()[i] - df.dm()[i] * dg.dq()[i]).sum())
}

/// Jacobi bracket of the Darboux contact form `dz − p dq`:
/// `{f,g} = X_f(g) + g ∂f/∂z`.
pub fn jacobi_bracket_contact(f: &ScalarField, g: &ScalarField, s: &State) -> Result<f64> {
    same_layout(f, g, s)?;
    if !f.layout().has_z {
        return Err(MechError::MissingZ);
    }
    let df = f.gradient(s);
    let dg = g.gradient(s);
    let (fz, gz) = (df.dz(), dg.dz());
    let fv = f.eval(s);
    let gv = g.eval(s);
    let mut xf_g = 0.0;
    let mut pfp = 0.0;
    for i in 0..s.n() {
        let p = s.m[i];
        xf_g += df.dm()[i] * dg.dq()[i] - (df.dq()[i] + p * fz) * dg.dm()[i];
        pfp += p * df.dm()[i];
    }
    xf_g += (pfp - fv) * gz;
    Ok(xf_g + gv * fz)
}

/// `W^{ij} ∂f/∂v_j ∂g/∂v_i` with `W = g(q)` for a mechanical Lagrangian.
pub fn dissipative_bracket(f: &ScalarField, g: &ScalarField, sys: &SystemDef, s: &State) -> Result<f64> {
    let Flavor::MechanicalRayleigh { metric, .. } = &sys.flavor else {
        return Err(MechError::WrongFlavor { expected: "mechanical Rayleigh", got: sys.flavor.name() });
    };
    same_layout(f, g, s)?;
    let winv = spd_inverse(&metric.at(&s.q))?;
    let fv = DVector::from_column_slice(f.gradient(s).dm());
    let gv = DVector::from_column_slice(g.gradient(s).dm());
    Ok(gv.dot(&(winv * fv)))
}
