use mech_core::{Layout, State, SystemDef};

use crate::error::{IntegratorError, Result};
use crate::trajectory::{Trajectory, TrajectoryMeta};

/// Anything that yields `ẋ` in a flat layout.
pub trait VectorField {
    fn layout(&self) -> Layout;
    fn eval(&self, s: &State) -> mech_core::Result<Vec<f64>>;
}

impl VectorField for SystemDef {
    fn layout(&self) -> Layout {
        SystemDef::layout(self)
    }

    fn eval(&self, s: &State) -> mech_core::Result<Vec<f64>> {
        self.vector_field(s)
    }
}

/// A closure-backed field.
pub struct FnField<F> {
    pub layout: Layout,
    pub f: F,
}

impl<F> FnField<F>
where
    F: Fn(&State) -> Vec<f64>,
{
    pub fn new(layout: Layout, f: F) -> Self {
        Self { layout, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&State) -> Vec<f64>,
{
    fn layout(&self) -> Layout {
        self.layout
    }

    fn eval(&self, s: &State) -> mech_core::Result<Vec<f64>> {
        Ok((self.f)(s))
    }
}

fn eval_finite(field: &(impl VectorField + ?Sized), layout: &Layout, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let k = field.eval(&State::from_flat(layout, x, t))?;
    if k.iter().all(|v| v.is_finite()) {
        Ok(k)
    } else {
        Err(IntegratorError::NonFinite { t })
    }
}

/// One classical fourth-order Runge–Kutta step on the flat state.
pub fn rk4_step(field: &(impl VectorField + ?Sized), s: &State, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegratorError::InvalidStep(dt));
    }
    let layout = field.layout();
    s.check(&layout)?;
    let x = s.to_flat(&layout);
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(x, k)| x + a * k).collect() };
    let k1 = eval_finite(field, &layout, &x, s.t)?;
    let k2 = eval_finite(field, &layout, &axpy(0.5 * dt, &k1), s.t + 0.5 * dt)?;
    let k3 = eval_finite(field, &layout, &axpy(0.5 * dt, &k2), s.t + 0.5 * dt)?;
    let k4 = eval_finite(field, &layout, &axpy(dt, &k3), s.t + dt)?;
    let y: Vec<f64> = (0..x.len()).map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    let mut out = State::from_flat(&layout, &y, s.t + dt);
    // Keep the clock exact rather than accumulated through the stages.
    out.t = s.t + dt;
    if !out.is_finite() {
        return Err(IntegratorError::NonFinite { t: out.t });
    }
    Ok(out)
}

/// Fixed-step RK4 from `s0.t` to `t_end`; the last step is shortened to land
/// on `t_end` exactly. The observer sees every accepted state.
pub fn integrate_field(
    field: &(impl VectorField + ?Sized),
    s0: &State,
    dt: f64,
    t_end: f64,
    system_id: &str,
    mut observer: Option<&mut dyn FnMut(&State)>,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegratorError::InvalidStep(dt));
    }
    if !(t_end > s0.t) {
        return Err(IntegratorError::InvalidSpan { t0: s0.t, t_end });
    }
    let layout = field.layout();
    s0.check(&layout)?;
    let meta = TrajectoryMeta { system_id: system_id.to_string(), dt, integrator: "rk4".into() };
    let mut traj = Trajectory::new(layout, s0.clone(), meta);
    let t0 = s0.t;
    let mut k: u64 = 0;
    let mut s = s0.clone();
    loop {
        // Step boundaries come from t0 + k·dt so that rounding does not drift.
        let full = t0 + (k + 1) as f64 * dt;
        let last = full >= t_end - 1e-9 * dt;
        let target = if last { t_end } else { full };
        let h = target - s.t;
        if h <= 0.0 {
            break;
        }
        let mut next = match rk4_step(field, &s, h) {
            Ok(n) => n,
            Err(e) => return Err(IntegratorError::Aborted { reason: Box::new(e), partial: Box::new(traj) }),
        };
        next.t = target;
        if let Some(obs) = observer.as_mut() {
            obs(&next);
        }
        traj.push(next.clone());
        s = next;
        k += 1;
        if last {
            break;
        }
    }
    Ok(traj)
}

/// [`integrate_field`] on a system's own vector field.
pub fn integrate(
    sys: &SystemDef,
    s0: &State,
    dt: f64,
    t_end: f64,
    observer: Option<&mut dyn FnMut(&State)>,
) -> Result<Trajectory> {
    integrate_field(sys, s0, dt, t_end, sys.flavor.name(), observer)
}

const REF_START_DT: f64 = 1e-2;
const REF_MIN_DT: f64 = 1e-5;
const REF_AGREEMENT: f64 = 1e-10;

fn gap(a: &State, b: &State, layout: &Layout) -> f64 {
    let (x, y) = (a.to_flat(layout), b.to_flat(layout));
    x.iter().zip(&y).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
}

/// High-accuracy RK4 ground truth: halves the step from 1e-2 until two
/// successive final states agree to 1e-10, down to a floor of 1e-5.
pub fn reference_solve(field: &(impl VectorField + ?Sized), s0: &State, t_end: f64) -> Result<Trajectory> {
    let layout = field.layout();
    let mut dt = REF_START_DT.min(t_end - s0.t);
    let mut prev = integrate_field(field, s0, dt, t_end, "reference", None)?;
    loop {
        dt *= 0.5;
        let next = integrate_field(field, s0, dt, t_end, "reference", None)?;
        let g = gap(prev.final_state(), next.final_state(), &layout);
        if g < REF_AGREEMENT {
            let mut out = next;
            out.meta.integrator = "rk4-reference".into();
            return Ok(out);
        }
        if dt < REF_MIN_DT {
            return Err(IntegratorError::NoConvergence { dt, gap: g });
        }
        prev = next;
    }
}
