use mech_core::fd_step;
use nalgebra::{DMatrix, DVector};

use crate::error::{Result, VarintError};
use crate::lagrangian::DiscreteLagrangian;

pub const NEWTON_MAX_ITER: usize = 50;
/// Residual target, relative to the momentum scale of the step.
pub const NEWTON_TOL: f64 = 1e-12;
/// Target when `D₁L_d` is itself a difference quotient, whose noise floor
/// sits well above `NEWTON_TOL`.
pub const NEWTON_TOL_FD: f64 = 1e-9;

fn tolerance(dl: &DiscreteLagrangian, scale: f64) -> f64 {
    let base = if dl.has_analytic_partials() { NEWTON_TOL } else { NEWTON_TOL_FD };
    base * scale.max(1.0)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Damped Newton iteration with a central-difference Jacobian.
/// Returns the root, the final residual and the iteration count.
fn newton(
    f: impl Fn(&[f64]) -> Vec<f64>,
    x0: Vec<f64>,
    tol: f64,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut res = inf_norm(&fx);
    for it in 0..NEWTON_MAX_ITER {
        if res < tol {
            return Ok((x, res, it));
        }
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = fd_step(x[j]);
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let Some(dx) = jac.lu().solve(&DVector::from_column_slice(&fx)) else {
            return Err(VarintError::Newton { iterations: it, residual: res });
        };
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(x, d)| x - lambda * d).collect();
            let ft = f(&trial);
            let rt = inf_norm(&ft);
            if rt.is_finite() && (rt < res || lambda < 1e-4) {
                x = trial;
                fx = ft;
                res = rt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if res < tol {
        Ok((x, res, NEWTON_MAX_ITER))
    } else {
        Err(VarintError::Newton { iterations: NEWTON_MAX_ITER, residual: res })
    }
}

fn check_len(dl: &DiscreteLagrangian, v: &[f64]) -> Result<()> {
    if v.len() == dl.n {
        Ok(())
    } else {
        Err(VarintError::Dimension { expected: dl.n, got: v.len() })
    }
}

/// `(p⁻, p⁺)` with `p⁺ = D₂L_d + f⁺` and `p⁻ = −D₁L_d − f⁻`.
pub fn discrete_legendre(dl: &DiscreteLagrangian, q0: &[f64], q1: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d1 = dl.d1ld(q0, q1);
    let d2 = dl.d2ld(q0, q1);
    let fp = dl.fplus(q0, q1);
    let fm = dl.fminus(q0, q1);
    let pm = d1.iter().zip(&fm).map(|(a, b)| -a - b).collect();
    let pp = d2.iter().zip(&fp).map(|(a, b)| a + b).collect();
    (pm, pp)
}

/// Left-hand side of the forced discrete Euler–Lagrange equations.
pub fn del_residual(dl: &DiscreteLagrangian, q0: &[f64], q1: &[f64], q2: &[f64]) -> Vec<f64> {
    let (_, pplus) = discrete_legendre(dl, q0, q1);
    let (pminus, _) = discrete_legendre(dl, q1, q2);
    pplus.iter().zip(&pminus).map(|(a, b)| a - b).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelStep {
    pub q_next: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves the forced discrete Euler–Lagrange equations for `q_{k+1}`,
/// starting Newton from `2q_k − q_{k−1}`.
pub fn del_step(dl: &DiscreteLagrangian, q_prev: &[f64], q_curr: &[f64]) -> Result<DelStep> {
    check_len(dl, q_prev)?;
    check_len(dl, q_curr)?;
    let (_, pplus) = discrete_legendre(dl, q_prev, q_curr);
    let tol = tolerance(dl, inf_norm(&pplus));
    let guess = q_prev.iter().zip(q_curr).map(|(a, b)| 2.0 * b - a).collect();
    let f = |q2: &[f64]| {
        let (pminus, _) = discrete_legendre(dl, q_curr, q2);
        pplus.iter().zip(&pminus).map(|(a, b)| a - b).collect::<Vec<_>>()
    };
    let (q_next, residual, iterations) = newton(f, guess, tol)?;
    Ok(DelStep { q_next, residual, iterations })
}

/// Solves `p⁻(q₀, q₁) = p₀` for `q₁`.
pub fn initial_second_point(dl: &DiscreteLagrangian, q0: &[f64], p0: &[f64], guess: Option<Vec<f64>>) -> Result<Vec<f64>> {
    check_len(dl, q0)?;
    check_len(dl, p0)?;
    let tol = tolerance(dl, inf_norm(p0));
    let guess = guess.unwrap_or_else(|| q0.iter().zip(p0).map(|(q, p)| q + dl.h * p).collect());
    let f = |q1: &[f64]| {
        let (pminus, _) = discrete_legendre(dl, q0, q1);
        pminus.iter().zip(p0).map(|(a, b)| a - b).collect::<Vec<_>>()
    };
    Ok(newton(f, guess, tol)?.0)
}

/// One step of the discrete Hamiltonian flow `(q, p) ↦ (q', p')`:
/// invert the left transform for `q'`, then apply the right transform.
pub fn discrete_hamiltonian_flow(dl: &DiscreteLagrangian, q: &[f64], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let q1 = initial_second_point(dl, q, p, None)?;
    let (_, pplus) = discrete_legendre(dl, q, &q1);
    Ok((q1, pplus))
}

/// `steps` DEL iterates after `(q0, q1)`; the result starts with `q0, q1`.
pub fn del_trajectory(dl: &DiscreteLagrangian, q0: &[f64], q1: &[f64], steps: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(steps + 2);
    out.push(q0.to_vec());
    out.push(q1.to_vec());
    for _ in 0..steps {
        let k = out.len();
        let next = del_step(dl, &out[k - 2], &out[k - 1])?;
        out.push(next.q_next);
    }
    Ok(out)
}
