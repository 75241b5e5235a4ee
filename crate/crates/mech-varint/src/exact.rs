use crate::error::{Result, VarintError};
use crate::lagrangian::{DiscreteLagrangian, DiscreteRayleigh};

/// Exact discrete Lagrangian, forces and Rayleigh potential of the
/// underdamped oscillator `m q̈ + r q̇ + k q = 0`, with `a = r/2m` and
/// `b = √(4km − r²)/2m`. Solutions of the discrete equations sample the
/// continuous solution exactly.
///
/// `L_d = (mb/2)[cot(bh)(q₀² + q₁²) − 2 cosh(ah) q₀q₁ / sin(bh)]`.
pub fn exact_discrete_damped_oscillator(
    m: f64,
    k: f64,
    r: f64,
    h: f64,
) -> Result<(DiscreteLagrangian, DiscreteRayleigh)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(VarintError::InvalidStep(h));
    }
    let disc = 4.0 * k * m - r * r;
    if !(disc > 0.0) || !(m > 0.0) {
        return Err(VarintError::NotUnderdamped(disc));
    }
    let a = r / (2.0 * m);
    let b = disc.sqrt() / (2.0 * m);
    let sb = (b * h).sin();
    if sb.abs() < 1e-12 {
        return Err(VarintError::Resonant);
    }
    let cot = (b * h).cos() / sb;
    let kk = (a * h).cosh() / sb;
    // sinh(ah)/a, continuous at a = 0.
    let sigma = if a.abs() < 1e-300 { h } else { (a * h).sinh() / a };
    let c = b * sigma / sb;
    let mb = m * b;

    let ld = DiscreteLagrangian::new(1, h, move |q0, q1| {
        0.5 * mb * (cot * (q0[0] * q0[0] + q1[0] * q1[0]) - 2.0 * kk * q0[0] * q1[0])
    })
    .with_partials(
        move |q0, q1| vec![mb * (cot * q0[0] - kk * q1[0])],
        move |q0, q1| vec![mb * (cot * q1[0] - kk * q0[0])],
    );
    let rd = DiscreteRayleigh::new(1, move |q0, q1| {
        0.25 * r * (q0[0] * q0[0] + q1[0] * q1[0]) - 0.5 * r * c * q0[0] * q1[0]
    })
    .with_partials(
        move |q0, q1| vec![0.5 * r * (q0[0] - c * q1[0])],
        move |q0, q1| vec![0.5 * r * (q1[0] - c * q0[0])],
    );
    let ld = ld.with_forces(
        move |q0, q1| vec![0.5 * r * (c * q0[0] - q1[0])],
        move |q0, q1| vec![0.5 * r * (q0[0] - c * q1[0])],
    );
    Ok((ld, rd))
}
