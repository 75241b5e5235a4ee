use crate::error::{DiagnosticsError, Result};

/// Two charts of action-angle type for `η = dz − p dq` on `ℝ³`, adapted to
/// the commuting pair `h = p`, `f = z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactChart {
    /// `(q, −log z, −p/z)` on `z > 0`.
    A,
    /// `(q − z/p, −log p, −z/p)` on `p > 0`.
    B,
}

/// `(q, p, z) ↦ (y⁰, y¹, Ã)`.
pub fn to_chart(chart: ContactChart, x: [f64; 3]) -> Result<[f64; 3]> {
    let [q, p, z] = x;
    match chart {
        ContactChart::A if z > 0.0 => Ok([q, -z.ln(), -p / z]),
        ContactChart::B if p > 0.0 => Ok([q - z / p, -p.ln(), -z / p]),
        _ => Err(DiagnosticsError::OutsideChart(q, p, z)),
    }
}

/// Inverse of [`to_chart`].
pub fn from_chart(chart: ContactChart, y: [f64; 3]) -> [f64; 3] {
    let [y0, y1, a] = y;
    match chart {
        ContactChart::A => {
            let z = (-y1).exp();
            [y0, -a * z, z]
        }
        ContactChart::B => {
            let p = (-y1).exp();
            [y0 - a, p, -a * p]
        }
    }
}

/// Chart components of a vector field `v` at `x`, by central differences
/// of the chart map.
pub fn chart_pushforward(chart: ContactChart, v: impl Fn([f64; 3]) -> [f64; 3], x: [f64; 3]) -> Result<[f64; 3]> {
    let dir = v(x);
    let mut out = [0.0; 3];
    for j in 0..3 {
        let h = x[j].abs().max(1.0) * 1e-6;
        let (mut xp, mut xm) = (x, x);
        xp[j] += h;
        xm[j] -= h;
        let (yp, ym) = (to_chart(chart, xp)?, to_chart(chart, xm)?);
        for i in 0..3 {
            out[i] += (yp[i] - ym[i]) / (2.0 * h) * dir[j];
        }
    }
    Ok(out)
}
