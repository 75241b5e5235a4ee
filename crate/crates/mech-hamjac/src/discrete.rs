use mech_varint::{del_step, discrete_hamiltonian_flow, discrete_legendre, DiscreteLagrangian};

use crate::error::Result;
use crate::numeric::newton;

/// Midpoint discretisation of `m q̈ + r q̇ + k q = 0` with
/// `L_d = h m/2 ((q₁−q₀)/h)² − h k/2 ((q₀+q₁)/2)²` and
/// `f_d^± = −r (q₁−q₀)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MidpointOscillator {
    pub m: f64,
    pub k: f64,
    pub r: f64,
    pub h: f64,
}

impl MidpointOscillator {
    pub fn ld(&self, q0: f64, q1: f64) -> f64 {
        let v = (q1 - q0) / self.h;
        let x = 0.5 * (q0 + q1);
        0.5 * self.h * (self.m * v * v - self.k * x * x)
    }

    pub fn lagrangian(&self) -> DiscreteLagrangian {
        let Self { m, k, r, h } = *self;
        let me = *self;
        DiscreteLagrangian::new(1, h, move |a, b| me.ld(a[0], b[0]))
            .with_partials(
                move |a, b| vec![-m * (b[0] - a[0]) / h - 0.25 * k * h * (a[0] + b[0])],
                move |a, b| vec![m * (b[0] - a[0]) / h - 0.25 * k * h * (a[0] + b[0])],
            )
            .with_forces(move |a, b| vec![-0.5 * r * (b[0] - a[0])], move |a, b| vec![-0.5 * r * (b[0] - a[0])])
    }

    /// The closed-form projected flow `q_{j+1} = F⁻(q_{j−1}, q_j)`.
    pub fn projected_flow(&self, q_prev: f64, q: f64) -> f64 {
        let Self { m, k, r, h } = *self;
        (-h * h * k * (q_prev + 2.0 * q) + 2.0 * h * q_prev * r - 4.0 * m * (q_prev - 2.0 * q)) / (h * h * k + 2.0 * h * r + 4.0 * m)
    }

    /// The closed-form discrete Hamiltonian flow `(q, p) ↦ (q', p')`.
    pub fn hamiltonian_flow(&self, q: f64, p: f64) -> (f64, f64) {
        let Self { m, k, r, h } = *self;
        let d = h * h * k + 2.0 * h * r + 4.0 * m;
        let q1 = (-h * h * k * q + 4.0 * h * p + 2.0 * h * q * r + 4.0 * m * q) / d;
        let p1 = -(h * h * k * p + 4.0 * h * k * m * q + 2.0 * h * p * r - 4.0 * m * p) / d;
        (q1, p1)
    }

    /// `γ_j⁻` in the three-point form printed alongside the flow.
    pub fn printed_gamma_minus(&self, q_prev: f64, q: f64, q_next: f64) -> f64 {
        let Self { m, k, r, h } = *self;
        (m / h - 0.75 * k * h) * q - (m / h - 0.5 * k * h) * q_next - (2.0 * m / h + 0.5 * k * h) * q_prev
            + 0.5 * r * (q_next - q)
    }
}

/// `H_d⁻(q₁, p₀) = −p₀·q̂ − L_d(q̂, q₁)` with `p⁻(q̂, q₁) = p₀`.
fn hd_minus(dl: &DiscreteLagrangian, q1: &[f64], p0: &[f64], guess: &[f64]) -> f64 {
    let (qh, _) = newton(
        |x| discrete_legendre(dl, x, q1).0.iter().zip(p0).map(|(a, b)| a - b).collect(),
        guess.to_vec(),
        1e-14,
        40,
    );
    -dot(p0, &qh) - dl.ld(&qh, q1)
}

/// `H_d⁺(q₀, p₁) = p₁·q̃ − L_d(q₀, q̃)` with `p⁺(q₀, q̃) = p₁`.
fn hd_plus(dl: &DiscreteLagrangian, q0: &[f64], p1: &[f64], guess: &[f64]) -> f64 {
    let (qt, _) = newton(
        |x| discrete_legendre(dl, q0, x).1.iter().zip(p1).map(|(a, b)| a - b).collect(),
        guess.to_vec(),
        1e-14,
        40,
    );
    dot(p1, &qt) - dl.ld(q0, &qt)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Results of the discrete HJ check; every field is a sup-norm gap.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteHjReport {
    pub steps: usize,
    /// Closed-form projected flow against forced DEL iterates.
    pub flow_vs_del: f64,
    /// Left forced discrete HJ equation along the sequence.
    pub hj_left: f64,
    /// Right forced discrete HJ equation along the sequence.
    pub hj_right: f64,
    /// `F_d^H(q_k, γ_k⁻) = (q_{k+1}, γ_k⁺)`, closed form and Newton flow, and
    /// `γ_{k−1}⁺ = γ_k⁻`.
    pub hamilton_flow: f64,
    /// `|γ_k⁺ − D₂L_d|`; vanishes exactly when the force does.
    pub plus_vs_unforced: f64,
    /// The printed three-point `γ⁻` against the genuine left momentum.
    /// Reported only; it is not a solution.
    pub printed_gamma_minus_gap: f64,
    pub sequence: Vec<f64>,
}

impl DiscreteHjReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.flow_vs_del < tol && self.hj_left < tol && self.hj_right < tol && self.hamilton_flow < tol
    }
}

/// Builds the sequence from the projected flow, the action sums
/// `A^k = Σ_{j<k} L_d(q_j, q_{j+1})` and `γ_k^± = p^±(q_k, q_{k+1})`, and
/// checks them against DEL, both discrete HJ equations and the discrete
/// Hamiltonian flow.
pub fn discrete_hj_check(osc: &MidpointOscillator, q0: f64, q1: f64, steps: usize) -> Result<DiscreteHjReport> {
    let dl = osc.lagrangian();
    let mut qs = vec![q0, q1];
    let mut flow_vs_del: f64 = 0.0;
    let mut del = vec![q0, q1];
    for j in 1..steps {
        qs.push(osc.projected_flow(qs[j - 1], qs[j]));
        let next = del_step(&dl, &[del[j - 1]], &[del[j]])?.q_next[0];
        del.push(next);
        flow_vs_del = flow_vs_del.max((qs[j + 1] - next).abs());
    }
    let mut action = vec![0.0];
    for j in 0..steps {
        action.push(action[j] + osc.ld(qs[j], qs[j + 1]));
    }
    let (mut hj_left, mut hj_right, mut hamilton_flow, mut plus_vs_unforced, mut printed): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut prev_plus: Option<f64> = None;
    for j in 0..steps {
        let (a, b) = ([qs[j]], [qs[j + 1]]);
        let (gm, gp) = discrete_legendre(&dl, &a, &b);
        let da = action[j + 1] - action[j];
        let guess_m = [2.0 * qs[j] - qs[j + 1]];
        let guess_p = [2.0 * qs[j + 1] - qs[j]];
        hj_left = hj_left.max((da + gm[0] * qs[j] + hd_minus(&dl, &b, &gm, &guess_m)).abs());
        hj_right = hj_right.max((da - gp[0] * qs[j + 1] + hd_plus(&dl, &a, &gp, &guess_p)).abs());
        let (q_next, p_next) = osc.hamiltonian_flow(qs[j], gm[0]);
        let (qn, pn) = discrete_hamiltonian_flow(&dl, &a, &gm)?;
        hamilton_flow = hamilton_flow
            .max((q_next - qs[j + 1]).abs())
            .max((p_next - gp[0]).abs())
            .max((qn[0] - qs[j + 1]).abs())
            .max((pn[0] - gp[0]).abs());
        if let Some(pp) = prev_plus {
            hamilton_flow = hamilton_flow.max((pp - gm[0]).abs());
        }
        prev_plus = Some(gp[0]);
        plus_vs_unforced = plus_vs_unforced.max((gp[0] - dl.d2ld(&a, &b)[0]).abs());
        if j >= 1 {
            printed = printed.max((osc.printed_gamma_minus(qs[j - 1], qs[j], qs[j + 1]) - gm[0]).abs());
        }
    }
    Ok(DiscreteHjReport {
        steps,
        flow_vs_del,
        hj_left,
        hj_right,
        hamilton_flow,
        plus_vs_unforced,
        printed_gamma_minus_gap: printed,
        sequence: qs,
    })
}
