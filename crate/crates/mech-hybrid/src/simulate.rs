use mech_core::{Layout, State};
use mech_integrators::{rk4_step, IntegratorError, Trajectory, TrajectoryMeta};
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};
use crate::guard::HybridSystem;

/// Samples with `h < −DOMAIN_TOL` count as having left the domain.
const DOMAIN_TOL: f64 = 1e-9;
const REGULAR_TOL: f64 = 1e-10;
const EVENT_TOL: f64 = 1e-10;

/// One impact: the states immediately before and after.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridEvent {
    pub t: f64,
    pub guard: usize,
    pub label: String,
    pub pre: State,
    pub post: State,
}

/// Serializable form of a [`HybridEvent`] with flat state vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub guard: usize,
    pub label: String,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

/// Smooth segments between impacts. Segment `i` ends at the pre-impact
/// state of event `i`; segment `i+1` starts at its post-impact state.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridTrajectory {
    pub layout: Layout,
    pub segments: Vec<Trajectory>,
    pub events: Vec<HybridEvent>,
}

impl HybridTrajectory {
    pub fn final_state(&self) -> &State {
        self.segments.last().expect("at least one segment").final_state()
    }

    pub fn samples(&self) -> impl Iterator<Item = &State> {
        self.segments.iter().flat_map(|s| s.samples.iter())
    }

    pub fn event_records(&self) -> Vec<EventRecord> {
        self.events
            .iter()
            .map(|e| EventRecord {
                t: e.t,
                guard: e.guard,
                label: e.label.clone(),
                pre: e.pre.to_flat(&self.layout),
                post: e.post.to_flat(&self.layout),
            })
            .collect()
    }

    /// One trajectory with pre- and post-impact samples adjacent, both
    /// marked with the guard label.
    pub fn flatten(&self) -> Trajectory {
        let first = &self.segments[0];
        let mut out = Trajectory::new(self.layout, first.samples[0].clone(), first.meta.clone());
        for (i, seg) in self.segments.iter().enumerate() {
            let start = usize::from(i == 0);
            for (j, s) in seg.samples.iter().enumerate().skip(start) {
                out.push(s.clone());
                if i > 0 && j == 0 {
                    out.mark(self.events[i - 1].label.clone());
                }
            }
            if i < self.events.len() {
                let label = self.events[i].label.clone();
                if out.events.last().is_none_or(|(k, _)| *k != out.len() - 1) {
                    out.mark(label);
                }
            }
        }
        out
    }
}

fn min_h(hsys: &HybridSystem, idx: &[usize], q: &[f64]) -> (f64, usize) {
    idx.iter().map(|&i| (hsys.guards[i].h(q), i)).fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a })
}

/// Fixed-step RK4 with event location. When a guard changes sign across a
/// step the crossing is bisected in time to `1e-13·max(1, |t|)`; if the
/// approach predicate holds at the admissible end, the impact map is
/// applied there and integration resumes from the post-impact state.
pub fn hybrid_integrate(hsys: &HybridSystem, s0: &State, dt: f64, t_end: f64) -> Result<HybridTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegratorError::InvalidStep(dt).into());
    }
    if !(t_end > s0.t) {
        return Err(IntegratorError::InvalidSpan { t0: s0.t, t_end }.into());
    }
    let layout = hsys.layout();
    s0.check(&layout)?;
    for g in &hsys.guards {
        let v = g.h(&s0.q);
        if v < -DOMAIN_TOL {
            return Err(HybridError::EscapedDomain { guard: g.label.clone(), t: s0.t, value: v });
        }
    }
    let meta = TrajectoryMeta { system_id: hsys.id.clone(), dt, integrator: "rk4-hybrid".into() };
    let field = &*hsys.field;
    let mut out = HybridTrajectory { layout, segments: Vec::new(), events: Vec::new() };
    let mut seg = Trajectory::new(layout, s0.clone(), meta.clone());
    let t0 = s0.t;
    let mut k: u64 = 0;
    let mut s = s0.clone();
    let all: Vec<usize> = (0..hsys.guards.len()).collect();
    loop {
        let full = t0 + (k + 1) as f64 * dt;
        let last = full >= t_end - 1e-9 * dt;
        let target = if last { t_end } else { full };
        let h = target - s.t;
        if h <= 0.0 {
            if last {
                break;
            }
            k += 1;
            continue;
        }
        let next = rk4_step(field, &s, h)?;
        let candidates: Vec<usize> =
            all.iter().copied().filter(|&i| hsys.guards[i].h(&s.q) >= 0.0 && hsys.guards[i].h(&next.q) < 0.0).collect();
        let mut impact = None;
        if !candidates.is_empty() {
            let tol = 1e-13 * s.t.abs().max(1.0);
            let (mut lo, mut hi) = (0.0, h);
            let mut lo_state = s.clone();
            let mut hi_state = next.clone();
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let m = rk4_step(field, &s, mid)?;
                if min_h(hsys, &candidates, &m.q).0 < 0.0 {
                    hi = mid;
                    hi_state = m;
                } else {
                    lo = mid;
                    lo_state = m;
                }
            }
            let (_, gi) = min_h(hsys, &candidates, &hi_state.q);
            let guard = &hsys.guards[gi];
            if guard.h(&lo_state.q).abs() > EVENT_TOL {
                return Err(HybridError::EventLocation { t: lo_state.t });
            }
            let grad = guard.grad(&lo_state.q).iter().map(|g| g * g).sum::<f64>().sqrt();
            if grad <= REGULAR_TOL {
                return Err(HybridError::SingularGuard { guard: guard.label.clone(), t: lo_state.t, grad });
            }
            // A crossing whose admissible end sits at rest on the wall (as
            // after a plastic impact) is judged by the penetrating end.
            if guard.approaching(&lo_state) || guard.approaching(&hi_state) {
                impact = Some((gi, lo, lo_state));
            }
        }
        match impact {
            Some((gi, lo, pre)) => {
                let te = pre.t;
                let label = hsys.guards[gi].label.clone();
                let n_events = out.events.len() + 1;
                let gap = out.events.last().map(|e| te - e.t);
                let zeno = if n_events > hsys.zeno.max_events {
                    Some(format!("more than {} events", hsys.zeno.max_events))
                } else {
                    gap.filter(|g| *g < hsys.zeno.min_gap).map(|g| format!("inter-event gap {g:e} below {:e}", hsys.zeno.min_gap))
                };
                if let Some(reason) = zeno {
                    out.segments.push(seg);
                    return Err(HybridError::Zeno { reason, events: out.events.len(), t: te, partial: Box::new(out) });
                }
                let post = hsys.impacts[gi].apply(&pre)?;
                if lo > 0.0 {
                    seg.push(pre.clone());
                }
                out.segments.push(std::mem::replace(&mut seg, Trajectory::new(layout, post.clone(), meta.clone())));
                out.events.push(HybridEvent { t: te, guard: gi, label, pre, post: post.clone() });
                s = post;
            }
            None => {
                for g in &hsys.guards {
                    let v = g.h(&next.q);
                    if v < -DOMAIN_TOL {
                        return Err(HybridError::EscapedDomain { guard: g.label.clone(), t: next.t, value: v });
                    }
                }
                let mut next = next;
                next.t = target;
                seg.push(next.clone());
                s = next;
                if last {
                    break;
                }
                k += 1;
            }
        }
    }
    out.segments.push(seg);
    Ok(out)
}
