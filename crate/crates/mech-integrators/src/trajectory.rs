use mech_core::{Layout, State};

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMeta {
    pub system_id: String,
    pub dt: f64,
    pub integrator: String,
}

/// Ordered samples plus labelled event markers.
///
/// At an impact two samples share the same time: the pre-impact state and
/// the post-impact state. Times are otherwise strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub events: Vec<(usize, String)>,
    pub meta: TrajectoryMeta,
    pub layout: Layout,
}

impl Trajectory {
    pub fn new(layout: Layout, s0: State, meta: TrajectoryMeta) -> Self {
        Self { samples: vec![s0], events: Vec::new(), meta, layout }
    }

    pub fn push(&mut self, s: State) {
        self.samples.push(s);
    }

    /// Marks the most recent sample.
    pub fn mark(&mut self, label: impl Into<String>) {
        let i = self.samples.len() - 1;
        self.events.push((i, label.into()));
    }

    pub fn final_state(&self) -> &State {
        self.samples.last().expect("trajectory always holds its initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample closest in time to `t`.
    pub fn at_time(&self, t: f64) -> &State {
        let i = self.samples.partition_point(|s| s.t < t);
        match i {
            0 => &self.samples[0],
            i if i >= self.samples.len() => self.final_state(),
            i if (self.samples[i].t - t).abs() < (t - self.samples[i - 1].t).abs() => &self.samples[i],
            i => &self.samples[i - 1],
        }
    }

    /// Checks ordering: times strictly increase except at marked events,
    /// where one repeat is allowed; event indices are sorted and in range.
    pub fn is_well_formed(&self) -> bool {
        let events_ok = self.events.windows(2).all(|w| w[0].0 <= w[1].0)
            && self.events.iter().all(|(i, _)| *i < self.samples.len());
        let times_ok = self.samples.windows(2).enumerate().all(|(k, w)| {
            w[1].t > w[0].t || (w[1].t == w[0].t && self.events.iter().any(|(i, _)| *i == k || *i == k + 1))
        });
        events_ok && times_ok
    }
}
