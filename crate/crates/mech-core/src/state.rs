use std::ops::Range;

use crate::error::{MechError, Result};

/// Which coordinates a flat phase-space vector carries.
///
/// The order is always `(t?, q, m, z?)`, where `m` holds momenta or
/// velocities depending on the system flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub has_t: bool,
    pub has_z: bool,
}

impl Layout {
    pub const fn new(n: usize, has_t: bool, has_z: bool) -> Self {
        Self { n, has_t, has_z }
    }

    /// Plain `(q, m)` layout.
    pub const fn symplectic(n: usize) -> Self {
        Self::new(n, false, false)
    }

    /// `(q, p, z)` layout.
    pub const fn contact(n: usize) -> Self {
        Self::new(n, false, true)
    }

    /// `(t, q, p, z)` layout.
    pub const fn cocontact(n: usize) -> Self {
        Self::new(n, true, true)
    }

    pub fn len(&self) -> usize {
        2 * self.n + self.has_t as usize + self.has_z as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_index(&self) -> Option<usize> {
        self.has_t.then_some(0)
    }

    pub fn q_range(&self) -> Range<usize> {
        let o = self.has_t as usize;
        o..o + self.n
    }

    pub fn m_range(&self) -> Range<usize> {
        let o = self.has_t as usize + self.n;
        o..o + self.n
    }

    pub fn z_index(&self) -> Option<usize> {
        self.has_z.then(|| self.has_t as usize + 2 * self.n)
    }
}

/// A point of phase space.
///
/// `t` is always tracked; it only enters the flat vector when the layout
/// is time-dependent.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub q: Vec<f64>,
    pub m: Vec<f64>,
    pub z: Option<f64>,
}

impl State {
    pub fn new(t: f64, q: Vec<f64>, m: Vec<f64>, z: Option<f64>) -> Self {
        Self { t, q, m, z }
    }

    pub fn symplectic(q: Vec<f64>, m: Vec<f64>) -> Self {
        Self::new(0.0, q, m, None)
    }

    pub fn contact(q: Vec<f64>, p: Vec<f64>, z: f64) -> Self {
        Self::new(0.0, q, p, Some(z))
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn z(&self) -> Result<f64> {
        self.z.ok_or(MechError::MissingZ)
    }

    /// Checks the state against a layout.
    pub fn check(&self, layout: &Layout) -> Result<()> {
        if self.q.len() != layout.n {
            return Err(MechError::DimensionMismatch { expected: layout.n, got: self.q.len() });
        }
        if self.m.len() != layout.n {
            return Err(MechError::DimensionMismatch { expected: layout.n, got: self.m.len() });
        }
        if layout.has_z && self.z.is_none() {
            return Err(MechError::MissingZ);
        }
        Ok(())
    }

    pub fn to_flat(&self, layout: &Layout) -> Vec<f64> {
        let mut x = Vec::with_capacity(layout.len());
        if layout.has_t {
            x.push(self.t);
        }
        x.extend_from_slice(&self.q);
        x.extend_from_slice(&self.m);
        if layout.has_z {
            x.push(self.z.unwrap_or(0.0));
        }
        x
    }

    /// Rebuilds a state; `t` is used when the layout carries no time.
    pub fn from_flat(layout: &Layout, x: &[f64], t: f64) -> Self {
        debug_assert_eq!(x.len(), layout.len());
        let t = layout.t_index().map_or(t, |i| x[i]);
        Self {
            t,
            q: x[layout.q_range()].to_vec(),
            m: x[layout.m_range()].to_vec(),
            z: layout.z_index().map(|i| x[i]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.q.iter().all(|v| v.is_finite())
            && self.m.iter().all(|v| v.is_finite())
            && self.z.is_none_or(f64::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let layout = Layout::cocontact(2);
        let s = State::new(0.5, vec![1.0, 2.0], vec![3.0, 4.0], Some(5.0));
        let x = s.to_flat(&layout);
        assert_eq!(x, vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(State::from_flat(&layout, &x, 0.0), s);
        assert_eq!(layout.q_range(), 1..3);
        assert_eq!(layout.m_range(), 3..5);
        assert_eq!(layout.z_index(), Some(5));
    }

    #[test]
    fn check_rejects_missing_z() {
        let s = State::symplectic(vec![0.0], vec![1.0]);
        assert_eq!(s.check(&Layout::contact(1)), Err(MechError::MissingZ));
        assert!(s.check(&Layout::symplectic(1)).is_ok());
    }
}
