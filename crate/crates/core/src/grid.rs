//! Uniform one-dimensional grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_min, x_min + h, ..., x_max` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let g = Grid { x_min, x_max, n_points };
        g.validate()?;
        Ok(g)
    }

    /// Grid with the given spacing starting at `x_min`; `x_max` is rounded to a whole number of steps.
    pub fn with_spacing(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!("spacing {h} must be positive")));
        }
        let steps = ((x_max - x_min) / h).round().max(1.0) as usize;
        Grid::new(x_min, x_min + steps as f64 * h, steps + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::InvalidInput("grid bounds must be finite".into()));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 points".into()));
        }
        if !(self.x_min < self.x_max) {
            return Err(Error::InvalidInput(format!(
                "grid requires x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.x_min.abs().max(self.x_max.abs()));
        x >= self.x_min - tol && x <= self.x_max + tol
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let r = ((x - self.x_min) / self.spacing()).round();
        r.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Index `i` if `x` coincides with node `i` up to roundoff.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.nearest(x);
        let tol = 1e-9 * self.spacing();
        ((self.x(i) - x).abs() <= tol).then_some(i)
    }

    /// Sub-grid of nodes `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Grid> {
        if hi <= lo || hi >= self.n_points {
            return Err(Error::InvalidInput(format!("bad slice {lo}..={hi}")));
        }
        Grid::new(self.x(lo), self.x(hi), hi - lo + 1)
    }

    /// Grid with the same spacing extended by whole steps so that it covers `[lo, hi]`.
    /// Returns the extended grid and the offset of the original first node.
    pub fn extended(&self, lo: f64, hi: f64) -> (Grid, usize) {
        let h = self.spacing();
        let left = if lo < self.x_min { ((self.x_min - lo) / h).ceil() as usize } else { 0 };
        let right = if hi > self.x_max { ((hi - self.x_max) / h).ceil() as usize } else { 0 };
        let g = Grid {
            x_min: self.x_min - left as f64 * h,
            x_max: self.x_max + right as f64 * h,
            n_points: self.n_points + left + right,
        };
        (g, left)
    }

    /// True when both grids have identical nodes.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * (1.0 + self.x_min.abs())
            && (self.x_max - other.x_max).abs() <= 1e-12 * (1.0 + self.x_max.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_nodes() {
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.index_of(0.0), Some(2));
        assert_eq!(g.index_of(0.1), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 1.0, 3).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 3).is_err());
    }

    #[test]
    fn extension_keeps_nodes_aligned() {
        let g = Grid::new(-2.0, 2.0, 401).unwrap();
        let (e, off) = g.extended(-10.0, 5.0);
        assert_eq!(off, 800);
        assert!((e.x(off) - g.x_min).abs() < 1e-12);
        assert!((e.spacing() - g.spacing()).abs() < 1e-14);
        assert!(e.x_max >= 5.0 - 1e-12);
    }
}
