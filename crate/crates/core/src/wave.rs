//! Sampled solutions of the Schrödinger equation.

use std::io::Write;

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::lagrange4;

/// Complex solution `u` and `u'` on a grid at momentum `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub values: Vec<c64>,
    pub derivs: Vec<c64>,
    pub k: c64,
}

/// Real-valued solution with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub k: f64,
}

impl WaveField {
    pub fn new(grid: Grid, values: Vec<c64>, derivs: Vec<c64>, k: c64) -> Result<Self> {
        if values.len() != grid.n_points || derivs.len() != grid.n_points {
            return Err(Error::InvalidInput("field length does not match grid".into()));
        }
        Ok(WaveField { grid, values, derivs, k })
    }

    pub fn energy(&self) -> c64 {
        self.k * self.k
    }

    pub fn conj(&self) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            derivs: self.derivs.iter().map(|v| v.conj()).collect(),
            k: -self.k.conj(),
        }
    }

    pub fn scale(&self, c: c64) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            derivs: self.derivs.iter().map(|v| v * c).collect(),
            k: self.k,
        }
    }

    /// `a * self + b * other` on the same grid.
    pub fn combine(&self, a: c64, other: &WaveField, b: c64) -> Result<WaveField> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::MismatchedGrids);
        }
        Ok(WaveField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect(),
            derivs: self.derivs.iter().zip(&other.derivs).map(|(u, v)| a * u + b * v).collect(),
            k: self.k,
        })
    }

    /// `Re(c * u)` as a real field.
    pub fn real_part_scaled(&self, c: c64) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| (c * v).re).collect(),
            derivs: self.derivs.iter().map(|v| (c * v).re).collect(),
            k: self.k.re,
        }
    }

    /// Value and derivative at `x` by local cubic interpolation.
    pub fn at(&self, x: f64) -> Result<(c64, c64)> {
        if !self.grid.contains(x) {
            return Err(Error::OutOfDomain { x, lo: self.grid.x_min, hi: self.grid.x_max });
        }
        if let Some(i) = self.grid.index_of(x) {
            return Ok((self.values[i], self.derivs[i]));
        }
        if self.grid.n_points < 4 {
            return Err(Error::InvalidInput("interpolation needs four grid points".into()));
        }
        let h = self.grid.spacing();
        Ok((lagrange4(self.grid.x_min, h, &self.values, x), lagrange4(self.grid.x_min, h, &self.derivs, x)))
    }

    /// Restriction to nodes `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<WaveField> {
        Ok(WaveField {
            grid: self.grid.slice(lo, hi)?,
            values: self.values[lo..=hi].to_vec(),
            derivs: self.derivs[lo..=hi].to_vec(),
            k: self.k,
        })
    }

    /// Writes columns `x, Re u, Im u, Re u', Im u'`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,re_u,im_u,re_du,im_du")?;
        for i in 0..self.grid.n_points {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt17(self.grid.x(i)),
                fmt17(self.values[i].re),
                fmt17(self.values[i].im),
                fmt17(self.derivs[i].re),
                fmt17(self.derivs[i].im)
            )?;
        }
        Ok(())
    }
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>, derivs: Vec<f64>, k: f64) -> Result<Self> {
        if values.len() != grid.n_points || derivs.len() != grid.n_points {
            return Err(Error::InvalidInput("field length does not match grid".into()));
        }
        Ok(RealField { grid, values, derivs, k })
    }

    pub fn to_complex(&self) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|&v| c64::new(v, 0.0)).collect(),
            derivs: self.derivs.iter().map(|&v| c64::new(v, 0.0)).collect(),
            k: c64::new(self.k, 0.0),
        }
    }

    pub fn scale(&self, c: f64) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            derivs: self.derivs.iter().map(|v| v * c).collect(),
            k: self.k,
        }
    }

    pub fn at(&self, x: f64) -> Result<(f64, f64)> {
        if !self.grid.contains(x) {
            return Err(Error::OutOfDomain { x, lo: self.grid.x_min, hi: self.grid.x_max });
        }
        if let Some(i) = self.grid.index_of(x) {
            return Ok((self.values[i], self.derivs[i]));
        }
        let h = self.grid.spacing();
        Ok((lagrange4(self.grid.x_min, h, &self.values, x), lagrange4(self.grid.x_min, h, &self.derivs, x)))
    }

    pub fn slice(&self, lo: usize, hi: usize) -> Result<RealField> {
        Ok(RealField {
            grid: self.grid.slice(lo, hi)?,
            values: self.values[lo..=hi].to_vec(),
            derivs: self.derivs[lo..=hi].to_vec(),
            k: self.k,
        })
    }
}

/// `W(f, g)(x) = f g' - f' g`, interpolated off-grid.
pub fn wronskian(f: &WaveField, g: &WaveField, x: f64) -> Result<c64> {
    if !f.grid.same_as(&g.grid) {
        return Err(Error::MismatchedGrids);
    }
    let (fv, fd) = f.at(x)?;
    let (gv, gd) = g.at(x)?;
    Ok(fv * gd - fd * gv)
}

/// Pointwise Wronskian on every node.
pub fn wronskian_samples(f: &WaveField, g: &WaveField) -> Result<Vec<c64>> {
    if !f.grid.same_as(&g.grid) {
        return Err(Error::MismatchedGrids);
    }
    Ok((0..f.grid.n_points).map(|i| f.values[i] * g.derivs[i] - f.derivs[i] * g.values[i]).collect())
}

/// Fixed 17-significant-digit formatting used by every CSV writer.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(k: f64, grid: Grid) -> WaveField {
        let i = c64::new(0.0, 1.0);
        let xs = grid.points();
        WaveField::new(
            grid,
            xs.iter().map(|&x| (i * k * x).exp()).collect(),
            xs.iter().map(|&x| i * k * (i * k * x).exp()).collect(),
            c64::new(k, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn plane_wave_wronskian() {
        let g = Grid::new(-3.0, 3.0, 601).unwrap();
        let p = plane(1.3, g);
        let w = wronskian(&p.conj(), &p, 0.123).unwrap();
        assert!((w - c64::new(0.0, 2.6)).norm() < 1e-6);
        assert!(wronskian(&p, &p, 1.0).unwrap().norm() < 1e-14);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = plane(1.0, Grid::new(0.0, 1.0, 11).unwrap());
        let b = plane(1.0, Grid::new(0.0, 2.0, 11).unwrap());
        assert_eq!(wronskian(&a, &b, 0.5), Err(Error::MismatchedGrids));
    }

    #[test]
    fn csv_has_five_columns() {
        let a = plane(1.0, Grid::new(0.0, 1.0, 5).unwrap());
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 6);
        assert!(s.lines().all(|l| l.split(',').count() == 5));
    }
}
