//! Cumulative Gram matrices `G(x)_{mn} = alpha_m alpha_n int phi_m phi_n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::tail::{fit_tails, product_tail, Side, TailFit, TailSettings};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::cumulative_hermite;
use crate::wave::RealField;

/// Where the cumulative integrals start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GramBase {
    /// `int_{-inf}^x`, with an analytic tail left of the grid.
    MinusInfinity,
    /// `int_{x0}^x` from a grid node.
    Point(f64),
    /// `int_x^{inf}`, with an analytic tail right of the grid.
    PlusInfinity,
}

/// Gram matrix per grid point, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramField {
    pub grid: Grid,
    pub n: usize,
    pub base: GramBase,
    pub entries: Vec<f64>,
    /// Contribution of the analytic tail to each entry (already included in `entries`).
    pub tail_constant: Vec<f64>,
    pub tail_fits: Vec<TailFit>,
}

impl GramField {
    pub fn at(&self, i: usize) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_row_slice(n, n, &self.entries[i * n * n..(i + 1) * n * n])
    }

    pub fn entry(&self, i: usize, m: usize, l: usize) -> f64 {
        self.entries[i * self.n * self.n + m * self.n + l]
    }

    /// Smallest eigenvalue over the grid (PSD diagnostic).
    pub fn min_eigenvalue(&self) -> f64 {
        (0..self.grid.n_points)
            .map(|i| self.at(i).symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the Gram field of `phis` weighted by `alphas`.
pub fn gram_field(phis: &[RealField], alphas: &[f64], base: GramBase, tail: &TailSettings) -> Result<GramField> {
    let n = phis.len();
    if alphas.len() != n {
        return Err(Error::InvalidInput("one alpha per field required".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty field list".into()));
    }
    let grid = phis[0].grid;
    if phis.iter().any(|p| !p.grid.same_as(&grid)) {
        return Err(Error::MismatchedGrids);
    }
    let np = grid.n_points;
    let h = grid.spacing();
    let xs = grid.points();
    let omegas: Vec<f64> = phis.iter().map(|p| p.k).collect();
    let fields: Vec<&[f64]> = phis.iter().map(|p| p.values.as_slice()).collect();
    let tail_fits = match base {
        GramBase::MinusInfinity => fit_tails(Side::Left, &xs, &fields, &omegas, tail)?,
        GramBase::PlusInfinity => fit_tails(Side::Right, &xs, &fields, &omegas, tail)?,
        GramBase::Point(_) => vec![],
    };
    let i0 = match base {
        GramBase::Point(x0) => Some(
            grid.index_of(x0)
                .ok_or_else(|| Error::InvalidInput(format!("base point {x0} is not a grid node")))?,
        ),
        _ => None,
    };
    let mut entries = vec![0.0; np * n * n];
    let mut tail_constant = vec![0.0; n * n];
    for m in 0..n {
        for l in 0..=m {
            let (a, b) = (&phis[m], &phis[l]);
            let f: Vec<f64> = (0..np).map(|i| a.values[i] * b.values[i]).collect();
            let df: Vec<f64> =
                (0..np).map(|i| a.derivs[i] * b.values[i] + a.values[i] * b.derivs[i]).collect();
            let cum = cumulative_hermite(h, &f, &df);
            let total = cum[np - 1];
            let tail_val = if tail_fits.is_empty() { 0.0 } else { product_tail(&tail_fits[m], &tail_fits[l])? };
            let w = alphas[m] * alphas[l];
            tail_constant[m * n + l] = w * tail_val;
            tail_constant[l * n + m] = w * tail_val;
            for i in 0..np {
                let v = match base {
                    GramBase::MinusInfinity => cum[i] + tail_val,
                    GramBase::PlusInfinity => total - cum[i] + tail_val,
                    GramBase::Point(_) => cum[i] - cum[i0.unwrap()],
                };
                entries[i * n * n + m * n + l] = w * v;
                entries[i * n * n + l * n + m] = w * v;
            }
        }
    }
    Ok(GramField { grid, n, base, entries, tail_constant, tail_fits })
}

/// Public entry point: `G_+` from `-inf` with analytic left tails.
pub fn gram_plus(phis: &[RealField], alphas: &[f64], tail: &TailSettings) -> Result<GramField> {
    gram_field(phis, alphas, GramBase::MinusInfinity, tail)
}
