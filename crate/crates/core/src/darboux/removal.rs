//! Removal of embedded eigenvalues with orthonormal eigenfunctions:
//! `q_{-N} = q - 2 d^2/dx^2 log det H(x)`, `H(x) = int_x^inf phi phi^T`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::gram::{gram_field, GramBase};
use super::{DarbouxOptions, TransformResult};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::wave::RealField;

/// Eigenfunction with its momentum; the field carries `u` and `u'`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedEigenpair {
    pub omega: f64,
    pub field: RealField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalResult {
    pub grid: Grid,
    pub q_new: Vec<f64>,
    /// `log det H(x)` on the output grid.
    pub log_det: Vec<f64>,
    /// `max |int phi_m phi_n - delta_mn|`.
    pub orthonormality_error: f64,
}

/// Removes the embedded eigenvalues carried by `pairs` from the potential `q` sampled on the
/// eigenfunctions' grid, returning the result on `out` (a node-aligned sub-grid).
pub fn remove_embedded(
    q: &[f64],
    pairs: &[EmbeddedEigenpair],
    out: &Grid,
    opts: &DarbouxOptions,
) -> Result<RemovalResult> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no eigenfunctions given; pass the potential through unchanged instead".into()));
    }
    let grid = pairs[0].field.grid;
    if q.len() != grid.n_points || pairs.iter().any(|p| !p.field.grid.same_as(&grid)) {
        return Err(Error::MismatchedGrids);
    }
    let off = grid.index_of(out.x_min).ok_or(Error::MismatchedGrids)?;
    if off + out.n_points > grid.n_points || (grid.spacing() - out.spacing()).abs() > 1e-12 * grid.spacing() {
        return Err(Error::MismatchedGrids);
    }
    let n = pairs.len();
    let fields: Vec<RealField> = pairs
        .iter()
        .map(|p| {
            let mut f = p.field.clone();
            f.k = p.omega;
            f
        })
        .collect();
    let ones = vec![1.0; n];
    let right = gram_field(&fields, &ones, GramBase::PlusInfinity, &opts.tail)?;
    let left = gram_field(&fields, &ones, GramBase::MinusInfinity, &opts.tail)?;
    let last = grid.n_points - 1;
    let mut orth: f64 = 0.0;
    for m in 0..n {
        for l in 0..n {
            let total = left.entry(last, m, l) + right.entry(last, m, l);
            let target = if m == l { 1.0 } else { 0.0 };
            orth = orth.max((total - target).abs());
        }
    }
    if orth > 1e-6 {
        return Err(Error::NotOrthonormal(format!("Gram matrix deviates from I by {orth:.3e}")));
    }
    let rows: Vec<(f64, f64)> = (0..out.n_points)
        .into_par_iter()
        .map(|i| {
            let j = i + off;
            let h: DMatrix<f64> = right.at(j);
            let ch = h.cholesky().ok_or_else(|| {
                Error::NotOrthonormal(format!("H(x) is not positive definite at x = {}", grid.x(j)))
            })?;
            let v = DVector::from_iterator(n, fields.iter().map(|f| f.values[j]));
            let dv = DVector::from_iterator(n, fields.iter().map(|f| f.derivs[j]));
            let z = ch.solve(&v);
            let a = v.dot(&z);
            let b = dv.dot(&z);
            let ld = 2.0 * ch.l_dirty().diagonal().iter().take(n).map(|d| d.ln()).sum::<f64>();
            Ok((q[j] + 4.0 * b + 2.0 * a * a, ld))
        })
        .collect::<Result<_>>()?;
    Ok(RemovalResult {
        grid: *out,
        q_new: rows.iter().map(|r| r.0).collect(),
        log_det: rows.iter().map(|r| r.1).collect(),
        orthonormality_error: orth,
    })
}

/// Removes every state inserted by `result`, on its output grid.
pub fn remove_inserted(result: &TransformResult) -> Result<RemovalResult> {
    if result.states.is_empty() {
        return Ok(RemovalResult {
            grid: result.grid,
            q_new: result.q_new_out().to_vec(),
            log_det: vec![0.0; result.grid.n_points],
            orthonormality_error: 0.0,
        });
    }
    let pairs: Vec<EmbeddedEigenpair> = result
        .states
        .iter()
        .zip(&result.ys)
        .map(|(s, y)| EmbeddedEigenpair { omega: s.omega, field: y.clone() })
        .collect();
    remove_embedded(&result.q_new, &pairs, &result.grid, &result.options)
}
