//! Transformed Jost and Weyl solutions, residues and pole conditions.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use super::{l2_norm_squared, Stage, TailSettings, TransformResult};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scattering::{residue_at, Residue, ResidueOptions};
use crate::schrodinger::{left_jost, right_jost};
use crate::wave::{wronskian, RealField, WaveField};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Index of the first node of `sub` inside `grid`, if the nodes coincide.
fn align(grid: &Grid, sub: &Grid) -> Result<usize> {
    let i = grid.index_of(sub.x_min).ok_or(Error::MismatchedGrids)?;
    let same_h = (grid.spacing() - sub.spacing()).abs() <= 1e-12 * grid.spacing();
    if !same_h || i + sub.n_points > grid.n_points {
        return Err(Error::MismatchedGrids);
    }
    Ok(i)
}

/// `u + sum alpha_m y_m W(u, phi_m) / (k^2 - omega_m^2)` with its derivative.
pub(crate) fn apply_stage(stage: &Stage, u: &WaveField) -> Result<WaveField> {
    let off = align(&stage.gram.grid, &u.grid)?;
    let k2 = u.k * u.k;
    let dens: Vec<c64> = stage.omegas.iter().map(|w| k2 - w * w).collect();
    for (d, w) in dens.iter().zip(&stage.omegas) {
        if d.norm() <= 1e-13 * w * w {
            return Err(Error::PoleEvaluation { k: format!("{}", u.k) });
        }
    }
    let mut values = u.values.clone();
    let mut derivs = u.derivs.clone();
    for i in 0..u.grid.n_points {
        let j = i + off;
        let (v, dv) = (u.values[i], u.derivs[i]);
        for (m, den) in dens.iter().enumerate() {
            let (p, dp) = (stage.phis[m].values[j], stage.phis[m].derivs[j]);
            let (y, dy) = (stage.ys[m].values[j], stage.ys[m].derivs[j]);
            let a = stage.alphas[m];
            let w = (v * dp - dv * p) / den;
            values[i] += a * y * w;
            derivs[i] += a * (dy * w + y * v * p);
        }
    }
    WaveField::new(u.grid, values, derivs, u.k)
}

pub(crate) fn apply_stage_real(stage: &Stage, f: &RealField) -> Result<RealField> {
    let out = apply_stage(stage, &f.to_complex())?;
    RealField::new(f.grid, out.values.iter().map(|v| v.re).collect(), out.derivs.iter().map(|v| v.re).collect(), f.k)
}

/// Regularized transform of the stage's own generator `m`:
/// `phi_m + sum_l y_l G_ml / alpha_m`.
fn regularized_generator(stage: &Stage, m: usize) -> Result<RealField> {
    let phi = &stage.phis[m];
    let n = stage.omegas.len();
    let np = phi.grid.n_points;
    let am = stage.alphas[m];
    let mut values = phi.values.clone();
    let mut derivs = phi.derivs.clone();
    for i in 0..np {
        for l in 0..n {
            let g = stage.gram.entry(i, m, l);
            let (y, dy) = (stage.ys[l].values[i], stage.ys[l].derivs[i]);
            values[i] += y * g / am;
            derivs[i] += dy * g / am + y * stage.alphas[l] * phi.values[i] * stage.phis[l].values[i];
        }
    }
    RealField::new(phi.grid, values, derivs, phi.k)
}

/// `phi_{+N}(., omega_n)` on the output grid, via the regularized form at the pole.
pub fn phi_plus_at_state(result: &TransformResult, n: usize) -> Result<WaveField> {
    let omega = result.states[n].omega;
    let mut r = result.phis[n].clone();
    for st in &result.stages {
        match st.omegas.iter().position(|&w| w == omega) {
            Some(m) => r = regularized_generator(st, m)?,
            None => r = apply_stage_real(st, &r)?,
        }
    }
    let r = r.slice(result.offset, result.offset + result.grid.n_points - 1)?;
    let s = &result.states[n];
    Ok(r.to_complex().scale(result.options.sign * s.sqrt_r()))
}

fn apply_all(result: &TransformResult, mut u: WaveField) -> Result<WaveField> {
    for st in &result.stages {
        u = apply_stage(st, &u)?;
    }
    Ok(u)
}

/// `psi_{+N}(., k)` on a node-aligned sub-grid of the working grid.
pub fn psi_plus_on(result: &TransformResult, k: c64, grid: &Grid) -> Result<WaveField> {
    let psi = right_jost(&result.seed, k, grid, &result.options.ode)?;
    apply_all(result, psi)
}

/// `(phi_{+N}, psi_{+N})` at `k` on `grid` (default: the output grid), where the seed's
/// `phi = 2ik psi_- / W(psi_-, psi)`.
pub fn transformed_solutions(
    result: &TransformResult,
    k: c64,
    grid: Option<&Grid>,
) -> Result<(WaveField, WaveField)> {
    let grid = grid.copied().unwrap_or(result.grid);
    let tol = &result.options.ode;
    let psi = right_jost(&result.seed, k, &grid, tol)?;
    let left = left_jost(&result.seed, k, &grid, tol)?.field;
    let xw = grid.x(grid.n_points / 2);
    let w = wronskian(&left, &psi, xw)?;
    if w.norm() == 0.0 {
        return Err(Error::DegenerateWronskian { k: format!("{k}"), modulus: 0.0 });
    }
    let phi = left.scale(2.0 * I * k / w);
    Ok((apply_all(result, phi)?, apply_all(result, psi)?))
}

fn subgrid(result: &TransformResult, lo: f64, hi: f64) -> Result<Grid> {
    let g = &result.work_grid;
    let i0 = g.nearest(lo);
    let i1 = g.nearest(hi);
    g.slice(i0, i1)
}

/// Richardson residue of `psi_{+N}` at `omega_n` on `[-half_width, half_width]` and its
/// `L^2(R)` norm (tails modelled beyond the window).
pub fn residue_of_psi_plus(
    result: &TransformResult,
    n: usize,
    half_width: f64,
    opts: &ResidueOptions,
) -> Result<(Residue, f64)> {
    let grid = subgrid(result, -half_width, half_width)?;
    let omega = result.states[n].omega;
    let res = residue_at(c64::new(omega, 0.0), |k| psi_plus_on(result, k, &grid), opts)?;
    let norm = complex_l2_norm(&res.field, omega, result)?;
    Ok((res, norm))
}

fn complex_l2_norm(f: &WaveField, omega: f64, result: &TransformResult) -> Result<f64> {
    let mut total = 0.0;
    let scale = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for part in [c64::new(1.0, 0.0), -I] {
        let r = f.real_part_scaled(part);
        let m = r.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if m <= 1e-8 * scale {
            let f2: Vec<f64> = r.values.iter().map(|v| v * v).collect();
            total += crate::quadrature::simpson(r.grid.spacing(), &f2);
            continue;
        }
        let mut r = r;
        r.k = omega;
        let span = r.grid.x_max - r.grid.x_min;
        let tail = TailSettings { window: result.options.tail.window.min(0.2 * span), ..result.options.tail.clone() };
        total += l2_norm_squared(&r, &[omega], &tail)?;
    }
    Ok(total.sqrt())
}

/// Max relative deviation between `Res_{omega_n} psi_{+N}` and `(i alpha^2 / R) phi_{+N}(., omega_n)`
/// on the output grid.
pub fn embedded_pole_condition(result: &TransformResult, n: usize, opts: &ResidueOptions) -> Result<f64> {
    let s = result.states[n];
    let res = residue_at(c64::new(s.omega, 0.0), |k| psi_plus_on(result, k, &result.grid), opts)?;
    let phi = phi_plus_at_state(result, n)?;
    let c = I * s.alpha * s.alpha / s.r_at_omega;
    let scale = phi.values.iter().map(|v| (c * v).norm()).fold(0.0, f64::max);
    let dev = res
        .field
        .values
        .iter()
        .zip(&phi.values)
        .map(|(r, p)| (r - c * p).norm())
        .fold(0.0, f64::max);
    Ok(dev / scale.max(1e-300))
}

/// Outcome of an isolated pole check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub kappa: f64,
    pub c2: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `Res_{i kappa} phi_{+N} = i c^2 psi_{+N}(., i kappa)` on the output grid clipped to
/// `[-10, 10]`; the deviation is relative to `max |c^2 psi_{+N}|`.
pub fn check_isolated_pole_preservation(result: &TransformResult, kappa: f64, c2: f64) -> Result<PoleReport> {
    let lo = result.grid.x_min.max(-10.0);
    let hi = result.grid.x_max.min(10.0);
    let grid = subgrid(result, lo, hi)?;
    let k0 = c64::new(0.0, kappa);
    let res = residue_at(k0, |k| Ok(transformed_solutions(result, k, Some(&grid))?.0), &ResidueOptions::default())?;
    let psi = psi_plus_on(result, k0, &grid)?;
    let target = psi.scale(I * c2);
    let scale = target.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let dev = res
        .field
        .values
        .iter()
        .zip(&target.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale.max(1e-300);
    let tolerance = 1e-4;
    Ok(PoleReport { kappa, c2, max_deviation: dev, tolerance, passed: dev <= tolerance })
}
