//! Binary Darboux transformation: insertion and removal of embedded eigenvalues.
//!
//! Given real generators `phi_n = 2 sigma Re[R(omega_n)^{1/2} psi(x, omega_n)]` and norming
//! constants `alpha_n`, insertion produces
//! `q_new = q - 2 d^2/dx^2 log det(I + G(x))` with `G_mn = alpha_m alpha_n int_{-inf}^x phi_m phi_n`
//! and eigenfunctions `y = -(alpha o phi)(I + G)^{-1}`.

pub mod gram;
pub mod removal;
pub mod tail;
pub mod transform;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::OdeTolerances;
use crate::potential::PotentialSpec;
use crate::quadrature::cumulative_hermite;
use crate::scattering::{reflection_from_wronskians, residue_at, PoleClass, ResidueOptions, ScatterOptions};
use crate::schrodinger::right_jost;
use crate::wave::{fmt17, RealField};

pub use gram::{gram_field, gram_plus, GramBase, GramField};
pub use removal::{remove_embedded, remove_inserted, EmbeddedEigenpair, RemovalResult};
pub use tail::{fit_tails, product_tail, Side, TailFit, TailSettings};
pub use transform::{
    check_isolated_pole_preservation, embedded_pole_condition, phi_plus_at_state, residue_of_psi_plus,
    transformed_solutions, PoleReport,
};

/// One embedded state to insert.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedStateSpec {
    pub omega: f64,
    pub alpha: f64,
    /// Reflection coefficient at `omega`; must lie on the unit circle.
    pub r_at_omega: c64,
}

impl EmbeddedStateSpec {
    pub fn new(omega: f64, alpha: f64, r_at_omega: c64) -> Result<Self> {
        let s = EmbeddedStateSpec { omega, alpha, r_at_omega };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be positive, got {}", self.omega)));
        }
        if self.alpha == 0.0 || !self.alpha.is_finite() {
            return Err(Error::InvalidInput("alpha must be finite and nonzero".into()));
        }
        let m = self.r_at_omega.norm();
        if (m - 1.0).abs() > 1e-8 {
            return Err(Error::NotResonant { omega: self.omega, modulus: m });
        }
        Ok(())
    }

    /// Principal square root of `R(omega)` with the argument taken in `(-pi, pi]`.
    pub fn sqrt_r(&self) -> c64 {
        let mut arg = self.r_at_omega.arg();
        if arg <= -std::f64::consts::PI + 1e-12 {
            arg = std::f64::consts::PI;
        }
        c64::from_polar(self.r_at_omega.norm().sqrt(), 0.5 * arg)
    }
}

fn validate_states(states: &[EmbeddedStateSpec]) -> Result<()> {
    for s in states {
        s.validate()?;
    }
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            if (a.omega - b.omega).abs() <= 1e-12 * a.omega.max(b.omega) {
                return Err(Error::InvalidInput(format!("duplicate omega {}", a.omega)));
            }
        }
    }
    Ok(())
}

/// Settings for insertion and removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxOptions {
    pub ode: OdeTolerances,
    /// Length added on each side of the output grid for tails and norms.
    pub extension: f64,
    pub tail: TailSettings,
    /// Overall sign `sigma` of the generators.
    pub sign: f64,
    /// Verify `|R(omega)| = 1` and continuity of `psi` at `omega` before inserting.
    pub check_resonance: bool,
    pub base: GramBase,
}

impl Default for DarbouxOptions {
    fn default() -> Self {
        DarbouxOptions {
            ode: OdeTolerances { rtol: 1e-12, atol: 1e-14, ..OdeTolerances::default() },
            extension: 400.0,
            tail: TailSettings::default(),
            sign: -1.0,
            check_resonance: true,
            base: GramBase::MinusInfinity,
        }
    }
}

/// Generator `phi_n` on `grid`.
pub fn phi_n(spec: &PotentialSpec, state: &EmbeddedStateSpec, grid: &Grid, opts: &DarbouxOptions) -> Result<RealField> {
    state.validate()?;
    let psi = right_jost(spec, c64::new(state.omega, 0.0), grid, &opts.ode)?;
    Ok(psi.real_part_scaled(2.0 * opts.sign * state.sqrt_r()))
}

/// Checks that `omega` is a full-reflection point of `spec` matching the declared `R(omega)`,
/// and that `psi(., k)` is continuous there.
pub fn check_resonance(spec: &PotentialSpec, state: &EmbeddedStateSpec) -> Result<()> {
    let c = spec.effective_right_cutoff();
    let c = if c.is_finite() { c } else { 0.0 };
    let grid = Grid::with_spacing(c - 10.0, c + 1.0, 0.01)?;
    let r = reflection_from_wronskians(spec, state.omega, &grid, &ScatterOptions::default())?;
    if (r.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::NotResonant { omega: state.omega, modulus: r.norm() });
    }
    if (r - state.r_at_omega).norm() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "declared R({}) = {} differs from computed {}",
            state.omega, state.r_at_omega, r
        )));
    }
    let small = grid.slice(grid.nearest(c - 2.0), grid.n_points - 1)?;
    let tol = OdeTolerances::default();
    let res = residue_at(
        c64::new(state.omega, 0.0),
        |k| right_jost(spec, k, &small, &tol),
        &ResidueOptions::default(),
    )?;
    if res.class != PoleClass::Regular {
        return Err(Error::InvalidInput(format!("psi has a pole at k = {}", state.omega)));
    }
    Ok(())
}

/// One application of the transformation with a block of states.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub omegas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Generators on the working grid.
    pub phis: Vec<RealField>,
    /// Eigenfunctions of the potential after this stage.
    pub ys: Vec<RealField>,
    pub gram: GramField,
}

pub(crate) struct StageOutput {
    pub(crate) stage: Stage,
    pub(crate) log_det: Vec<f64>,
    pub(crate) dlog: Vec<f64>,
    pub(crate) d2log: Vec<f64>,
}

pub(crate) struct PointSolve {
    pub(crate) log_det: f64,
    pub(crate) dlog: f64,
    pub(crate) d2log: f64,
    pub(crate) y: Vec<f64>,
    pub(crate) dy: Vec<f64>,
}

pub(crate) fn solve_point(g: DMatrix<f64>, v: DVector<f64>, dv: DVector<f64>, x: f64) -> Result<PointSolve> {
    let n = g.nrows();
    let a = DMatrix::<f64>::identity(n, n) + g;
    let ch = a.cholesky().ok_or_else(|| {
        Error::InternalConsistency(format!("I + G is not positive definite at x = {x}"))
    })?;
    let log_det = 2.0 * ch.l_dirty().diagonal().iter().take(n).map(|d| d.ln()).sum::<f64>();
    let z = ch.solve(&v);
    let w = ch.solve(&dv);
    let vz = v.dot(&z);
    let y: Vec<f64> = z.iter().map(|z| -z).collect();
    let dy: Vec<f64> = (0..n).map(|i| -w[i] - vz * y[i]).collect();
    Ok(PointSolve { log_det, dlog: vz, d2log: 2.0 * dv.dot(&z) - vz * vz, y, dy })
}

pub(crate) fn build_stage(phis: Vec<RealField>, omegas: Vec<f64>, alphas: Vec<f64>, opts: &DarbouxOptions) -> Result<StageOutput> {
    let gram = gram_field(&phis, &alphas, opts.base, &opts.tail)?;
    let grid = gram.grid;
    let n = phis.len();
    let solves: Vec<PointSolve> = (0..grid.n_points)
        .into_par_iter()
        .map(|i| {
            let v = DVector::from_iterator(n, (0..n).map(|m| alphas[m] * phis[m].values[i]));
            let dv = DVector::from_iterator(n, (0..n).map(|m| alphas[m] * phis[m].derivs[i]));
            solve_point(gram.at(i), v, dv, grid.x(i))
        })
        .collect::<Result<_>>()?;
    if opts.base == GramBase::MinusInfinity {
        if let Some((i, s)) = solves.iter().enumerate().find(|(_, s)| s.log_det < -1e-10) {
            return Err(Error::InternalConsistency(format!(
                "det(I + G) = {} < 1 at x = {}",
                s.log_det.exp(),
                grid.x(i)
            )));
        }
    }
    let ys = (0..n)
        .map(|m| {
            RealField::new(
                grid,
                solves.iter().map(|s| s.y[m]).collect(),
                solves.iter().map(|s| s.dy[m]).collect(),
                omegas[m],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StageOutput {
        log_det: solves.iter().map(|s| s.log_det).collect(),
        dlog: solves.iter().map(|s| s.dlog).collect(),
        d2log: solves.iter().map(|s| s.d2log).collect(),
        stage: Stage { omegas, alphas, phis, ys, gram },
    })
}

/// Output of an insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub seed: PotentialSpec,
    pub states: Vec<EmbeddedStateSpec>,
    pub options: DarbouxOptions,
    /// Requested output grid; a node-aligned sub-grid of `work_grid`.
    pub grid: Grid,
    pub work_grid: Grid,
    /// Index of the first output node in the working grid.
    pub offset: usize,
    pub q_seed: Vec<f64>,
    pub q_new: Vec<f64>,
    pub log_det: Vec<f64>,
    /// Exact first and second derivatives of `log_det`.
    pub dlog: Vec<f64>,
    pub d2log: Vec<f64>,
    /// Generators `phi_n` of the seed.
    pub phis: Vec<RealField>,
    /// Eigenfunctions `y_n` of `q_new` at `omega_n^2`.
    pub ys: Vec<RealField>,
    pub stages: Vec<Stage>,
}

impl TransformResult {
    fn out<'a>(&self, v: &'a [f64]) -> &'a [f64] {
        &v[self.offset..self.offset + self.grid.n_points]
    }

    pub fn q_new_out(&self) -> &[f64] {
        self.out(&self.q_new)
    }

    pub fn q_seed_out(&self) -> &[f64] {
        self.out(&self.q_seed)
    }

    pub fn log_det_out(&self) -> &[f64] {
        self.out(&self.log_det)
    }

    /// `y_n` restricted to the output grid.
    pub fn y_out(&self, n: usize) -> Result<RealField> {
        self.ys[n].slice(self.offset, self.offset + self.grid.n_points - 1)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    /// Writes columns `x, q_seed, q_new, log_det, y_1..y_N` on the output grid.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut head = String::from("x,q_seed,q_new,log_det");
        for n in 1..=self.n_states() {
            head.push_str(&format!(",y_{n}"));
        }
        writeln!(w, "{head}")?;
        for i in 0..self.grid.n_points {
            let j = self.offset + i;
            let mut line = format!(
                "{},{},{},{}",
                fmt17(self.grid.x(i)),
                fmt17(self.q_seed[j]),
                fmt17(self.q_new[j]),
                fmt17(self.log_det[j])
            );
            for y in &self.ys {
                line.push(',');
                line.push_str(&fmt17(y.values[j]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Metadata sidecar: states, tolerances and tail fit diagnostics.
    pub fn metadata(&self) -> serde_json::Value {
        let tails: Vec<serde_json::Value> = self
            .stages
            .iter()
            .flat_map(|s| s.gram.tail_fits.iter())
            .map(|f| {
                serde_json::json!({
                    "side": format!("{:?}", f.side),
                    "x_end": f.x_end,
                    "frequencies": f.freqs,
                    "orders": f.orders,
                    "misfit": f.misfit,
                })
            })
            .collect();
        serde_json::json!({
            "seed": self.seed,
            "states": self.states,
            "options": self.options,
            "grid": self.grid,
            "work_grid": self.work_grid,
            "stages": self.stages.len(),
            "tail_fits": tails,
            "min_log_det": self.log_det.iter().cloned().fold(f64::INFINITY, f64::min),
        })
    }
}

fn working_grid(grid: &Grid, opts: &DarbouxOptions) -> (Grid, usize) {
    let ext = opts.extension;
    match opts.base {
        GramBase::MinusInfinity => grid.extended(grid.x_min - ext, grid.x_max + ext),
        _ => grid.extended(grid.x_min, grid.x_max + ext),
    }
}

fn prepare(
    spec: &PotentialSpec,
    states: &[EmbeddedStateSpec],
    grid: &Grid,
    opts: &DarbouxOptions,
) -> Result<(Grid, usize, Vec<f64>, Vec<RealField>)> {
    spec.validate()?;
    grid.validate()?;
    validate_states(states)?;
    if opts.base == GramBase::PlusInfinity {
        return Err(Error::InvalidInput("insertion integrates from the left; use removal for the right base".into()));
    }
    if opts.check_resonance {
        for s in states {
            check_resonance(spec, s)?;
        }
    }
    let (work, offset) = working_grid(grid, opts);
    let q_seed = spec.sample(&work.points())?;
    let phis = states
        .par_iter()
        .map(|s| phi_n(spec, s, &work, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok((work, offset, q_seed, phis))
}

/// Inserts all states at once through the `N x N` Gram determinant.
pub fn insert_embedded(
    spec: &PotentialSpec,
    states: &[EmbeddedStateSpec],
    grid: &Grid,
    opts: &DarbouxOptions,
) -> Result<TransformResult> {
    let (work, offset, q_seed, phis) = prepare(spec, states, grid, opts)?;
    let np = work.n_points;
    let mut result = TransformResult {
        seed: spec.clone(),
        states: states.to_vec(),
        options: opts.clone(),
        grid: *grid,
        work_grid: work,
        offset,
        q_new: q_seed.clone(),
        q_seed,
        log_det: vec![0.0; np],
        dlog: vec![0.0; np],
        d2log: vec![0.0; np],
        phis: phis.clone(),
        ys: vec![],
        stages: vec![],
    };
    if states.is_empty() {
        return Ok(result);
    }
    let out = build_stage(
        phis,
        states.iter().map(|s| s.omega).collect(),
        states.iter().map(|s| s.alpha).collect(),
        opts,
    )?;
    for i in 0..np {
        result.q_new[i] -= 2.0 * out.d2log[i];
    }
    result.log_det = out.log_det;
    result.dlog = out.dlog;
    result.d2log = out.d2log;
    result.ys = out.stage.ys.clone();
    result.stages.push(out.stage);
    Ok(result)
}

/// Inserts the states one at a time, transforming each later generator by the earlier stages.
pub fn chain_insert(
    spec: &PotentialSpec,
    states: &[EmbeddedStateSpec],
    grid: &Grid,
    opts: &DarbouxOptions,
) -> Result<TransformResult> {
    let (work, offset, q_seed, phis) = prepare(spec, states, grid, opts)?;
    let np = work.n_points;
    let mut result = TransformResult {
        seed: spec.clone(),
        states: states.to_vec(),
        options: opts.clone(),
        grid: *grid,
        work_grid: work,
        offset,
        q_new: q_seed.clone(),
        q_seed,
        log_det: vec![0.0; np],
        dlog: vec![0.0; np],
        d2log: vec![0.0; np],
        phis: phis.clone(),
        ys: vec![],
        stages: vec![],
    };
    for (j, s) in states.iter().enumerate() {
        let mut g = phis[j].clone();
        for st in &result.stages {
            g = transform::apply_stage_real(st, &g)?;
        }
        let out = build_stage(vec![g], vec![s.omega], vec![s.alpha], opts)?;
        for i in 0..np {
            result.q_new[i] -= 2.0 * out.d2log[i];
            result.log_det[i] += out.log_det[i];
            result.dlog[i] += out.dlog[i];
            result.d2log[i] += out.d2log[i];
        }
        // earlier eigenfunctions are carried through the new stage
        let mut ys = Vec::with_capacity(j + 1);
        for y in &result.ys {
            ys.push(transform::apply_stage_real(&out.stage, y)?);
        }
        ys.push(out.stage.ys[0].clone());
        result.ys = ys;
        result.stages.push(out.stage);
    }
    Ok(result)
}

/// `int f^2` over the whole line, with tails modelled beyond both ends of the field's grid.
pub fn l2_norm_squared(field: &RealField, omegas: &[f64], tail: &TailSettings) -> Result<f64> {
    let xs = field.grid.points();
    let f2: Vec<f64> = field.values.iter().map(|v| v * v).collect();
    let df2: Vec<f64> = field.values.iter().zip(&field.derivs).map(|(v, d)| 2.0 * v * d).collect();
    let body = *cumulative_hermite(field.grid.spacing(), &f2, &df2).last().unwrap();
    let l = fit_tails(Side::Left, &xs, &[&field.values], omegas, tail)?;
    let r = fit_tails(Side::Right, &xs, &[&field.values], omegas, tail)?;
    Ok(body + product_tail(&l[0], &l[0])? + product_tail(&r[0], &r[0])?)
}

/// `||y_n||_{L^2}` over the whole line.
pub fn eigenfunction_norm(result: &TransformResult, n: usize) -> Result<f64> {
    Ok(l2_norm_squared(&result.ys[n], &[result.states[n].omega], &result.options.tail)?.sqrt())
}

/// `max |-y'' + q_new y - omega^2 y| / max |y|` on the output grid, with a five-point stencil.
pub fn eigen_residual(result: &TransformResult, n: usize) -> f64 {
    let y = &result.ys[n].values;
    let h = result.work_grid.spacing();
    let w2 = result.states[n].omega.powi(2);
    let lo = result.offset.max(2);
    let hi = (result.offset + result.grid.n_points).min(y.len() - 2);
    let mut worst: f64 = 0.0;
    let mut size: f64 = 0.0;
    for i in lo..hi {
        let ypp = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2]) / (12.0 * h * h);
        worst = worst.max((-ypp + result.q_new[i] * y[i] - w2 * y[i]).abs());
        size = size.max(y[i].abs());
    }
    if size > 0.0 {
        worst / size
    } else {
        worst
    }
}

/// Max deviation of the exact `(log det)'` from a fourth-order difference of `log det` on the
/// output grid (Jacobi's formula check).
pub fn jacobi_check(result: &TransformResult) -> f64 {
    let f = &result.log_det;
    let h = result.work_grid.spacing();
    let lo = result.offset.max(2);
    let hi = (result.offset + result.grid.n_points).min(f.len() - 2);
    (lo..hi)
        .map(|i| {
            let d = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            (d - result.dlog[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// Max deviation of the exact `(log det)''` from centered second differences of `log det` at
/// spacings `h` and `2h` combined by one Richardson step.
pub fn second_derivative_check(result: &TransformResult) -> f64 {
    let f = &result.log_det;
    let h = result.work_grid.spacing();
    let lo = result.offset.max(2);
    let hi = (result.offset + result.grid.n_points).min(f.len() - 2);
    (lo..hi)
        .map(|i| {
            let d1 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
            let d2 = (f[i + 2] - 2.0 * f[i] + f[i - 2]) / (4.0 * h * h);
            ((4.0 * d1 - d2) / 3.0 - result.d2log[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// Envelope fit `q - q_new ~ A sin(2 omega x + delta)/x` on `[a, b]`: returns `(A, delta)`.
pub fn fit_discrepancy(xs: &[f64], diff: &[f64], omega: f64) -> (f64, f64) {
    // least squares in the basis sin(2wx)/x, cos(2wx)/x, and 1/x^2 corrections
    let cols = 6;
    let mut a = DMatrix::<f64>::zeros(xs.len(), cols);
    for (i, &x) in xs.iter().enumerate() {
        let (s, c) = (2.0 * omega * x).sin_cos();
        let row = [s / x, c / x, s / (x * x), c / (x * x), 1.0 / (x * x), 1.0 / (x * x * x)];
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    let b = DVector::from_column_slice(diff);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("svd solve");
    let (p, q) = (sol[0], sol[1]);
    let amp = (p * p + q * q).sqrt();
    let delta = q.atan2(p);
    (amp, delta)
}

#[cfg(test)]
mod tests;
