//! Darboux insertion into the evolved seed: generators
//! `phi_n(x, t) = 2 sigma Re[R(omega_n)^{1/2} e^{4i omega_n^3 t} psi(x, t, omega_n)]`, and
//! `q_{+N}(x, t) = q(x, t) - 2 d^2/dx^2 log det(I + G(x, t))`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvolvedState, HankelSolution};
use crate::darboux::{solve_point, EmbeddedStateSpec, PointSolve};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scattering::{classify_sweep, sweep_exponent, SweepClass, SWEEP_EPS};
use crate::wave::fmt17;
use crate::wvn_oracle::{q_plus1, q_seed, ExampleParams};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Settings of the evolved insertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolvedInsertionOptions {
    /// Overall generator sign.
    pub sign: f64,
    /// Largest accepted `|Im|` of a Gram entry relative to `1 + |Re|`.
    pub max_gram_imag: f64,
}

impl Default for EvolvedInsertionOptions {
    fn default() -> Self {
        EvolvedInsertionOptions { sign: -1.0, max_gram_imag: 1e-6 }
    }
}

/// `q` and `q_{+N}` at one time on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolvedInsertion {
    pub t: f64,
    pub grid: Grid,
    pub omegas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub q: Vec<f64>,
    pub q_plus: Vec<f64>,
    /// Generators and their derivatives, `[state][point]`.
    pub phis: Vec<Vec<f64>>,
    pub dphis: Vec<Vec<f64>>,
    /// Eigenfunctions of `q_{+N}` and their derivatives.
    pub ys: Vec<Vec<f64>>,
    pub dys: Vec<Vec<f64>>,
    pub log_det: Vec<f64>,
    /// Largest imaginary part met in a Gram entry.
    pub gram_imag: f64,
}

impl EvolvedInsertion {
    /// CSV with columns `x,t,q,q_plus`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,t,q,q_plus")?;
        for i in 0..self.grid.n_points {
            writeln!(
                w,
                "{},{},{},{}",
                fmt17(self.grid.x(i)),
                fmt17(self.t),
                fmt17(self.q[i]),
                fmt17(self.q_plus[i])
            )?;
        }
        Ok(())
    }
}

fn check_states(state: &EvolvedState, states: &[EmbeddedStateSpec]) -> Result<()> {
    for (i, st) in states.iter().enumerate() {
        st.validate()?;
        let r = state.reflection(c64::new(st.omega, 0.0)) * (c64::new(0.0, -8.0 * state.t) * st.omega.powi(3)).exp();
        if (r - st.r_at_omega).norm() > 1e-6 || (r.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::NotResonant { omega: st.omega, modulus: r.norm() });
        }
        if states[..i].iter().any(|o| (o.omega - st.omega).abs() <= 1e-12 * st.omega) {
            return Err(Error::InvalidInput(format!("duplicate omega {}", st.omega)));
        }
    }
    Ok(())
}

/// Generators, their derivatives and the unweighted Gram matrix
/// `int_{-inf}^x phi_m phi_l` at one point.
///
/// With `Phi_k = c (conj psi_k + R(k, t) psi_k)`, a multiple of the left Jost solution, and
/// `c` chosen so that `Phi_omega = phi`, the Gram entries are the Wronskians
/// `W(d Phi_k/dk, phi)(x) / (2 omega)` on the diagonal and `W(phi_m, phi_l)(x) / (omega_m^2 - omega_l^2)`
/// off it; both vanish at `-inf`.
struct PointData {
    phi: Vec<f64>,
    dphi: Vec<f64>,
    gram: DMatrix<f64>,
    imag: f64,
}

fn point_data(state: &EvolvedState, s: &HankelSolution, states: &[EmbeddedStateSpec], sign: f64) -> PointData {
    let n = states.len();
    let mut phi = vec![0.0; n];
    let mut dphi = vec![0.0; n];
    let mut gram = DMatrix::zeros(n, n);
    let mut imag: f64 = 0.0;
    for (m, st) in states.iter().enumerate() {
        let w = st.omega;
        let k = c64::new(w, 0.0);
        let a = sign * st.sqrt_r() * (I * 4.0 * w * w * w * state.t).exp();
        let c = a.conj();
        let (psi, dpsi) = s.jost(k);
        let (pk, dpk) = s.jost_dk(k);
        let (r, rk) = (state.reflection(k), state.reflection_dk(k));
        let f = c * (psi.conj() + r * psi);
        let df = c * (dpsi.conj() + r * dpsi);
        phi[m] = f.re;
        dphi[m] = df.re;
        imag = imag.max(f.im.abs()).max(df.im.abs());
        let g = c * (pk.conj() + rk * psi + r * pk);
        let dg = c * (dpk.conj() + rk * dpsi + r * dpk);
        let v = (g * dphi[m] - dg * phi[m]) / (2.0 * w);
        imag = imag.max(v.im.abs() / (1.0 + v.re.abs()));
        gram[(m, m)] = v.re;
    }
    for m in 0..n {
        for l in 0..m {
            let v = (phi[m] * dphi[l] - dphi[m] * phi[l]) / (states[m].omega.powi(2) - states[l].omega.powi(2));
            gram[(m, l)] = v;
            gram[(l, m)] = v;
        }
    }
    PointData { phi, dphi, gram, imag }
}

/// `q_{+N}` at one point from a factorization, with the point solve and the data used.
fn insert_at(
    state: &EvolvedState,
    s: &HankelSolution,
    states: &[EmbeddedStateSpec],
    opts: &EvolvedInsertionOptions,
) -> Result<(PointData, PointSolve)> {
    let n = states.len();
    let d = point_data(state, s, states, opts.sign);
    if d.imag > opts.max_gram_imag {
        return Err(Error::InternalConsistency(format!(
            "generator data not real at x = {}: imaginary part {:.3e}",
            s.x, d.imag
        )));
    }
    let al: Vec<f64> = states.iter().map(|st| st.alpha).collect();
    let g = DMatrix::from_fn(n, n, |m, l| al[m] * al[l] * d.gram[(m, l)]);
    let v = DVector::from_iterator(n, (0..n).map(|m| al[m] * d.phi[m]));
    let dv = DVector::from_iterator(n, (0..n).map(|m| al[m] * d.dphi[m]));
    let p = solve_point(g, v, dv, s.x)?;
    Ok((d, p))
}

/// `q_{+N}(x, t)` at a single point.
pub fn q_plus_at(
    state: &EvolvedState,
    states: &[EmbeddedStateSpec],
    x: f64,
    opts: &EvolvedInsertionOptions,
) -> Result<f64> {
    check_states(state, states)?;
    let s = state.solve(x)?;
    if states.is_empty() {
        return Ok(s.q());
    }
    let (_, p) = insert_at(state, &s, states, opts)?;
    Ok(s.q() - 2.0 * p.d2log)
}

/// `q(., t)` and `q_{+N}(., t)` on `grid`.
pub fn q_plus_evolved(
    state: &EvolvedState,
    states: &[EmbeddedStateSpec],
    grid: &Grid,
    opts: &EvolvedInsertionOptions,
) -> Result<EvolvedInsertion> {
    grid.validate()?;
    check_states(state, states)?;
    let n = states.len();
    let rows: Vec<(f64, Option<(PointData, PointSolve)>)> = grid
        .points()
        .into_par_iter()
        .map(|x| {
            let s = super::hankel::solve(state.kernel(), &state.disc, x)?;
            let extra = if n == 0 { None } else { Some(insert_at(state, &s, states, opts)?) };
            Ok((s.q(), extra))
        })
        .collect::<Result<_>>()?;
    let q: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let pick = |f: &dyn Fn(&PointData, &PointSolve) -> f64| -> Vec<f64> {
        rows.iter().map(|r| r.1.as_ref().map_or(0.0, |(d, p)| f(d, p))).collect()
    };
    let per_state = |f: &dyn Fn(&PointData, &PointSolve, usize) -> f64| -> Vec<Vec<f64>> {
        (0..n).map(|m| pick(&|d, p| f(d, p, m))).collect()
    };
    let d2 = pick(&|_, p| p.d2log);
    Ok(EvolvedInsertion {
        t: state.t,
        grid: *grid,
        omegas: states.iter().map(|s| s.omega).collect(),
        alphas: states.iter().map(|s| s.alpha).collect(),
        q_plus: q.iter().zip(&d2).map(|(q, d)| q - 2.0 * d).collect(),
        q,
        phis: per_state(&|d, _, m| d.phi[m]),
        dphis: per_state(&|d, _, m| d.dphi[m]),
        ys: per_state(&|_, p, m| p.y[m]),
        dys: per_state(&|_, p, m| p.dy[m]),
        log_det: pick(&|_, p| p.log_det),
        gram_imag: pick(&|d, _| d.imag).into_iter().fold(0.0, f64::max),
    })
}

/// Outcome of the epsilon sweep of the diagonal Green's function at `k = omega + i eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceReport {
    pub t: f64,
    pub x0: f64,
    pub omega: f64,
    pub eps: Vec<f64>,
    pub g_seed: Vec<f64>,
    pub g_plus: Vec<f64>,
    pub exponent_seed: f64,
    pub exponent_plus: f64,
    pub class_seed: SweepClass,
    pub class_plus: SweepClass,
}

/// Sweeps `|g(x0, omega + i eps)|` for the evolved seed and its transform, with
/// `g = -phi psi / W(phi, psi)` built from the evolved Jost solution,
/// `phi(x, k) = psi(x, -k) + R(k) e^{8ik^3 t} psi(x, k)`, and the transformation
/// `u -> u + sum alpha_m y_m W(u, phi_m) / (k^2 - omega_m^2)`.
pub fn embedded_pole_persistence(
    state: &EvolvedState,
    ins: &EvolvedInsertion,
    state_index: usize,
    x0: f64,
) -> Result<PersistenceReport> {
    if state_index >= ins.omegas.len() {
        return Err(Error::InvalidInput("state index out of range".into()));
    }
    let i0 = ins.grid.index_of(x0).ok_or_else(|| Error::InvalidInput(format!("x0 = {x0} is not a grid node")))?;
    let x0 = ins.grid.x(i0);
    let sol = state.solve(x0)?;
    let omega = ins.omegas[state_index];
    let n = ins.omegas.len();
    let transform = |u: c64, du: c64, k: c64| -> (c64, c64) {
        let (mut v, mut dv) = (u, du);
        for m in 0..n {
            let (p, dp) = (ins.phis[m][i0], ins.dphis[m][i0]);
            let (y, dy) = (ins.ys[m][i0], ins.dys[m][i0]);
            let a = ins.alphas[m];
            let w = (u * dp - du * p) / (k * k - ins.omegas[m] * ins.omegas[m]);
            v += a * y * w;
            dv += a * (dy * w + y * u * p);
        }
        (v, dv)
    };
    let green = |f: (c64, c64), g: (c64, c64)| -> f64 {
        let w = f.0 * g.1 - f.1 * g.0;
        (-f.0 * g.0 / w).norm()
    };
    let mut g_seed = Vec::new();
    let mut g_plus = Vec::new();
    for &e in &SWEEP_EPS {
        let k = c64::new(omega, e);
        let psi = sol.jost(k);
        let psim = sol.jost(-k);
        let r = state.reflection(k);
        let phi = (psim.0 + r * psi.0, psim.1 + r * psi.1);
        g_seed.push(green(phi, psi));
        g_plus.push(green(transform(phi.0, phi.1, k), transform(psi.0, psi.1, k)));
    }
    let exponent_seed = sweep_exponent(&SWEEP_EPS, &g_seed);
    let exponent_plus = sweep_exponent(&SWEEP_EPS, &g_plus);
    Ok(PersistenceReport {
        t: state.t,
        x0,
        omega,
        eps: SWEEP_EPS.to_vec(),
        g_seed,
        g_plus,
        exponent_seed,
        exponent_plus,
        class_seed: classify_sweep(exponent_seed),
        class_plus: classify_sweep(exponent_plus),
    })
}

/// `int_{-L}^{L} (q_{+1} - q)` and `int_{-L}^{L} (q_{+1}^2 - q^2)` from the closed forms,
/// averaged over `L` in one period `[L - pi/2, L + pi/2]` of the oscillating boundary terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationReport {
    pub half_width: f64,
    pub mass_change: f64,
    pub energy_change: f64,
}

pub fn conservation_integrals(params: &ExampleParams, half_width: f64) -> Result<ConservationReport> {
    params.validate()?;
    let per = std::f64::consts::PI;
    let lmax = half_width + 0.5 * per;
    let h = 2e-3;
    let m = (lmax / h).round() as usize;
    let xs: Vec<f64> = (0..=2 * m).map(|i| -lmax + i as f64 * h).collect();
    let d1: Vec<f64> = xs.iter().map(|&x| q_plus1(params, x) - q_seed(params, x)).collect();
    let d2: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let (a, b) = (q_plus1(params, x), q_seed(params, x));
            a * a - b * b
        })
        .collect();
    // symmetric partial integrals J(L) = int_{-L}^{L}, trapezoid on the fine grid
    let sym = |f: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m + 1];
        let mut acc = f[m] * 0.0;
        for j in 1..=m {
            acc += 0.5 * h * (f[m + j - 1] + f[m + j]) + 0.5 * h * (f[m - j + 1] + f[m - j]);
            out[j] = acc;
        }
        out
    };
    let (j1, j2) = (sym(&d1), sym(&d2));
    let lo = ((half_width - 0.5 * per) / h).round() as usize;
    let avg = |j: &[f64]| -> f64 { j[lo..=m].iter().sum::<f64>() / (m - lo + 1) as f64 };
    Ok(ConservationReport { half_width, mass_change: avg(&j1), energy_change: avg(&j2) })
}
