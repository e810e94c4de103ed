//! Nystrom solution of `k(u) + F(2x + u) + int_0^U k(v) F(2x + u + v) dv = 0` for the
//! kernel `K(x, x + u) = k(u)` of the right Jost solution
//! `psi(x, k) = e^{ikx} (1 + int_0^U k(u) e^{iku} du)`.
//!
//! The bound-state part `F_b = c^2 e^{-kappa s}` is rank one in `(u, v)` and is handled by
//! the Sherman-Morrison identity in a form that stays finite when `c^2 e^{-2 kappa x}` is huge.
//! At `t = 0` the continuous part has a second-derivative jump on the anti-diagonal
//! `u + v = -2x`; rows are then integrated with split product rules.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, TableSettings};
use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss, gauss_legendre};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Discretization of the Hankel operator and of the contour integral for its symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelDiscretization {
    /// Height `b` of the symbol contour `Im z = b`; must lie above the pole `i kappa`.
    pub contour_height: f64,
    /// Half-length `S` of the truncated symbol contour.
    pub contour_truncation: f64,
    /// Gauss nodes per unit length on the symbol contour.
    pub contour_density: usize,
    /// Panel width of the composite Gauss rule for the operator variable.
    pub panel_width: f64,
    /// Gauss nodes per panel.
    pub order: usize,
    pub table: TableSettings,
}

impl Default for HankelDiscretization {
    fn default() -> Self {
        HankelDiscretization {
            contour_height: 0.0,
            contour_truncation: 40.0,
            contour_density: 16,
            panel_width: 0.5,
            order: 10,
            table: TableSettings::default(),
        }
    }
}

impl HankelDiscretization {
    /// Same settings with operator panels and table spacing halved.
    pub fn refined(&self) -> Self {
        let mut d = *self;
        d.panel_width *= 0.5;
        d.table.ds *= 0.5;
        d.table.log2_n += 1;
        d
    }

    /// Operator size for a truncation length `u`.
    pub fn op_size(&self, u: f64) -> usize {
        if u <= 0.0 {
            return 0;
        }
        (u / self.panel_width).ceil().max(1.0) as usize * self.order
    }

    pub fn validate(&self, kappa: Option<f64>) -> Result<()> {
        let ok = self.panel_width > 0.0
            && self.panel_width.is_finite()
            && self.order >= 2
            && self.contour_truncation > 0.0
            && self.contour_density >= 1
            && self.table.ds > 0.0;
        if !ok {
            return Err(Error::InvalidInput("invalid Hankel discretization".into()));
        }
        if let Some(k) = kappa {
            if self.contour_height != 0.0 && self.contour_height <= k {
                return Err(Error::InvalidInput(format!(
                    "contour height {} must lie above the imaginary pole at {k}",
                    self.contour_height
                )));
            }
        }
        Ok(())
    }
}

/// Solution at one `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelSolution {
    pub x: f64,
    /// `log det(I + F_x)`.
    pub log_det: f64,
    /// `K(x, x)`.
    pub k0: f64,
    /// `d/dx K(x, x)`.
    pub dk0: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `K(x, x + u_j)` and its `x`-derivative at fixed `u`.
    pub kv: Vec<f64>,
    pub dkv: Vec<f64>,
}

impl HankelSolution {
    fn trivial(x: f64) -> Self {
        HankelSolution { x, log_det: 0.0, k0: 0.0, dk0: 0.0, nodes: vec![], weights: vec![], kv: vec![], dkv: vec![] }
    }

    /// `q(x) = -2 d/dx K(x, x)`.
    pub fn q(&self) -> f64 {
        -2.0 * self.dk0
    }

    /// `(psi, psi')` at momentum `k`.
    pub fn jost(&self, k: c64) -> (c64, c64) {
        let e = (I * k * self.x).exp();
        let mut s = c64::new(1.0, 0.0);
        let mut ds = c64::new(0.0, 0.0);
        for j in 0..self.nodes.len() {
            let p = self.weights[j] * (I * k * self.nodes[j]).exp();
            s += p * self.kv[j];
            ds += p * self.dkv[j];
        }
        (e * s, I * k * e * s + e * ds)
    }

    /// `(d psi/dk, d psi'/dk)` at momentum `k`.
    pub fn jost_dk(&self, k: c64) -> (c64, c64) {
        let e = (I * k * self.x).exp();
        let (mut s, mut d, mut sk, mut dk) = (c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0));
        for j in 0..self.nodes.len() {
            let p = self.weights[j] * (I * k * self.nodes[j]).exp();
            let pu = I * self.nodes[j] * p;
            s += p * self.kv[j];
            d += p * self.dkv[j];
            sk += pu * self.kv[j];
            dk += pu * self.dkv[j];
        }
        let ix = I * self.x;
        (e * (ix * s + sk), e * (ix * (I * k * s + d) + I * s + I * k * sk + dk))
    }
}

fn lagrange_basis(nodes: &[f64], v: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            let mut l = 1.0;
            for (m, xm) in nodes.iter().enumerate() {
                if m != j {
                    l *= (v - xm) / (nodes[j] - xm);
                }
            }
            l
        })
        .collect()
}

fn permutation_sign(fwd: &[usize]) -> f64 {
    let mut seen = vec![false; fwd.len()];
    let mut sign = 1.0;
    for i in 0..fwd.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = fwd[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Solves the Nystrom system at `x`.
pub fn solve(kernel: &Kernel, disc: &HankelDiscretization, x: f64) -> Result<HankelSolution> {
    let u_len = kernel.support_end() - 2.0 * x;
    if !(u_len > 0.0) {
        return Ok(HankelSolution::trivial(x));
    }
    let order = disc.order;
    let panels = disc.op_size(u_len) / order;
    let (nodes, weights) = composite_gauss(0.0, u_len, panels, order);
    let n = nodes.len();
    let hp = u_len / panels as f64;
    let (gx, gw) = gauss_legendre(order);
    let kink = kernel.has_kink();

    // rows of P and P' (kernel derivative in s, without the chain factor 2)
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut p = vec![0.0; n];
            let mut dp = vec![0.0; n];
            for j in 0..n {
                let (f, df) = kernel.fc(2.0 * x + nodes[i] + nodes[j]);
                p[j] = weights[j] * f;
                dp[j] = weights[j] * df;
            }
            if kink {
                let vs = u_len - nodes[i];
                let pan = ((vs / hp).floor() as usize).min(panels - 1);
                let (a, b) = (pan as f64 * hp, (pan + 1) as f64 * hp);
                if vs > a + 1e-12 * hp && vs < b - 1e-12 * hp {
                    let pn = &nodes[pan * order..(pan + 1) * order];
                    for j in 0..order {
                        p[pan * order + j] = 0.0;
                        dp[pan * order + j] = 0.0;
                    }
                    for (lo, hi) in [(a, vs), (vs, b)] {
                        for (xi, wi) in gx.iter().zip(&gw) {
                            let v = lo + 0.5 * (hi - lo) * (xi + 1.0);
                            let w = 0.5 * (hi - lo) * wi;
                            let (f, df) = kernel.fc(2.0 * x + nodes[i] + v);
                            for (j, l) in lagrange_basis(pn, v).into_iter().enumerate() {
                                p[pan * order + j] += w * f * l;
                                dp[pan * order + j] += w * df * l;
                            }
                        }
                    }
                }
            }
            (p, dp)
        })
        .collect();
    let a = Mat::<f64>::from_fn(n, n, |i, j| rows[i].0[j] + if i == j { 1.0 } else { 0.0 });
    let ap = Mat::<f64>::from_fn(n, n, |i, j| 2.0 * rows[i].1[j]);
    let fvals: Vec<(f64, f64)> = nodes.iter().map(|u| kernel.fc(2.0 * x + u)).collect();
    let (kappa, c2) = kernel.bound().unwrap_or((1.0, 0.0));
    let e: Vec<f64> = nodes.iter().map(|u| (-kappa * u).exp()).collect();
    let m: Vec<f64> = (0..n).map(|j| weights[j] * e[j]).collect();

    let lu = a.partial_piv_lu();
    let mut ld = 0.0;
    let mut sign = permutation_sign(lu.P().arrays().0);
    let u = lu.U();
    for i in 0..n {
        let d = u[(i, i)];
        ld += d.abs().ln();
        sign *= d.signum();
    }
    if !(sign > 0.0) || !ld.is_finite() {
        return Err(Error::Discretization(format!(
            "det(I + F_x) is not positive at x = {x} with {n} nodes; refine the panels"
        )));
    }
    let rhs = Mat::<f64>::from_fn(n, 2, |i, c| if c == 0 { fvals[i].0 } else { e[i] });
    let sol = lu.solve(&rhs);
    let apsol = &ap * &sol;
    let rhs2 = Mat::<f64>::from_fn(n, 2, |i, c| if c == 0 { 2.0 * fvals[i].1 - apsol[(i, 0)] } else { -apsol[(i, 1)] });
    let sol2 = lu.solve(&rhs2);
    let col = |mat: &Mat<f64>, c: usize| -> Vec<f64> { (0..n).map(|i| mat[(i, c)]).collect() };
    let (g, av, dg, da) = (col(&sol, 0), col(&sol, 1), col(&sol2, 0), col(&sol2, 1));
    if g.iter().chain(&av).chain(&dg).chain(&da).any(|v| !v.is_finite()) {
        return Err(Error::Discretization(format!("singular Nystrom matrix at x = {x}")));
    }
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };

    let (kv, dkv, beta, dbeta, log_det) = if c2 > 0.0 {
        // lam = c2 e^{-2 kappa x}; work with 1/lam to stay finite
        let inv_lam = (2.0 * kappa * x).exp() / c2;
        let s = dot(&m, &av);
        let ds = dot(&m, &da);
        let mg = dot(&m, &g);
        let dmg = dot(&m, &dg);
        let den = inv_lam + s;
        if !(den > 0.0) {
            return Err(Error::Discretization(format!("bound-state factor is not positive at x = {x}")));
        }
        let beta = (1.0 - mg) / den;
        let dbeta = (-dmg * den - (1.0 - mg) * (2.0 * kappa * inv_lam + ds)) / (den * den);
        let kv: Vec<f64> = (0..n).map(|j| -g[j] - av[j] * beta).collect();
        let dkv: Vec<f64> = (0..n).map(|j| -dg[j] - da[j] * beta - av[j] * dbeta).collect();
        let extra = if inv_lam > 1.0 { (s / inv_lam).ln_1p() } else { den.ln() - inv_lam.ln() };
        (kv, dkv, beta, dbeta, ld + extra)
    } else {
        (g.iter().map(|v| -v).collect(), dg.iter().map(|v| -v).collect(), 0.0, 0.0, ld)
    };
    let (f0, df0) = kernel.fc(2.0 * x);
    let mut k0 = -f0 - beta;
    let mut dk0 = -2.0 * df0 - dbeta;
    for j in 0..n {
        let (fj, dfj) = fvals[j];
        k0 -= weights[j] * fj * kv[j];
        dk0 -= weights[j] * (2.0 * dfj * kv[j] + fj * dkv[j]);
    }
    Ok(HankelSolution {
        x,
        log_det,
        k0,
        dk0,
        nodes,
        weights,
        kv,
        dkv,
    })
}
