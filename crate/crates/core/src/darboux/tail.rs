//! Analytic tails for integrals of slowly decaying oscillatory fields.
//!
//! Beyond the end of the working grid a field is modelled as
//! `sum_{p=1..P} sum_nu (a cos(nu s) + b sin(nu s)) / s^p`, fitted by least squares on a
//! window next to the end. Products of two models are integrated to infinity term by term,
//! using the asymptotic integration-by-parts series for the oscillatory pieces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Integral over `(-inf, x_end]`.
    Left,
    /// Integral over `[x_end, inf)`.
    Right,
}

/// Settings for the tail fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSettings {
    /// Highest inverse power `P`.
    pub orders: usize,
    /// Odd harmonics of each state momentum included in the model.
    pub harmonics: Vec<u32>,
    /// Width of the fit window.
    pub window: f64,
    /// Relative rms misfit above which the tail is declared not square integrable.
    pub max_misfit: f64,
}

impl Default for TailSettings {
    fn default() -> Self {
        TailSettings { orders: 5, harmonics: vec![1, 3, 5, 7], window: 200.0, max_misfit: 1e-4 }
    }
}

/// Fitted tail of one real field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub side: Side,
    pub x_end: f64,
    pub freqs: Vec<f64>,
    pub orders: usize,
    /// Coefficients ordered `(p, nu, cos|sin)`.
    pub coefs: Vec<f64>,
    pub misfit: f64,
}

/// Distinct model frequencies `h * omega` for the given momenta and harmonics.
pub fn model_frequencies(omegas: &[f64], harmonics: &[u32]) -> Vec<f64> {
    let mut f: Vec<f64> = omegas
        .iter()
        .flat_map(|w| harmonics.iter().map(move |&h| h as f64 * w.abs()))
        .collect();
    f.sort_by(|a, b| a.partial_cmp(b).unwrap());
    f.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    f
}

fn basis(freqs: &[f64], orders: usize, s: f64, scale: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(orders * freqs.len() * 2);
    for p in 1..=orders {
        let w = (scale / s).powi(p as i32);
        for &nu in freqs {
            row.push(w * (nu * s).cos());
            row.push(w * (nu * s).sin());
        }
    }
    row
}

impl TailFit {
    /// Fits `values` sampled at `xs` (the window) and anchors the model at `x_end`.
    pub fn fit(side: Side, x_end: f64, xs: &[f64], values: &[f64], freqs: &[f64], orders: usize) -> Result<TailFit> {
        let ncols = orders * freqs.len() * 2;
        if xs.len() < 2 * ncols || xs.contains(&0.0) {
            return Err(Error::InvalidInput("tail fit window too small or contains x = 0".into()));
        }
        let scale = x_end.abs();
        let mut a = DMatrix::<f64>::zeros(xs.len(), ncols);
        for (i, &x) in xs.iter().enumerate() {
            for (j, v) in basis(freqs, orders, x, scale).into_iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        let b = DVector::from_column_slice(values);
        let svd = a.clone().svd(true, true);
        let sol = svd
            .solve(&b, 1e-13)
            .map_err(|e| Error::InternalConsistency(format!("tail least squares failed: {e}")))?;
        let resid = &a * &sol - &b;
        let rms_data = (b.norm_squared() / xs.len() as f64).sqrt();
        let misfit = if rms_data > 0.0 { (resid.norm_squared() / xs.len() as f64).sqrt() / rms_data } else { 0.0 };
        // undo column scaling
        let mut coefs = Vec::with_capacity(ncols);
        for p in 1..=orders {
            let w = scale.powi(p as i32);
            for j in 0..freqs.len() * 2 {
                coefs.push(sol[(p - 1) * freqs.len() * 2 + j] * w);
            }
        }
        Ok(TailFit { side, x_end, freqs: freqs.to_vec(), orders, coefs, misfit })
    }

    /// Model value at `s`.
    pub fn eval(&self, s: f64) -> f64 {
        basis(&self.freqs, self.orders, s, 1.0).iter().zip(&self.coefs).map(|(b, c)| b * c).sum()
    }

    /// Terms as `(p, nu, w)` with the field equal to `sum Re(w e^{i nu s}) / s^p`.
    fn terms(&self) -> Vec<(i32, f64, c64)> {
        let mut t = Vec::new();
        let nf = self.freqs.len();
        for p in 1..=self.orders {
            for (j, &nu) in self.freqs.iter().enumerate() {
                let base = (p - 1) * nf * 2 + 2 * j;
                let (a, b) = (self.coefs[base], self.coefs[base + 1]);
                // a cos + b sin = Re((a - i b) e^{i nu s})
                t.push((p as i32, nu, c64::new(a, -b)));
            }
        }
        t
    }
}

/// `int s^{-n} e^{i mu s} ds` over the tail beyond `x` on the given side.
fn power_exp_integral(side: Side, n: i32, mu: f64, x: f64) -> Result<c64> {
    let sgn = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    if mu.abs() < 1e-12 {
        // left: x^{1-n}/(1-n); right: x^{1-n}/(n-1)
        return Ok(c64::new(sgn * x.powi(1 - n) / (1 - n) as f64, 0.0));
    }
    if (mu * x).abs() < 20.0 {
        return Err(Error::InternalConsistency(format!(
            "tail frequency {mu} too small for the asymptotic series at x = {x}"
        )));
    }
    let i = c64::new(0.0, 1.0);
    let im = i * mu;
    let mut term = (im * x).exp() / im * x.powi(-n);
    let mut sum = term;
    let mut prev = term.norm();
    for j in 0..60 {
        let r = (n + j) as f64;
        term = term * r / (im * x);
        let m = term.norm();
        if m > prev {
            break;
        }
        sum += term;
        prev = m;
        if m < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum * sgn)
}

/// `int f g` over the tail, for two fits anchored at the same point and side.
pub fn product_tail(f: &TailFit, g: &TailFit) -> Result<f64> {
    if f.side != g.side || (f.x_end - g.x_end).abs() > 1e-9 * (1.0 + f.x_end.abs()) {
        return Err(Error::InvalidInput("tail fits do not share an anchor".into()));
    }
    let x = f.x_end;
    let mut total = 0.0;
    for (p, nu, w) in f.terms() {
        for (q, mu, v) in g.terms() {
            // Re(A) Re(B) = (Re(A B) + Re(A conj B)) / 2
            let n = p + q;
            let s1 = power_exp_integral(f.side, n, nu + mu, x)?;
            let s2 = power_exp_integral(f.side, n, nu - mu, x)?;
            total += 0.5 * ((w * v * s1).re + (w * v.conj() * s2).re);
        }
    }
    Ok(total)
}

/// Fits the tails of several fields on the window adjacent to one end of a uniform grid.
pub fn fit_tails(
    side: Side,
    xs: &[f64],
    fields: &[&[f64]],
    omegas: &[f64],
    settings: &TailSettings,
) -> Result<Vec<TailFit>> {
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let wpts = ((settings.window / h).round() as usize).clamp(8, n - 1);
    let (lo, hi, x_end) = match side {
        Side::Left => (0, wpts, xs[0]),
        Side::Right => (n - 1 - wpts, n - 1, xs[n - 1]),
    };
    // subsample the window to about ten points per shortest period
    let freqs = model_frequencies(omegas, &settings.harmonics);
    let fmax = freqs.iter().cloned().fold(1.0, f64::max);
    let stride = ((std::f64::consts::TAU / fmax / 10.0 / h).floor() as usize).max(1);
    let idx: Vec<usize> = (lo..=hi).step_by(stride).collect();
    let wx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let mut out = Vec::with_capacity(fields.len());
    for f in fields {
        let wv: Vec<f64> = idx.iter().map(|&i| f[i]).collect();
        let fit = TailFit::fit(side, x_end, &wx, &wv, &freqs, settings.orders)?;
        if fit.misfit > settings.max_misfit {
            return Err(Error::TailDivergence(format!(
                "tail model misfit {:.3e} exceeds {:.1e} on the {:?} window",
                fit.misfit, settings.max_misfit, side
            )));
        }
        out.push(fit);
    }
    Ok(out)
}
