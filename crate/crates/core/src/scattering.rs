//! Reflection and transmission coefficients, Weyl solutions, the diagonal Green's function,
//! m-functions and residue extraction at embedded poles.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::OdeTolerances;
use crate::potential::PotentialSpec;
use crate::schrodinger::{left_jost, momentum_of, right_jost};
use crate::wave::{wronskian, WaveField};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Sampled scattering data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScatteringData {
    #[serde(rename = "k")]
    pub k_grid: Vec<f64>,
    #[serde(rename = "R_re")]
    pub r_re: Vec<f64>,
    #[serde(rename = "R_im")]
    pub r_im: Vec<f64>,
    #[serde(rename = "T_re", default, skip_serializing_if = "Option::is_none")]
    pub t_re: Option<Vec<f64>>,
    #[serde(rename = "T_im", default, skip_serializing_if = "Option::is_none")]
    pub t_im: Option<Vec<f64>>,
    #[serde(rename = "L_re", default, skip_serializing_if = "Option::is_none")]
    pub l_re: Option<Vec<f64>>,
    #[serde(rename = "L_im", default, skip_serializing_if = "Option::is_none")]
    pub l_im: Option<Vec<f64>>,
    /// `(kappa_n, c_n^2)`.
    #[serde(rename = "bound")]
    pub bound_states: Vec<[f64; 2]>,
    /// `(omega_n, alpha_n^2)`.
    #[serde(rename = "embedded")]
    pub embedded_states: Vec<[f64; 2]>,
}

impl ScatteringData {
    pub fn r(&self, i: usize) -> c64 {
        c64::new(self.r_re[i], self.r_im[i])
    }

    pub fn t(&self, i: usize) -> Option<c64> {
        match (&self.t_re, &self.t_im) {
            (Some(a), Some(b)) => Some(c64::new(a[i], b[i])),
            _ => None,
        }
    }

    /// Checks the data invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.k_grid.len();
        if self.r_re.len() != n || self.r_im.len() != n {
            return Err(Error::InvalidInput("R samples do not match the k grid".into()));
        }
        if self.k_grid.windows(2).any(|w| w[1] <= w[0]) || self.k_grid.contains(&0.0) {
            return Err(Error::InvalidInput("k grid must be increasing and exclude 0".into()));
        }
        for i in 0..n {
            if self.r(i).norm() > 1.0 + 1e-8 {
                return Err(Error::InvalidInput(format!("|R| > 1 at k = {}", self.k_grid[i])));
            }
        }
        for i in 0..n {
            let k = self.k_grid[i];
            if let Some(j) = self.k_grid.iter().position(|&q| (q + k).abs() < 1e-12) {
                if (self.r(j) - self.r(i).conj()).norm() > 1e-6 {
                    return Err(Error::InvalidInput(format!("R(-k) != conj R(k) at k = {k}")));
                }
            }
        }
        if self.bound_states.windows(2).any(|w| w[1][0] >= w[0][0]) {
            return Err(Error::InvalidInput("kappa_n must be strictly decreasing".into()));
        }
        if self.embedded_states.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::InvalidInput("omega_n must be strictly increasing".into()));
        }
        if self.bound_states.iter().any(|b| b[0] <= 0.0 || b[1] <= 0.0)
            || self.embedded_states.iter().any(|b| b[0] <= 0.0 || b[1] <= 0.0)
        {
            return Err(Error::InvalidInput("state data must be positive".into()));
        }
        Ok(())
    }
}

/// Momentum grid with exclusion balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
    #[serde(default)]
    pub exclusions: Vec<f64>,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    1e-3
}

impl KGrid {
    /// Uniform points with 0 and the exclusion balls removed.
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.n < 1 || !(self.k_min <= self.k_max) || !self.k_min.is_finite() || !self.k_max.is_finite() {
            return Err(Error::InvalidInput("bad k grid".into()));
        }
        let step = if self.n > 1 { (self.k_max - self.k_min) / (self.n - 1) as f64 } else { 0.0 };
        Ok((0..self.n)
            .map(|i| self.k_min + i as f64 * step)
            .filter(|&k| k != 0.0 && self.exclusions.iter().all(|&c| (k - c).abs() > self.radius))
            .collect())
    }
}

/// `phi = conj(psi) + R psi` at real `k`.
pub fn left_weyl(spec: &PotentialSpec, k: f64, grid: &Grid, r_value: c64, tol: &OdeTolerances) -> Result<WaveField> {
    if r_value.norm() > 1.0 + 1e-8 {
        return Err(Error::InvalidInput(format!("|R| = {} exceeds 1", r_value.norm())));
    }
    let psi = right_jost(spec, c64::new(k, 0.0), grid, tol)?;
    let mut phi = psi.conj().combine(c64::new(1.0, 0.0), &psi, r_value)?;
    phi.k = c64::new(k, 0.0);
    Ok(phi)
}

/// Options for Wronskian-based scattering evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterOptions {
    pub ode: OdeTolerances,
    /// Point where Wronskians are evaluated; defaults to the middle of `[x_min, cutoff]`.
    pub wronskian_at: Option<f64>,
    /// Wronskians smaller than this (relative to the field scale) are degenerate.
    pub degenerate_tol: f64,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        ScatterOptions { ode: OdeTolerances::default(), wronskian_at: None, degenerate_tol: 1e-12 }
    }
}

fn wronskian_point(spec: &PotentialSpec, grid: &Grid, opts: &ScatterOptions) -> f64 {
    if let Some(x) = opts.wronskian_at {
        return x;
    }
    let c = spec.effective_right_cutoff().clamp(grid.x_min, grid.x_max);
    grid.x(grid.nearest(0.5 * (grid.x_min + c)))
}

struct Solutions {
    psi: WaveField,
    left: WaveField,
    scale: c64,
    x: f64,
}

fn solutions(spec: &PotentialSpec, k: c64, grid: &Grid, opts: &ScatterOptions) -> Result<Solutions> {
    let psi = right_jost(spec, k, grid, &opts.ode)?;
    let l = left_jost(spec, k, grid, &opts.ode)?;
    Ok(Solutions { psi, left: l.field, scale: l.scale, x: wronskian_point(spec, grid, opts) })
}

fn degenerate(w: c64, a: &WaveField, b: &WaveField, x: f64, tol: f64, k: c64) -> Result<()> {
    let (av, ad) = a.at(x)?;
    let (bv, bd) = b.at(x)?;
    let scale = (av.norm() + ad.norm()) * (bv.norm() + bd.norm());
    if w.norm() <= tol * scale.max(1e-300) {
        return Err(Error::DegenerateWronskian { k: format!("{k}"), modulus: w.norm() });
    }
    Ok(())
}

/// `R(k) = -W(phi_-, conj psi) / W(phi_-, psi)` from an independent left solution.
pub fn reflection_from_wronskians(spec: &PotentialSpec, k: f64, grid: &Grid, opts: &ScatterOptions) -> Result<c64> {
    if k == 0.0 {
        return Err(Error::DegenerateJost);
    }
    let kc = c64::new(k, 0.0);
    let s = solutions(spec, kc, grid, opts)?;
    let w = wronskian(&s.left, &s.psi, s.x)?;
    degenerate(w, &s.left, &s.psi, s.x, opts.degenerate_tol, kc)?;
    let wc = wronskian(&s.left, &s.psi.conj(), s.x)?;
    Ok(-wc / w)
}

/// `(R, T)` at real or complex `k` from one pair of solutions.
pub fn reflection_transmission(
    spec: &PotentialSpec,
    k: f64,
    grid: &Grid,
    opts: &ScatterOptions,
) -> Result<(c64, c64)> {
    if k == 0.0 {
        return Err(Error::DegenerateJost);
    }
    let kc = c64::new(k, 0.0);
    let s = solutions(spec, kc, grid, opts)?;
    let w = wronskian(&s.left, &s.psi, s.x)?;
    degenerate(w, &s.left, &s.psi, s.x, opts.degenerate_tol, kc)?;
    let wc = wronskian(&s.left, &s.psi.conj(), s.x)?;
    Ok((-wc / w, 2.0 * I * kc * s.scale / w))
}

/// Default grid used when an operation takes no grid: `[min(cutoff,0) - 10, max(cutoff,0) + 1]`.
pub fn default_grid(spec: &PotentialSpec) -> Grid {
    let c = spec.effective_right_cutoff();
    let c = if c.is_finite() { c } else { 0.0 };
    let lo = c.min(0.0) - 10.0;
    let hi = c.max(0.0) + 1.0;
    Grid::with_spacing(lo, hi, 0.01).expect("valid default grid")
}

/// `R` and `T` at every point of `kgrid`, evaluated in parallel; bound and embedded states are left empty.
pub fn sample_scattering(spec: &PotentialSpec, kgrid: &KGrid, grid: &Grid, opts: &ScatterOptions) -> Result<ScatteringData> {
    use rayon::prelude::*;
    let ks = kgrid.points()?;
    let rt: Vec<(c64, c64)> = ks.par_iter().map(|&k| reflection_transmission(spec, k, grid, opts)).collect::<Result<_>>()?;
    Ok(ScatteringData {
        k_grid: ks,
        r_re: rt.iter().map(|v| v.0.re).collect(),
        r_im: rt.iter().map(|v| v.0.im).collect(),
        t_re: Some(rt.iter().map(|v| v.1.re).collect()),
        t_im: Some(rt.iter().map(|v| v.1.im).collect()),
        ..Default::default()
    })
}

/// `T(k) = 2ik / W(psi_-, psi)`.
pub fn transmission(spec: &PotentialSpec, k: f64) -> Result<c64> {
    let grid = default_grid(spec);
    Ok(reflection_transmission(spec, k, &grid, &ScatterOptions::default())?.1)
}

/// `g(k^2, x) = -phi psi / (2ik) = psi_- psi / W(psi, psi_-)`.
pub fn greens_diagonal(spec: &PotentialSpec, k: c64, x: f64) -> Result<c64> {
    let base = default_grid(spec);
    let (grid, _) = base.extended(x.min(base.x_min), x.max(base.x_max));
    let opts = ScatterOptions::default();
    let s = solutions(spec, k, &grid, &opts)?;
    let w = wronskian(&s.left, &s.psi, x)?;
    degenerate(w, &s.left, &s.psi, x, opts.degenerate_tol, k)?;
    let (l, _) = s.left.at(x)?;
    let (p, _) = s.psi.at(x)?;
    Ok(-l * p / w)
}

/// Recovers `q(x)` from the diagonal Green's function at `lambda = -kappa^2`, using
/// `g ~ C (1 - q/(2 kappa^2))` with `C` calibrated on the zero potential.
pub fn q_from_greens(spec: &PotentialSpec, kappa: f64, x: f64) -> Result<f64> {
    let k = c64::new(0.0, kappa);
    let g = greens_diagonal(spec, k, x)?;
    let g0 = greens_diagonal(&PotentialSpec::zero(), k, x)?;
    Ok(2.0 * kappa * kappa * (1.0 - (g / g0).re))
}

/// Titchmarsh-Weyl m-functions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFunctionSample {
    pub lambda: c64,
    pub m_plus: c64,
    pub m_minus: c64,
    pub m_neumann: c64,
}

/// `m_± = ± Psi_±'(a) / Psi_±(a)` and `m_N = -1/m_+`.
pub fn m_functions(spec: &PotentialSpec, lambda: c64, a: f64) -> Result<MFunctionSample> {
    if !(lambda.im > 0.0) {
        return Err(Error::InvalidInput("m-functions need Im lambda > 0".into()));
    }
    let k = momentum_of(lambda);
    let base = default_grid(spec);
    let (grid, _) = base.extended(a.min(base.x_min), a.max(base.x_max));
    let opts = ScatterOptions::default();
    let psi = right_jost(spec, k, &grid, &opts.ode)?;
    let left = left_jost(spec, k, &grid, &opts.ode)?.field;
    let (pv, pd) = psi.at(a)?;
    let (lv, ld) = left.at(a)?;
    let small = |v: c64, d: c64| v.norm() <= 1e-13 * (v.norm() + d.norm() / k.norm().max(1e-300));
    if small(pv, pd) || small(lv, ld) {
        return Err(Error::PoleAtSample { a });
    }
    let m_plus = pd / pv;
    let m_minus = -ld / lv;
    Ok(MFunctionSample { lambda, m_plus, m_minus, m_neumann: -1.0 / m_plus })
}

/// Outcome of residue extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleClass {
    SimplePole,
    Regular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub field: WaveField,
    pub error_estimate: f64,
    pub class: PoleClass,
}

/// Residue bracket settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueOptions {
    pub delta0: f64,
    /// Direction of approach in the k-plane (unit complex number).
    pub direction: c64,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        ResidueOptions { delta0: 1e-2, direction: c64::new(1.0, 0.0) }
    }
}

/// `lim (k - omega) family(k)` by symmetric two-sided products and Richardson extrapolation
/// over `delta0, delta0/2, delta0/4`.
pub fn residue_at<F>(omega: c64, family: F, opts: &ResidueOptions) -> Result<Residue>
where
    F: Fn(c64) -> Result<WaveField>,
{
    let d0 = opts.delta0;
    let dir = opts.direction / opts.direction.norm();
    let mut sym: Vec<WaveField> = Vec::new();
    let mut plus: Vec<WaveField> = Vec::new();
    let mut fscale: f64 = 0.0;
    for j in 0..3 {
        let d = dir * (d0 / f64::powi(2.0, j));
        let fp = family(omega + d)?;
        let fm = family(omega - d)?;
        fscale = fscale.max(max_abs(&fp.values));
        let ap = fp.scale(d);
        let am = fm.scale(-d);
        let s = ap.combine(c64::new(0.5, 0.0), &am, c64::new(0.5, 0.0))?;
        plus.push(ap);
        sym.push(s);
    }
    // one-sided products grow like 1/delta at a higher-order pole
    let (p1, p2) = (max_abs(&plus[1].values), max_abs(&plus[2].values));
    if p2 > 0.0 && p2 > 1.5 * p1 {
        return Err(Error::HigherOrderSingularity(format!(
            "one-sided products grow like 1/delta near {omega}"
        )));
    }
    let r12 = sym[1].combine(c64::new(4.0 / 3.0, 0.0), &sym[0], c64::new(-1.0 / 3.0, 0.0))?;
    let r23 = sym[2].combine(c64::new(4.0 / 3.0, 0.0), &sym[1], c64::new(-1.0 / 3.0, 0.0))?;
    let mut field = r23.combine(c64::new(16.0 / 15.0, 0.0), &r12, c64::new(-1.0 / 15.0, 0.0))?;
    field.k = omega;
    let err = diff_max(&r23, &r12) / 15.0;
    let size = max_abs(&field.values);
    let class = if size <= 1e-8 * fscale.max(1e-300) { PoleClass::Regular } else { PoleClass::SimplePole };
    if class == PoleClass::SimplePole && err > 1e-2 * size {
        return Err(Error::HigherOrderSingularity(format!(
            "Richardson extrapolation did not settle (error {err:.2e}, size {size:.2e})"
        )));
    }
    Ok(Residue { field, error_estimate: err, class })
}

fn max_abs(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn diff_max(a: &WaveField, b: &WaveField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Exponent `p` in `|f(eps)| ~ C eps^{-p}` from a log-log least-squares fit.
pub fn sweep_exponent(eps: &[f64], values: &[f64]) -> f64 {
    let n = eps.len() as f64;
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

/// Classification of an epsilon sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepClass {
    SimplePole,
    Regular,
    Indeterminate,
}

pub fn classify_sweep(p: f64) -> SweepClass {
    if (p - 1.0).abs() < 0.2 {
        SweepClass::SimplePole
    } else if p.abs() < 0.2 {
        SweepClass::Regular
    } else {
        SweepClass::Indeterminate
    }
}

/// Default epsilon values for pole sweeps.
pub const SWEEP_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wvn_oracle::{scattering_closed, ExampleParams};

    #[test]
    fn zero_potential_scattering() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let r = reflection_from_wronskians(&PotentialSpec::zero(), 1.3, &g, &ScatterOptions::default()).unwrap();
        assert!(r.norm() < 1e-14);
        assert!((transmission(&PotentialSpec::zero(), 0.7).unwrap() - 1.0).norm() < 1e-12);
        let gd = greens_diagonal(&PotentialSpec::zero(), c64::new(1.0, 0.3), 0.4).unwrap();
        let k = c64::new(1.0, 0.3);
        assert!((gd + 1.0 / (2.0 * I * k)).norm() < 1e-9);
    }

    #[test]
    fn wvn_reflection_matches_closed_form() {
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let g = Grid::new(-20.0, 2.0, 2201).unwrap();
        for &k in &[0.5, 2.0, 1.0 + 1e-3, -2.0] {
            let r = reflection_from_wronskians(&PotentialSpec::wvn(2.0), k, &g, &ScatterOptions::default()).unwrap();
            let (_, rc, _) = scattering_closed(&p, c64::new(k, 0.0));
            assert!((r - rc).norm() < 1e-8, "k={k}: {r} vs {rc}");
        }
        let r1 = reflection_from_wronskians(&PotentialSpec::wvn(2.0), 1.0, &g, &ScatterOptions::default()).unwrap();
        assert!((r1 + 1.0).norm() < 1e-8);
        let t1 = transmission(&PotentialSpec::wvn(2.0), 1.0).unwrap();
        assert!(t1.norm() < 1e-10);
    }

    #[test]
    fn weyl_wronskian() {
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let g = Grid::new(-10.0, 1.0, 1101).unwrap();
        let (_, r, _) = scattering_closed(&p, c64::new(2.0, 0.0));
        let phi = left_weyl(&PotentialSpec::wvn(2.0), 2.0, &g, r, &OdeTolerances::default()).unwrap();
        let psi = right_jost(&PotentialSpec::wvn(2.0), c64::new(2.0, 0.0), &g, &OdeTolerances::default()).unwrap();
        let w = wronskian(&phi, &psi, -3.0).unwrap();
        assert!((w - 4.0 * I).norm() < 1e-6);
    }

    #[test]
    fn m_functions_free_and_herglotz() {
        let lam = c64::new(1.0, 0.5);
        let m = m_functions(&PotentialSpec::zero(), lam, 0.0).unwrap();
        assert!((m.m_plus - I * momentum_of(lam)).norm() < 1e-9);
        assert!((m.m_neumann + 1.0 / m.m_plus).norm() < 1e-10);
        let m = m_functions(&PotentialSpec::wvn(2.0), lam, -1.3).unwrap();
        assert!(m.m_plus.im > 0.0 && m.m_minus.im > 0.0);
    }

    #[test]
    fn residue_of_simple_and_regular_families() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let fam = |c: c64| {
            move |k: c64| {
                let v = vec![c / (k - 1.0); 5];
                WaveField::new(g, v.clone(), v, k)
            }
        };
        let r = residue_at(c64::new(1.0, 0.0), fam(c64::new(1.0, 0.0)), &ResidueOptions::default()).unwrap();
        assert_eq!(r.class, PoleClass::SimplePole);
        assert!((r.field.values[2] - 1.0).norm() < 1e-12);
        let reg = |k: c64| WaveField::new(g, vec![c64::new(1.0, 0.0); 5], vec![k; 5], k);
        let r = residue_at(c64::new(1.0, 0.0), reg, &ResidueOptions::default()).unwrap();
        assert_eq!(r.class, PoleClass::Regular);
        assert!(r.field.values.iter().all(|v| v.norm() < 1e-8));
        let dbl = |k: c64| {
            let v = vec![1.0 / ((k - 1.0) * (k - 1.0)) + 1.0 / (k - 1.0); 5];
            WaveField::new(g, v.clone(), v, k)
        };
        assert!(matches!(
            residue_at(c64::new(1.0, 0.0), dbl, &ResidueOptions::default()),
            Err(Error::HigherOrderSingularity(_))
        ));
    }

    #[test]
    fn sweep_classification() {
        let eps = SWEEP_EPS;
        let p = sweep_exponent(&eps, &eps.map(|e| 3.0 / e));
        assert_eq!(classify_sweep(p), SweepClass::SimplePole);
        let p = sweep_exponent(&eps, &eps.map(|e| 2.0 + e));
        assert_eq!(classify_sweep(p), SweepClass::Regular);
    }

    #[test]
    fn potential_from_greens_function() {
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let q = q_from_greens(&PotentialSpec::wvn(2.0), 20.0, -3.0).unwrap();
        let want = crate::wvn_oracle::q_seed(&p, -3.0);
        assert!((q - want).abs() < 0.05 * want.abs(), "{q} vs {want}");
    }

    #[test]
    fn seed_greens_function_is_bounded_at_resonance() {
        let vals: Vec<f64> = SWEEP_EPS
            .iter()
            .map(|&e| greens_diagonal(&PotentialSpec::wvn(2.0), c64::new(1.0, e), -1.3).unwrap().norm())
            .collect();
        assert_eq!(classify_sweep(sweep_exponent(&SWEEP_EPS, &vals)), SweepClass::Regular);
    }

    #[test]
    fn left_m_function_has_embedded_pole() {
        // zero of the decaying solution at energy 1, left of the origin
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let f = |x: f64| crate::wvn_oracle::phi_closed(&p, x);
        let (mut lo, mut hi) = (-4.0, -0.05);
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        let vals: Vec<f64> = SWEEP_EPS
            .iter()
            .map(|&e| m_functions(&PotentialSpec::wvn(2.0), c64::new(1.0, e), a).unwrap().m_minus.norm())
            .collect();
        let pw = sweep_exponent(&SWEEP_EPS, &vals);
        assert_eq!(classify_sweep(pw), SweepClass::SimplePole, "exponent {pw}");
    }

    #[test]
    fn json_layout() {
        let d = ScatteringData {
            k_grid: vec![0.5],
            r_re: vec![0.1],
            r_im: vec![0.2],
            bound_states: vec![[1.0, 0.5]],
            embedded_states: vec![[1.0, 1.0]],
            ..Default::default()
        };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"k":[0.5],"R_re":[0.1],"R_im":[0.2],"bound":[[1.0,0.5]],"embedded":[[1.0,1.0]]}"#);
        d.validate().unwrap();
    }
}
