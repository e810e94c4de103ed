//! Direct integration of `-u'' + q u = k^2 u`, Jost solutions and the fundamental pair.

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::{integrate_dense, OdeTolerances};
use crate::potential::{PotentialKind, PotentialSpec};
use crate::wave::WaveField;
use crate::wvn_oracle;

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn check_k(k: c64) -> Result<()> {
    if !k.re.is_finite() || !k.im.is_finite() {
        return Err(Error::InvalidInput("k must be finite".into()));
    }
    if k.im < -1e-14 {
        return Err(Error::InvalidInput(format!("Im k must be >= 0, got {k}")));
    }
    Ok(())
}

/// Integrates from `x0` with data `init` and returns `(u, u')` at `targets`, which must be
/// monotone and on one side of `x0`. Integration restarts at every breakpoint of `spec`.
fn integrate_to_points(
    spec: &PotentialSpec,
    k: c64,
    x0: f64,
    init: (c64, c64),
    targets: &[f64],
    tol: &OdeTolerances,
) -> Result<Vec<(c64, c64)>> {
    if targets.is_empty() {
        return Ok(vec![]);
    }
    let x_end = *targets.last().unwrap();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let k2 = k * k;
    // domain check for sampled potentials
    spec.eval(x0)?;
    spec.eval(x_end)?;
    let rhs = |x: f64, y: &[f64; 4]| {
        let q = spec.eval(x).unwrap_or(f64::NAN);
        let a = q - k2.re;
        let b = -k2.im;
        [y[2], y[3], a * y[0] - b * y[1], a * y[1] + b * y[0]]
    };
    let mut cuts: Vec<f64> = spec
        .breakpoints()
        .into_iter()
        .filter(|b| (b - x0) * dir > 1e-14 && (x_end - b) * dir > 1e-14)
        .collect();
    if dir < 0.0 {
        cuts.reverse();
    }
    cuts.push(x_end);

    let mut out = Vec::with_capacity(targets.len());
    let mut state = [init.0.re, init.0.im, init.1.re, init.1.im];
    let mut x = x0;
    let mut ti = 0usize;
    for &cut in &cuts {
        let mut outs = Vec::new();
        while ti < targets.len() && (cut - targets[ti]) * dir >= -1e-14 * (1.0 + cut.abs()) {
            outs.push(targets[ti]);
            ti += 1;
        }
        let with_end = {
            let mut v = outs.clone();
            v.push(cut);
            v
        };
        let mut ys = integrate_dense(rhs, x, state, cut, &with_end, tol)?;
        let end = ys.pop().unwrap();
        for y in ys {
            out.push((c64::new(y[0], y[1]), c64::new(y[2], y[3])));
        }
        state = end;
        x = cut;
    }
    Ok(out)
}

/// Solution with data `init` at `x0`, sampled on every node of `grid` (on both sides of `x0`).
pub fn solve_on_grid(
    spec: &PotentialSpec,
    k: c64,
    x0: f64,
    init: (c64, c64),
    grid: &Grid,
    tol: &OdeTolerances,
) -> Result<WaveField> {
    check_k(k)?;
    let xs = grid.points();
    let split = xs.partition_point(|&x| x < x0);
    let left: Vec<f64> = xs[..split].iter().rev().copied().collect();
    let right: Vec<f64> = xs[split..].to_vec();
    let l = integrate_to_points(spec, k, x0, init, &left, tol)?;
    let r = integrate_to_points(spec, k, x0, init, &right, tol)?;
    let mut values = Vec::with_capacity(xs.len());
    let mut derivs = Vec::with_capacity(xs.len());
    for (v, d) in l.into_iter().rev().chain(r) {
        values.push(v);
        derivs.push(d);
    }
    WaveField::new(*grid, values, derivs, k)
}

/// Solution with data `init` at `x_from`, sampled on the nodes of `grid` between `x_from` and `x_to`.
pub fn integrate(
    spec: &PotentialSpec,
    k: c64,
    x_from: f64,
    x_to: f64,
    init: (c64, c64),
    grid: &Grid,
    tol: &OdeTolerances,
) -> Result<WaveField> {
    check_k(k)?;
    if !init.0.is_finite() || !init.1.is_finite() {
        return Err(Error::InvalidInput("initial data must be finite".into()));
    }
    let (a, b) = if x_from <= x_to { (x_from, x_to) } else { (x_to, x_from) };
    let eps = 1e-9 * grid.spacing();
    let xs = grid.points();
    let lo = xs.iter().position(|&x| x >= a - eps);
    let hi = xs.iter().rposition(|&x| x <= b + eps);
    let (lo, hi) = match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => (lo, hi),
        _ => return Err(Error::InvalidInput("integration span contains fewer than two grid nodes".into())),
    };
    let sub = grid.slice(lo, hi)?;
    solve_on_grid(spec, k, x_from, init, &sub, tol)
}

/// Right Jost solution: exactly `e^{ikx}` beyond the right cutoff, integrated leftward elsewhere.
pub fn right_jost(spec: &PotentialSpec, k: c64, grid: &Grid, tol: &OdeTolerances) -> Result<WaveField> {
    check_k(k)?;
    if k.norm() == 0.0 {
        return Err(Error::DegenerateJost);
    }
    let c = spec.effective_right_cutoff();
    if c > grid.x_max + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "right cutoff {c} lies beyond grid end {}",
            grid.x_max
        )));
    }
    let xs = grid.points();
    let split = xs.partition_point(|&x| x < c);
    let mut values = vec![c64::new(0.0, 0.0); xs.len()];
    let mut derivs = values.clone();
    for i in split..xs.len() {
        let e = (I * k * xs[i]).exp();
        values[i] = e;
        derivs[i] = I * k * e;
    }
    if split > 0 {
        let e = (I * k * c).exp();
        let left: Vec<f64> = xs[..split].iter().rev().copied().collect();
        let sol = integrate_to_points(spec, k, c, (e, I * k * e), &left, tol)?;
        for (j, (v, d)) in sol.into_iter().enumerate() {
            values[split - 1 - j] = v;
            derivs[split - 1 - j] = d;
        }
    }
    WaveField::new(*grid, values, derivs, k)
}

/// A left solution known up to a constant: `field = scale * psi_-`.
#[derive(Debug, Clone)]
pub struct LeftSolution {
    pub field: WaveField,
    pub scale: c64,
}

/// Left Jost solution `psi_- ~ e^{-ikx}` at `-inf`, from a closed form or a left support edge.
/// For the Wigner-von Neumann seed the returned field is the regularized `(k^2-1) psi_-`.
pub fn left_jost(spec: &PotentialSpec, k: c64, grid: &Grid, tol: &OdeTolerances) -> Result<LeftSolution> {
    check_k(k)?;
    let xs = grid.points();
    if let Some(rho) = spec.wvn_rho() {
        let (v, d): (Vec<c64>, Vec<c64>) =
            xs.iter().map(|&x| wvn_oracle::left_jost_regularized(rho, x, k)).unzip();
        return Ok(LeftSolution { field: WaveField::new(*grid, v, d, k)?, scale: k * k - 1.0 });
    }
    match (&spec.kind, spec.right_cutoff) {
        (PotentialKind::Soliton { kappa }, None) => {
            let (v, d): (Vec<c64>, Vec<c64>) =
                xs.iter().map(|&x| wvn_oracle::soliton_left_jost(*kappa, x, k)).unzip();
            return Ok(LeftSolution { field: WaveField::new(*grid, v, d, k)?, scale: c64::new(1.0, 0.0) });
        }
        (PotentialKind::Zero, _) => {
            let v: Vec<c64> = xs.iter().map(|&x| (-I * k * x).exp()).collect();
            let d: Vec<c64> = v.iter().map(|v| -I * k * v).collect();
            return Ok(LeftSolution { field: WaveField::new(*grid, v, d, k)?, scale: c64::new(1.0, 0.0) });
        }
        _ => {}
    }
    if let Some(a) = spec.left_support() {
        let a = a.max(grid.x_min);
        let e = (-I * k * a).exp();
        let field = solve_on_grid(spec, k, a, (e, -I * k * e), grid, tol)?;
        return Ok(LeftSolution { field, scale: c64::new(1.0, 0.0) });
    }
    Err(Error::InvalidInput("no left Jost solution available for this potential".into()))
}

/// Upper-half-plane square root of `lambda`.
pub fn momentum_of(lambda: c64) -> c64 {
    let k = lambda.sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// `c(0) = 1, c'(0) = 0` and `s(0) = 0, s'(0) = 1` at energy `lambda`.
pub fn fundamental_pair(
    spec: &PotentialSpec,
    lambda: c64,
    grid: &Grid,
    tol: &OdeTolerances,
) -> Result<(WaveField, WaveField)> {
    if !grid.contains(0.0) {
        return Err(Error::InvalidInput("grid must contain x = 0".into()));
    }
    let k = momentum_of(lambda);
    let one = c64::new(1.0, 0.0);
    let zero = c64::new(0.0, 0.0);
    let c = solve_on_grid(spec, k, 0.0, (one, zero), grid, tol)?;
    let s = solve_on_grid(spec, k, 0.0, (zero, one), grid, tol)?;
    Ok((c, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::wronskian;
    use crate::wvn_oracle::ExampleParams;

    fn tol() -> OdeTolerances {
        OdeTolerances::default()
    }

    #[test]
    fn plane_wave_to_pi() {
        let g = Grid::new(0.0, std::f64::consts::PI, 101).unwrap();
        let f = integrate(&PotentialSpec::zero(), c64::new(1.0, 0.0), 0.0, std::f64::consts::PI, (c64::new(1.0, 0.0), I), &g, &tol()).unwrap();
        let n = g.n_points - 1;
        assert!((f.values[n] + 1.0).norm() < 1e-9);
        assert!((f.derivs[n] + I).norm() < 1e-9);
    }

    #[test]
    fn decaying_exponential() {
        let g = Grid::new(0.0, 5.0, 51).unwrap();
        let f = integrate(&PotentialSpec::zero(), I, 0.0, 5.0, (c64::new(1.0, 0.0), c64::new(-1.0, 0.0)), &g, &tol()).unwrap();
        assert!((f.values[50] - (-5f64).exp()).norm() < 1e-11);
    }

    #[test]
    fn zero_potential_jost_is_exact() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let f = right_jost(&PotentialSpec::zero(), c64::new(2.0, 0.0), &g, &tol()).unwrap();
        for (i, x) in g.points().iter().enumerate() {
            assert_eq!(f.values[i], (I * 2.0 * x).exp());
        }
    }

    #[test]
    fn k_zero_rejected() {
        let g = Grid::new(-1.0, 1.0, 11).unwrap();
        assert_eq!(right_jost(&PotentialSpec::zero(), c64::new(0.0, 0.0), &g, &tol()), Err(Error::DegenerateJost));
    }

    #[test]
    fn wvn_jost_matches_closed_form() {
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let g = Grid::new(-20.0, 2.0, 2201).unwrap();
        for &k in &[1.0, 1.5, 0.3] {
            let f = right_jost(&PotentialSpec::wvn(2.0), c64::new(k, 0.0), &g, &tol()).unwrap();
            let mut worst: f64 = 0.0;
            for (i, &x) in g.points().iter().enumerate() {
                let e = wvn_oracle::psi_plus_closed(&p, x, k).unwrap();
                worst = worst.max((f.values[i] - e).norm());
                if x >= 0.0 {
                    assert_eq!(f.values[i], (I * k * x).exp());
                }
            }
            assert!(worst < 1e-6, "k={k}: {worst}");
        }
    }

    #[test]
    fn left_closed_form_matches_ode() {
        let p = ExampleParams { rho: 2.0, alpha: 1.0 };
        let k = c64::new(2.0, 0.0);
        let g = Grid::new(-10.0, 0.0, 1001).unwrap();
        let x0 = -10.0;
        let (v, d) = wvn_oracle::left_jost_regularized(2.0, x0, k);
        let f = integrate(&PotentialSpec::wvn(2.0), k, x0, 0.0, (v, d), &g, &tol()).unwrap();
        let i = g.index_of(-1.0).unwrap();
        let e = wvn_oracle::left_jost_closed(&p, -1.0, k).unwrap() * (k * k - 1.0);
        assert!((f.values[i] - e).norm() < 1e-8);
    }

    #[test]
    fn fundamental_pair_wronskian() {
        let g = Grid::new(-10.0, 10.0, 401).unwrap();
        let (c, s) = fundamental_pair(&PotentialSpec::wvn(2.0), c64::new(1.0, 0.0), &g, &tol()).unwrap();
        for x in [-9.5, -3.0, 0.0, 4.2] {
            assert!((wronskian(&c, &s, x).unwrap() - 1.0).norm() < 1e-8);
        }
        assert!(c.values.iter().all(|v| v.im.abs() < 1e-14));
    }
}
