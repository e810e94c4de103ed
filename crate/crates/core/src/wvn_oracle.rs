//! Closed forms for the Wigner-von Neumann seed `q = -2 (log tau)''` with
//! `tau(x) = 1 + rho|x| - (rho/2) sin 2|x|` on `x < 0` and `q = 0` on `x >= 0`,
//! its one-state Darboux transform, and the positon / soliton KdV profiles.
//!
//! Every derivative is differentiated by hand; nothing here differences numerically.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Seed strength `rho > 0` and norming constant `alpha != 0` of the inserted state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub rho: f64,
    pub alpha: f64,
}

impl ExampleParams {
    pub fn new(rho: f64, alpha: f64) -> Result<Self> {
        let p = ExampleParams { rho, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.alpha != 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must be nonzero, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `alpha` for which the transformed potential is even: `rho = 2 alpha^2`.
    pub fn symmetric(rho: f64) -> Self {
        ExampleParams { rho, alpha: (rho / 2.0).sqrt() }
    }
}

/// `tau`, `tau'`, `tau''` at `x`.
pub fn tau_derivs(rho: f64, x: f64) -> (f64, f64, f64) {
    let a = x.abs();
    let t = 1.0 + rho * a - 0.5 * rho * (2.0 * a).sin();
    let s = x.signum();
    let d1 = 2.0 * rho * x.sin().powi(2) * if x == 0.0 { 0.0 } else { s };
    let d2 = 2.0 * rho * (2.0 * a).sin();
    (t, d1, d2)
}

pub fn tau(params: &ExampleParams, x: f64) -> f64 {
    tau_derivs(params.rho, x).0
}

/// `-2 (log f)''` from `f, f', f''`.
fn minus_two_log_dd(f: f64, d1: f64, d2: f64) -> f64 {
    -2.0 * (d2 / f - (d1 / f) * (d1 / f))
}

/// Seed potential for strength `rho`.
pub fn q_seed_rho(rho: f64, x: f64) -> f64 {
    if x >= 0.0 {
        return 0.0;
    }
    let (t, d1, d2) = tau_derivs(rho, x);
    minus_two_log_dd(t, d1, d2)
}

pub fn q_seed(params: &ExampleParams, x: f64) -> f64 {
    q_seed_rho(params.rho, x)
}

/// `-2 d^2/dx^2 log(1 + c^{±1} tau(x))` for `±x > 0`, `c = rho / (2 alpha^2)`.
pub fn q_plus1(params: &ExampleParams, x: f64) -> f64 {
    let c = params.rho / (2.0 * params.alpha * params.alpha);
    let m = if x < 0.0 { c } else { 1.0 / c };
    let (t, d1, d2) = tau_derivs(params.rho, x);
    minus_two_log_dd(1.0 + m * t, m * d1, m * d2)
}

/// Even transform `-2 d^2/dx^2 log(1 + rho * int_0^{|x|} sin^2)`.
pub fn q_sym(rho: f64, x: f64) -> f64 {
    let (t, d1, d2) = tau_derivs(0.5 * rho, x);
    minus_two_log_dd(t, d1, d2)
}

/// `P(k) = k^3 - k`.
pub fn p_poly(k: c64) -> c64 {
    k * k * k - k
}

/// `(T, R, L)` with `T = P/(P + i rho)` and `R = L = -i rho/(P + i rho)`.
pub fn scattering_closed(params: &ExampleParams, k: c64) -> (c64, c64, c64) {
    let p = p_poly(k);
    let d = p + I * params.rho;
    let t = p / d;
    let r = -I * params.rho / d;
    (t, r, r)
}

/// Real root `y0` of `y^3 + y = rho`; the seed has the bound state `k = i y0`.
pub fn bound_state_kappa(rho: f64) -> f64 {
    let mut y = rho.cbrt().min(rho);
    for _ in 0..100 {
        let f = y * y * y + y - rho;
        let d = 3.0 * y * y + 1.0;
        let dy = f / d;
        y -= dy;
        if dy.abs() < 1e-16 * (1.0 + y) {
            break;
        }
    }
    y
}

/// Bound state `(kappa, c^2)` of the seed, with `c^2 = rho / (3 kappa^2 + 1)`.
pub fn bound_state(params: &ExampleParams) -> (f64, f64) {
    let kappa = bound_state_kappa(params.rho);
    (kappa, params.rho / (3.0 * kappa * kappa + 1.0))
}

/// Poles of `R` in the lower half plane: roots of `z^3 - z + i rho` other than `i kappa`.
pub fn lower_poles(rho: f64) -> [c64; 2] {
    let y = bound_state_kappa(rho);
    let s = (4.0 + 3.0 * y * y).sqrt();
    [c64::new(0.5 * s, -0.5 * y), c64::new(-0.5 * s, -0.5 * y)]
}

/// `phi0 = sin x / tau` on `x < 0` and its derivative.
pub fn phi0(rho: f64, x: f64) -> (f64, f64) {
    let (t, d1, _) = tau_derivs(rho, x);
    let s = x.sin();
    (s / t, x.cos() / t - s * d1 / (t * t))
}

/// Left Jost solution on `x <= 0`.
pub fn left_jost_closed(params: &ExampleParams, x: f64, k: c64) -> Result<c64> {
    if x > 0.0 {
        return Err(Error::InvalidInput("left_jost_closed is the x <= 0 branch".into()));
    }
    if (k - 1.0).norm() < 1e-14 || (k + 1.0).norm() < 1e-14 {
        return Err(Error::PoleEvaluation { k: format!("{k}") });
    }
    let (f, _) = phi0(params.rho, x);
    let rf = params.rho * f;
    Ok((-I * k * x).exp()
        - ((-I * (k + 1.0) * x).exp() / (k + 1.0) - (-I * (k - 1.0) * x).exp() / (k - 1.0)) * rf)
}

/// `(k^2 - 1) psi_-(x, k)` and its x-derivative for any real `x`; analytic in `k`.
/// For `x > 0` the solution is continued as a plane-wave combination.
pub fn left_jost_regularized(rho: f64, x: f64, k: c64) -> (c64, c64) {
    if x > 0.0 {
        let (v0, d0) = left_jost_regularized(rho, 0.0, k);
        return plane_wave_continue(v0, d0, k, x);
    }
    let (f, df) = phi0(rho, x);
    let e0 = (-I * k * x).exp();
    let ep = (-I * (k + 1.0) * x).exp();
    let em = (-I * (k - 1.0) * x).exp();
    let km = k - 1.0;
    let kp = k + 1.0;
    let bracket = km * ep - kp * em;
    let dbracket = -I * kp * km * ep + I * km * kp * em;
    let v = (k * k - 1.0) * e0 - bracket * rho * f;
    let d = -I * k * (k * k - 1.0) * e0 - dbracket * rho * f - bracket * rho * df;
    (v, d)
}

/// Solution of `-u'' = k^2 u` with data `(v0, d0)` at 0, evaluated at `x`.
pub fn plane_wave_continue(v0: c64, d0: c64, k: c64, x: f64) -> (c64, c64) {
    let kx = k * x;
    let (c, s) = (kx.cos(), kx.sin());
    if k.norm() < 1e-300 {
        return (v0 + d0 * x, d0);
    }
    (v0 * c + d0 * s / k, -v0 * k * s + d0 * c)
}

/// Right Jost solution at real `k` from the scattering relation
/// `psi = conj(psi_-) + (2 rho / P) Im psi_-` on `x < 0`, with the limits at `k = ±1`.
pub fn psi_plus_closed(params: &ExampleParams, x: f64, k: f64) -> Result<c64> {
    if k == 0.0 {
        return Err(Error::DegenerateJost);
    }
    if x >= 0.0 {
        return Ok((I * k * x).exp());
    }
    let rho = params.rho;
    if (k.abs() - 1.0).abs() < 1e-12 {
        let v = psi_plus_at_one(rho, x);
        return Ok(if k > 0.0 { v } else { v.conj() });
    }
    let m = left_jost_closed(params, x, c64::new(k, 0.0))?;
    let p = k * k * k - k;
    Ok(m.conj() + 2.0 * rho / p * m.im)
}

fn psi_plus_at_one(rho: f64, x: f64) -> c64 {
    let (f, _) = phi0(rho, x);
    let j1 = -f;
    let dj1 = -x * x.cos() + rho * f * (2.0 * x * (2.0 * x).cos() - (2.0 * x).sin()) / 4.0;
    let re = x.cos() - rho * f * (2.0 * x).cos() / 2.0 + rho * dj1 + 1.5 * rho * f;
    c64::new(re, -j1)
}

/// Eigen-generator `phi(s)`: `2 sin s` for `s >= 0` and `2 sin s / tau(s)` for `s < 0`; with derivative.
pub fn phi_closed_derivs(params: &ExampleParams, s: f64) -> (f64, f64) {
    if s >= 0.0 {
        (2.0 * s.sin(), 2.0 * s.cos())
    } else {
        let (f, df) = phi0(params.rho, s);
        (2.0 * f, 2.0 * df)
    }
}

pub fn phi_closed(params: &ExampleParams, s: f64) -> f64 {
    phi_closed_derivs(params, s).0
}

/// `I(x) = int_{-inf}^x phi^2`: `2/(rho tau)` for `x < 0`, `(2/rho) tau` for `x >= 0`.
pub fn i_closed(params: &ExampleParams, x: f64) -> f64 {
    let t = tau(params, x);
    if x < 0.0 {
        2.0 / (params.rho * t)
    } else {
        2.0 / params.rho * t
    }
}

/// Normalized eigenfunction `y = alpha phi / (1 + alpha^2 I)` and its derivative.
pub fn y_closed_derivs(params: &ExampleParams, x: f64) -> (f64, f64) {
    let a = params.alpha;
    let (f, df) = phi_closed_derivs(params, x);
    let d = 1.0 + a * a * i_closed(params, x);
    (a * f / d, a * df / d - a * a * a * f * f * f / (d * d))
}

pub fn y_closed(params: &ExampleParams, x: f64) -> f64 {
    y_closed_derivs(params, x).0
}

/// Transformed right Jost solution on `x >= 0` with its x-derivative.
pub fn psi_plus1_closed_derivs(params: &ExampleParams, x: f64, k: c64) -> Result<(c64, c64)> {
    if x < 0.0 {
        return Err(Error::InvalidInput("psi_plus1_closed is the x >= 0 branch".into()));
    }
    if (k - 1.0).norm() < 1e-14 || (k + 1.0).norm() < 1e-14 {
        return Err(Error::PoleEvaluation { k: format!("{k}") });
    }
    let a2 = params.alpha * params.alpha;
    let (f, df) = phi_closed_derivs(params, x);
    let d = 1.0 + a2 * i_closed(params, x);
    let h = a2 * f / d;
    let dh = a2 * df / d - a2 * a2 * f * f * f / (d * d);
    let ep = (I * x).exp();
    let em = (-I * x).exp();
    let b = ep / (k + 1.0) - em / (k - 1.0);
    let db = I * ep / (k + 1.0) + I * em / (k - 1.0);
    let e = (I * k * x).exp();
    let psi = e * (1.0 + b * h);
    let dpsi = I * k * psi + e * (db * h + b * dh);
    Ok((psi, dpsi))
}

pub fn psi_plus1_closed(params: &ExampleParams, x: f64, k: c64) -> Result<c64> {
    Ok(psi_plus1_closed_derivs(params, x, k)?.0)
}

/// Bounded positon `-2 d^2/dx^2 log(1 + x + 12t - sin(2(x + 4t))/2)`.
pub fn positon_closed(x: f64, t: f64) -> Result<f64> {
    let th = x + 4.0 * t;
    let f = 1.0 + x + 12.0 * t - 0.5 * (2.0 * th).sin();
    if f.abs() < 1e-14 {
        return Err(Error::Singular { x, t });
    }
    let d1 = 1.0 - (2.0 * th).cos();
    let d2 = 2.0 * (2.0 * th).sin();
    Ok(minus_two_log_dd(f, d1, d2))
}

/// Location of the double pole of `positon_closed` at time `t`.
pub fn positon_singularity(t: f64) -> f64 {
    let f = |x: f64| 1.0 + x + 12.0 * t - 0.5 * (2.0 * (x + 4.0 * t)).sin();
    let (mut lo, mut hi) = (-3.0 - 12.0 * t, 1.0 - 12.0 * t);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-soliton `-2 d^2/dx^2 log cosh(x - 4t) = -2 sech^2(x - 4t)`.
pub fn soliton_closed(x: f64, t: f64) -> f64 {
    let c = (x - 4.0 * t).cosh();
    -2.0 / (c * c)
}

/// Right Jost solution of the reflectionless well `-2 kappa^2 sech^2(kappa x)` with derivative.
pub fn soliton_right_jost(kappa: f64, x: f64, k: c64) -> (c64, c64) {
    let th = (kappa * x).tanh();
    let e = (I * k * x).exp();
    let d = k + I * kappa;
    let psi = e * (k + I * kappa * th) / d;
    let sech2 = 1.0 - th * th;
    let dpsi = I * k * psi + e * I * kappa * kappa * sech2 / d;
    (psi, dpsi)
}

/// Left Jost solution of the same well with derivative.
pub fn soliton_left_jost(kappa: f64, x: f64, k: c64) -> (c64, c64) {
    let th = (kappa * x).tanh();
    let e = (-I * k * x).exp();
    let d = k + I * kappa;
    let psi = e * (k - I * kappa * th) / d;
    let sech2 = 1.0 - th * th;
    let dpsi = -I * k * psi - e * I * kappa * kappa * sech2 / d;
    (psi, dpsi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P2: ExampleParams = ExampleParams { rho: 2.0, alpha: 1.0 };

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&P2, 0.0), 1.0);
        assert!((tau(&P2, std::f64::consts::PI) - (1.0 + 2.0 * std::f64::consts::PI)).abs() < 1e-14);
        for &x in &[0.3, 1.7, 12.0] {
            assert_eq!(tau(&P2, x), tau(&P2, -x));
        }
    }

    #[test]
    fn seed_vanishes_on_right_and_decays_like_wvn() {
        assert_eq!(q_seed(&P2, 5.0), 0.0);
        let mut last = f64::INFINITY;
        for &x in &[-50.0f64, -200.0, -1000.0] {
            let d = (q_seed(&P2, x) + 4.0 * (2.0 * x).sin() / x).abs();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn q_seed_matches_finite_difference_of_log_tau() {
        let h = 1e-4;
        for &x in &[-0.7, -3.1, -9.4] {
            let l = |x: f64| tau(&P2, x).ln();
            let fd = -2.0 * (l(x + h) - 2.0 * l(x) + l(x - h)) / (h * h);
            assert!((fd - q_seed(&P2, x)).abs() < 1e-5);
        }
    }

    #[test]
    fn symmetric_case_is_even_and_matches_q_sym() {
        let p = ExampleParams::symmetric(2.0);
        for &x in &[-7.3, -1.1, 0.4, 3.3] {
            assert!((q_plus1(&p, x) - q_sym(2.0, x)).abs() < 1e-13);
            assert!((q_plus1(&p, x) - q_plus1(&p, -x)).abs() < 1e-13);
        }
    }

    #[test]
    fn q_plus1_shares_wvn_asymptotics() {
        for &x in &[-100.0f64, 100.0] {
            assert!((q_plus1(&P2, x) + 4.0 * (2.0 * x).sin() / x).abs() < 5e-2);
        }
    }

    #[test]
    fn scattering_identities() {
        let (t, r, _) = scattering_closed(&P2, c64::new(1.0, 0.0));
        assert!(t.norm() < 1e-15);
        assert!((r + 1.0).norm() < 1e-15);
        let (_, r0, _) = scattering_closed(&P2, c64::new(0.0, 0.0));
        assert!((r0 + 1.0).norm() < 1e-15);
        for &k in &[0.2, 0.9, 1.3, 2.7] {
            let (t, r, _) = scattering_closed(&P2, c64::new(k, 0.0));
            assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bound_state_is_pole_of_transmission() {
        for &rho in &[0.5, 2.0, 7.0] {
            let y = bound_state_kappa(rho);
            assert!((y * y * y + y - rho).abs() < 1e-13);
            let z = c64::new(0.0, y);
            assert!((p_poly(z) + I * rho).norm() < 1e-12);
            for p in lower_poles(rho) {
                assert!((p_poly(p) + I * rho).norm() < 1e-12);
                assert!(p.im < 0.0);
            }
        }
        assert!((bound_state_kappa(2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn left_jost_limits() {
        let (v, _) = left_jost_regularized(2.0, 0.0, c64::new(2.0, 0.0));
        assert!((v - 3.0).norm() < 1e-14);
        // Im psi_-(s, 1) = -phi0(s)
        for &s in &[-0.5, -4.0] {
            let k = c64::new(1.0 + 1e-7, 0.0);
            let v = left_jost_closed(&P2, s, k).unwrap();
            assert!((v.im + phi0(2.0, s).0).abs() < 1e-6);
        }
        assert!(left_jost_closed(&P2, -1.0, c64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn regularized_left_jost_matches_plain_form() {
        let k = c64::new(1.7, 0.2);
        for &x in &[-3.0, -0.2] {
            let a = left_jost_closed(&P2, x, k).unwrap() * (k * k - 1.0);
            let (b, _) = left_jost_regularized(2.0, x, k);
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn psi_plus_limit_is_continuous() {
        for &x in &[-0.3, -2.0, -9.0] {
            let at = psi_plus_closed(&P2, x, 1.0).unwrap();
            let avg = |d: f64| {
                0.5 * (psi_plus_closed(&P2, x, 1.0 + d).unwrap() + psi_plus_closed(&P2, x, 1.0 - d).unwrap())
            };
            let near = (4.0 * avg(5e-4) - avg(1e-3)) / 3.0;
            assert!((at - near).norm() < 1e-6, "x={x}: {at} vs {near}");
            assert!((at.im - phi0(2.0, x).0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenfunction_closed_forms() {
        assert_eq!(y_closed(&P2, 0.0), 0.0);
        for &rho in &[0.5, 2.0] {
            let p = ExampleParams { rho, alpha: 1.0 };
            assert!((i_closed(&p, -1e-15) - 2.0 / rho).abs() < 1e-12);
            assert!((i_closed(&p, 0.0) - 2.0 / rho).abs() < 1e-12);
        }
    }

    #[test]
    fn transformed_jost_wronskian() {
        for &k in &[0.5, 2.0, 3.3] {
            let kc = c64::new(k, 0.0);
            for &x in &[0.0, 1.3, 17.0] {
                let (p, dp) = psi_plus1_closed_derivs(&P2, x, kc).unwrap();
                let w = p.conj() * dp - dp.conj() * p;
                assert!((w - 2.0 * I * k).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn soliton_profiles() {
        for &x in &[-2.0, 0.0, 1.5] {
            assert!((soliton_closed(x, 0.0) + 2.0 / x.cosh().powi(2)).abs() < 1e-15);
        }
        let (v, _) = soliton_right_jost(1.0, 0.7, c64::new(0.0, 1.0));
        assert!((v - 1.0 / (2.0 * 0.7f64.cosh())).norm() < 1e-14);
    }

    #[test]
    fn positon_singularity_location() {
        let x0 = positon_singularity(0.0);
        assert!((-2.0..=0.0).contains(&x0));
        assert!(positon_closed(x0, 0.0).is_err() || positon_closed(x0, 0.0).unwrap().abs() > 1e6);
        let x = 100.0;
        assert!((positon_closed(x, 1.0).unwrap() + 4.0 * (2.0 * (x + 4.0)).sin() / x).abs() < 5e-2);
        let x = -100.0;
        assert!((positon_closed(x, 1.0).unwrap() + 4.0 * (2.0 * (x + 4.0)).sin() / x).abs() < 5e-2);
    }
}
