//! The entire function `Phi_{x,t}(s) = int_{Im z = b} R(z) e^{i(8 z^3 t + 2 z x)} / (z - s) dz`
//! on a line above the imaginary pole of `R`.

use num_complex::Complex64 as c64;
use serde::Serialize;

use super::EvolvedState;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolValue {
    pub value: c64,
    /// `|Phi_{2S} - Phi_S|` from the doubling test.
    pub doubling_change: f64,
    pub contour_height: f64,
}

fn integrate(state: &EvolvedState, x: f64, s: c64, b: f64, half: f64) -> c64 {
    let sp = state.spectrum().expect("seeded state");
    let n = state.disc.contour_density.max(2);
    let (gx, gw) = gauss_legendre(n);
    let panels = (2.0 * half).ceil() as usize;
    let h = 2.0 * half / panels as f64;
    let mut acc = c64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = -half + p as f64 * h;
        for (xi, wi) in gx.iter().zip(&gw) {
            let z = c64::new(lo + 0.5 * h * (xi + 1.0), b);
            let ph = I * (8.0 * z * z * z * state.t + 2.0 * z * x);
            acc += 0.5 * h * wi * sp.r(z) * ph.exp() / (z - s);
        }
    }
    acc
}

/// Evaluates `Phi_{x,t}(s)`; the truncation `S` is doubled once and the change reported.
pub fn phi_symbol(state: &EvolvedState, x: f64, s: f64) -> Result<SymbolValue> {
    let Some(sp) = state.spectrum() else {
        return Ok(SymbolValue { value: c64::new(0.0, 0.0), doubling_change: 0.0, contour_height: 0.0 });
    };
    let b = if state.disc.contour_height > 0.0 { state.disc.contour_height } else { sp.kappa + 0.5 };
    if b <= sp.kappa {
        return Err(Error::InvalidInput(format!("contour height {b} is not above the pole at {}", sp.kappa)));
    }
    let big = state.disc.contour_truncation;
    let v1 = integrate(state, x, c64::new(s, 0.0), b, big);
    let v2 = integrate(state, x, c64::new(s, 0.0), b, 2.0 * big);
    let change = (v2 - v1).norm();
    if change > 1e-8 * v2.norm().max(1.0) {
        return Err(Error::Truncation(format!(
            "contour truncation S = {big} not converged at (x, s) = ({x}, {s}): doubling changed Phi by {change:.3e}"
        )));
    }
    Ok(SymbolValue { value: v2, doubling_change: change, contour_height: b })
}
