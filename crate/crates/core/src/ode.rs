//! Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerances {
    fn default() -> Self {
        OdeTolerances { rtol: 1e-10, atol: 1e-12, max_steps: 5_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x_end` and returns the state at every point of
/// `outputs`, which must be ordered in the direction of integration and lie in `[x0, x_end]`.
pub fn integrate_dense<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    outputs: &[f64],
    tol: &OdeTolerances,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut result = Vec::with_capacity(outputs.len());
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let mut next = 0usize;
    let eps_x = 1e-13 * (1.0 + x0.abs().max(x_end.abs()));
    while next < outputs.len() && ((outputs[next] - x0) * dir).abs() <= eps_x {
        result.push(y0);
        next += 1;
    }
    if span == 0.0 || next == outputs.len() {
        if next < outputs.len() {
            return Err(Error::InvalidInput("output points outside the integration span".into()));
        }
        return Ok(result);
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = initial_step(&f, x, &y, &k1, dir, tol).min(span);
    let mut steps = 0usize;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while (x_end - x) * dir > eps_x {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::IntegrationFailure { x, reason: "step budget exhausted".into() });
        }
        let remaining = (x_end - x).abs();
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
        }
        let hs = h * dir;
        let k2 = f(x + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(x + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            x + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x + hs, &y_new);

        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            if h < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::IntegrationFailure { x, reason: "non-finite state".into() });
            }
            continue;
        }

        if err <= 1.0 {
            let x_new = if h == remaining { x_end } else { x + hs };
            // dense output for outputs inside (x, x_new]
            if next < outputs.len() && (outputs[next] - x_new) * dir <= eps_x {
                let mut r2 = [0.0; N];
                let mut r3 = [0.0; N];
                let mut r4 = [0.0; N];
                let mut r5 = [0.0; N];
                for i in 0..N {
                    let dy = y_new[i] - y[i];
                    let bspl = hs * k1[i] - dy;
                    r2[i] = dy;
                    r3[i] = bspl;
                    r4[i] = dy - hs * k7[i] - bspl;
                    r5[i] = hs
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                while next < outputs.len() && (outputs[next] - x_new) * dir <= eps_x {
                    let theta = ((outputs[next] - x) / hs).clamp(0.0, 1.0);
                    let t1 = 1.0 - theta;
                    let mut v = [0.0; N];
                    for i in 0..N {
                        v[i] = y[i] + theta * (r2[i] + t1 * (r3[i] + theta * (r4[i] + t1 * r5[i])));
                    }
                    if theta == 1.0 {
                        v = y_new;
                    }
                    result.push(v);
                    next += 1;
                }
            }
            x = x_new;
            y = y_new;
            k1 = k7;
            // PI step size control
            let fac = err.max(1e-10).powf(0.17) / fac_old.powf(0.04);
            let mut factor = (0.9 / fac).clamp(0.2, 10.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            fac_old = err.max(1e-4);
            h *= factor;
            last_rejected = false;
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= factor;
            last_rejected = true;
            if h < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::IntegrationFailure { x, reason: "step size underflow".into() });
            }
        }
    }
    if next < outputs.len() {
        return Err(Error::InvalidInput("output points outside the integration span".into()));
    }
    Ok(result)
}

fn initial_step<const N: usize, F>(
    f: &F,
    x: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dir: f64,
    tol: &OdeTolerances,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = tol.atol + tol.rtol * y[i].abs();
        dnf += (k1[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    let y1 = axpy(y, h * dir, &[(1.0, k1)]);
    let k2 = f(x + h * dir, &y1);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = tol.atol + tol.rtol * y[i].abs();
        der2 += ((k2[i] - k1[i]) / sk).powi(2);
    }
    der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    h = (100.0 * h).min(h1);
    h.max(1e-12)
}
