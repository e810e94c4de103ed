//! Quadrature rules and local interpolation on uniform grids.

use std::ops::{Add, Mul};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` panels of `order` nodes each.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in gx.iter().zip(&gw) {
            x.push(lo + 0.5 * h * (xi + 1.0));
            w.push(0.5 * h * wi);
        }
    }
    (x, w)
}

/// Cumulative integral of `f` on a uniform grid using the endpoint-corrected trapezoid rule
/// `h/2 (f_i + f_{i+1}) + h^2/12 (f'_i - f'_{i+1})`, which is fourth order.
pub fn cumulative_hermite(h: f64, f: &[f64], df: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), df.len());
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    let c = h * h / 12.0;
    for i in 0..f.len().saturating_sub(1) {
        acc += 0.5 * h * (f[i] + f[i + 1]) + c * (df[i] - df[i + 1]);
        out.push(acc);
    }
    out
}

/// Integral over the whole grid with the corrected trapezoid rule.
pub fn hermite_integral(h: f64, f: &[f64], df: &[f64]) -> f64 {
    *cumulative_hermite(h, f, df).last().unwrap_or(&0.0)
}

/// Composite Simpson rule on a uniform grid (falls back to a trapezoid end panel for an even count).
pub fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (f[0] + f[1]);
    }
    let m = if n % 2 == 1 { n } else { n - 1 };
    let mut s = f[0] + f[m - 1];
    for (i, v) in f.iter().enumerate().take(m - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = s * h / 3.0;
    if m < n {
        total += 0.5 * h * (f[n - 2] + f[n - 1]);
    }
    total
}

/// Four-point Lagrange interpolation on a uniform grid with first node `x0` and spacing `h`.
pub fn lagrange4<T>(x0: f64, h: f64, values: &[T], x: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= 4, "cubic interpolation needs four samples");
    let s = (x - x0) / h;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i as f64;
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    values[i] * l0 + values[i + 1] * l1 + values[i + 2] * l2 + values[i + 3] * l3
}

/// Six-point Lagrange interpolation on a uniform grid.
pub fn lagrange6<T>(x0: f64, h: f64, values: &[T], x: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= 6, "quintic interpolation needs six samples");
    let s = (x - x0) / h;
    let i = (s.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
    let t = s - i as f64;
    let mut acc = values[i] * 0.0;
    for j in 0..6 {
        let mut l = 1.0;
        for m in 0..6 {
            if m != j {
                l *= (t - m as f64) / (j as f64 - m as f64);
            }
        }
        acc = acc + values[i + j] * l;
    }
    acc
}
