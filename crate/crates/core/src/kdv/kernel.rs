//! The Hankel kernel `F(s, t) = (1/2pi) int R(k) e^{iks + 8ik^3 t} dk + c^2 e^{8 kappa^3 t - kappa s}`
//! of the seed, split as `F = F_c + F_b` with the bound-state part `F_b` kept separately.
//!
//! At `t = 0` the continuous part has closed form: `-i sum Res` over the two lower poles of
//! `R` for `s < 0` and `-F_b(s)` for `s > 0` (so `F` vanishes on `s > 0`). For `t > 0` it is
//! tabulated from the line `Im z = beta` by FFT, with `beta` reduced for very negative `s`
//! to keep the factor `e^{-beta s}` bounded.

use num_complex::Complex64 as c64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quadrature::lagrange6;
use crate::wvn_oracle::{bound_state, lower_poles};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Spectral data of the seed that the kernel is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSpectrum {
    pub rho: f64,
    pub kappa: f64,
    pub c2: f64,
    pub lower: [c64; 2],
}

impl SeedSpectrum {
    pub fn new(rho: f64) -> Self {
        let (kappa, c2) = bound_state(&crate::wvn_oracle::ExampleParams { rho, alpha: 1.0 });
        SeedSpectrum { rho, kappa, c2, lower: lower_poles(rho) }
    }

    /// `R(z) = -i rho / (z^3 - z + i rho)`.
    pub fn r(&self, z: c64) -> c64 {
        -I * self.rho / (z * z * z - z + I * self.rho)
    }

    /// `R'(z)`.
    pub fn dr(&self, z: c64) -> c64 {
        let d = z * z * z - z + I * self.rho;
        I * self.rho * (3.0 * z * z - 1.0) / (d * d)
    }

    /// `(F_c, F_c')` at `t = 0`.
    pub fn fc_closed(&self, s: f64) -> (f64, f64) {
        if s >= 0.0 {
            let e = self.c2 * (-self.kappa * s).exp();
            return (-e, self.kappa * e);
        }
        let mut f = c64::new(0.0, 0.0);
        let mut df = c64::new(0.0, 0.0);
        for p in self.lower {
            let term = -self.rho * (I * p * s).exp() / (3.0 * p * p - 1.0);
            f += term;
            df += I * p * term;
        }
        (f.re, df.re)
    }
}

/// Tabulated `F_c(., t)` and `F_c'(., t)` on a uniform grid.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub t: f64,
    pub s0: f64,
    pub ds: f64,
    pub s_hi: f64,
    f: Vec<f64>,
    df: Vec<f64>,
}

/// Settings of the FFT tabulation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TableSettings {
    /// Table spacing.
    pub ds: f64,
    /// `log2` of the FFT length; the aliasing period is `2^n ds`.
    pub log2_n: u32,
    /// Lowest tabulated `s`; the kernel is taken as zero below.
    pub s_lo: f64,
    /// Highest tabulated `s`; above it `F = 0` is assumed, i.e. `F_c = -F_b`.
    pub s_hi: f64,
}

impl Default for TableSettings {
    fn default() -> Self {
        TableSettings { ds: 0.01, log2_n: 16, s_lo: -100.0, s_hi: 14.0 }
    }
}

impl KernelTable {
    pub fn build(spec: &SeedSpectrum, t: f64, set: &TableSettings) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidInput("tables are built for t > 0 only".into()));
        }
        let n = 1usize << set.log2_n;
        let ds = set.ds;
        let da = std::f64::consts::TAU / (n as f64 * ds);
        let a_max = 0.5 * n as f64 * da;
        let half = (n / 2) as f64 * ds;
        if set.s_lo < -0.45 * half || set.s_hi > 0.45 * half {
            return Err(Error::InvalidInput("tabulated range exceeds the aliasing period".into()));
        }
        let beta0 = 0.5 * spec.kappa;
        let band_of = |s: f64| -> usize {
            if s >= -3.0 / beta0 {
                0
            } else {
                ((beta0 * -s / 3.0).log2().ceil() as usize).max(1)
            }
        };
        let bands = band_of(set.s_lo) + 1;
        let smallest = beta0 / (1u64 << (bands - 1)) as f64;
        if 24.0 * smallest * t * a_max * a_max < 40.0 {
            return Err(Error::Truncation(format!(
                "t = {t} too small for the contour table; the Gaussian factor does not decay by |Re z| = {a_max:.0}"
            )));
        }
        let i0 = (set.s_lo / ds).floor() as i64;
        let i1 = (set.s_hi / ds).ceil() as i64;
        let len = (i1 - i0 + 1) as usize;
        let mut f = vec![0.0; len];
        let mut df = vec![0.0; len];
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        for b in 0..bands {
            let beta = beta0 / (1u64 << b) as f64;
            let mut g = vec![c64::new(0.0, 0.0); n];
            let mut dg = vec![c64::new(0.0, 0.0); n];
            for j in 0..n {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                let z = c64::new(m * da, beta);
                let v = spec.r(z) * (I * 8.0 * t * z * z * z).exp();
                g[j] = v;
                dg[j] = I * z * v;
            }
            fft.process(&mut g);
            fft.process(&mut dg);
            let c = da / std::f64::consts::TAU;
            for (idx, i) in (i0..=i1).enumerate() {
                let s = i as f64 * ds;
                if band_of(s) != b {
                    continue;
                }
                let j = i.rem_euclid(n as i64) as usize;
                let e = c * (-beta * s).exp();
                f[idx] = e * g[j].re;
                df[idx] = e * dg[j].re;
            }
        }
        Ok(KernelTable { t, s0: i0 as f64 * ds, ds, s_hi: set.s_hi, f, df })
    }

    /// Interpolated `(F_c, F_c')`; zero below the table.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        if s < self.s0 + 3.0 * self.ds {
            return (0.0, 0.0);
        }
        (lagrange6(self.s0, self.ds, &self.f, s), lagrange6(self.s0, self.ds, &self.df, s))
    }
}

/// The kernel at one time.
#[derive(Debug, Clone)]
pub enum Kernel {
    Free,
    Closed(SeedSpectrum),
    Table(SeedSpectrum, KernelTable),
}

impl Kernel {
    pub fn new(spec: Option<SeedSpectrum>, t: f64, set: &TableSettings) -> Result<Self> {
        match spec {
            None => Ok(Kernel::Free),
            Some(sp) if t == 0.0 => Ok(Kernel::Closed(sp)),
            Some(sp) => Ok(Kernel::Table(sp, KernelTable::build(&sp, t, set)?)),
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Kernel::Table(_, tab) => tab.t,
            _ => 0.0,
        }
    }

    /// `(kappa, c^2(t))` of the bound-state part.
    pub fn bound(&self) -> Option<(f64, f64)> {
        match self {
            Kernel::Free => None,
            Kernel::Closed(sp) => Some((sp.kappa, sp.c2)),
            Kernel::Table(sp, tab) => Some((sp.kappa, sp.c2 * (8.0 * sp.kappa.powi(3) * tab.t).exp())),
        }
    }

    /// Continuous part `(F_c, F_c')`.
    pub fn fc(&self, s: f64) -> (f64, f64) {
        match self {
            Kernel::Free => (0.0, 0.0),
            Kernel::Closed(sp) => sp.fc_closed(s),
            Kernel::Table(sp, tab) => {
                if s > tab.s_hi {
                    let c2 = sp.c2 * (8.0 * sp.kappa.powi(3) * tab.t).exp();
                    let e = c2 * (-sp.kappa * s).exp();
                    (-e, sp.kappa * e)
                } else {
                    tab.eval(s)
                }
            }
        }
    }

    /// Full kernel `F = F_c + F_b`.
    pub fn full(&self, s: f64) -> f64 {
        let (f, _) = self.fc(s);
        match self.bound() {
            Some((k, c2)) => f + c2 * (-k * s).exp(),
            None => f,
        }
    }

    /// True when `F` has a second-derivative jump at `s = 0` (only at `t = 0`).
    pub fn has_kink(&self) -> bool {
        matches!(self, Kernel::Closed(_))
    }

    /// Upper end of the support of `F` used to truncate the operator variable.
    pub fn support_end(&self) -> f64 {
        match self {
            Kernel::Free => f64::NEG_INFINITY,
            Kernel::Closed(_) => 0.0,
            Kernel::Table(_, tab) => tab.s_hi,
        }
    }
}
