//! KdV evolution of the seed through the Fredholm determinant of its Hankel operator.
//!
//! With the time-evolved data `R(k) e^{8ik^3 t}` and `c^2 e^{8 kappa^3 t}` the potential is
//! `q(x, t) = -2 d^2/dx^2 log det(I + F_x)` where `F_x` has kernel `F(2x + u + v, t)` on
//! `L^2(0, inf)`, and the right Jost solution is `e^{ikx}(1 + int K(x, x + u) e^{iku} du)`.

pub mod hankel;
pub mod insertion;
pub mod kernel;
pub mod pde;
pub mod symbol;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};

pub use hankel::{solve, HankelDiscretization, HankelSolution};
pub use insertion::{
    conservation_integrals, embedded_pole_persistence, q_plus_at, q_plus_evolved, ConservationReport, EvolvedInsertion,
    EvolvedInsertionOptions, PersistenceReport,
};
pub use kernel::{Kernel, KernelTable, SeedSpectrum, TableSettings};
pub use pde::{kdv_residual, split_step_reference, SpaceTimeField, SplitStepOptions};
pub use symbol::{phi_symbol, SymbolValue};

const CACHE_LIMIT: usize = 4096;

/// The seed evolved to time `t`, with factorizations computed on demand.
#[derive(Debug)]
pub struct EvolvedState {
    pub t: f64,
    /// Seed strength; `None` is the free seed `q = 0`.
    pub rho: Option<f64>,
    pub disc: HankelDiscretization,
    kernel: Kernel,
    cache: Mutex<HashMap<u64, Arc<HankelSolution>>>,
}

impl EvolvedState {
    pub fn new(rho: f64, t: f64, disc: HankelDiscretization) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        Self::build(Some(SeedSpectrum::new(rho)), t, disc)
    }

    pub fn free(t: f64, disc: HankelDiscretization) -> Result<Self> {
        Self::build(None, t, disc)
    }

    fn build(spec: Option<SeedSpectrum>, t: f64, disc: HankelDiscretization) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
        }
        disc.validate(spec.map(|s| s.kappa))?;
        let kernel = Kernel::new(spec, t, &disc.table)?;
        Ok(EvolvedState { t, rho: spec.map(|s| s.rho), disc, kernel, cache: Mutex::new(HashMap::new()) })
    }

    pub fn spectrum(&self) -> Option<SeedSpectrum> {
        self.rho.map(SeedSpectrum::new)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Evolved reflection coefficient `R(k) e^{8ik^3 t}`.
    pub fn reflection(&self, k: c64) -> c64 {
        match self.spectrum() {
            None => c64::new(0.0, 0.0),
            Some(sp) => sp.r(k) * (c64::new(0.0, 8.0 * self.t) * k * k * k).exp(),
        }
    }

    /// `d/dk [R(k) e^{8ik^3 t}]`.
    pub fn reflection_dk(&self, k: c64) -> c64 {
        match self.spectrum() {
            None => c64::new(0.0, 0.0),
            Some(sp) => {
                let e = (c64::new(0.0, 8.0 * self.t) * k * k * k).exp();
                (sp.dr(k) + c64::new(0.0, 24.0 * self.t) * k * k * sp.r(k)) * e
            }
        }
    }

    /// Factorization at `x`, cached.
    pub fn solve(&self, x: f64) -> Result<Arc<HankelSolution>> {
        let key = x.to_bits();
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(solve(&self.kernel, &self.disc, x)?);
        let mut c = self.cache.lock().unwrap();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, s.clone());
        Ok(s)
    }

    /// `log det(I + F_x)`.
    pub fn log_det(&self, x: f64) -> Result<f64> {
        Ok(self.solve(x)?.log_det)
    }
}

/// Panel width used for the operator variable at time `t`: the kernel develops structure on
/// the scale `(24 t)^{1/3}` for small `t > 0`.
pub fn panel_width_for(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (1.1 * (24.0 * t).cbrt()).clamp(0.25, 1.0)
    }
}

/// Discretization tuned for time `t`.
pub fn discretization_for(t: f64) -> HankelDiscretization {
    HankelDiscretization { panel_width: panel_width_for(t), ..HankelDiscretization::default() }
}

/// `q(x, t) = -2 d/dx K(x, x)`, with the derivative taken exactly through the Nystrom system.
pub fn dyson_q(state: &EvolvedState, x: f64) -> Result<f64> {
    Ok(state.solve(x)?.q())
}

/// `q(x, t) = -2 d^2/dx^2 log det` by centered differences with step `h` and one Richardson step.
pub fn dyson_q_fd(state: &EvolvedState, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> {
        Ok((state.log_det(x + h)? - 2.0 * state.log_det(x)? + state.log_det(x - h)?) / (h * h))
    };
    let (a, b) = (d(h)?, d(2.0 * h)?);
    Ok(-2.0 * (4.0 * a - b) / 3.0)
}

/// `(psi(x, t, k), psi'(x, t, k))`.
pub fn jost_evolved(state: &EvolvedState, x: f64, k: c64) -> Result<(c64, c64)> {
    if k.norm() == 0.0 {
        return Err(Error::DegenerateJost);
    }
    Ok(state.solve(x)?.jost(k))
}
