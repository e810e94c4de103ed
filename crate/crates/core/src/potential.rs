//! Real potentials on the line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::lagrange4;
use crate::wvn_oracle::{self, ExampleParams};

/// Closed-form tag or samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// Wigner-von Neumann seed, zero on `x >= 0`.
    WvnExample { rho: f64 },
    /// Even one-state transform of the seed (`rho = 2 alpha^2`).
    SymPlusOne { rho: f64 },
    /// One-state transform of the seed with general `alpha`.
    WvnPlusOne { rho: f64, alpha: f64 },
    /// Reflectionless well `-2 kappa^2 sech^2(kappa x)`.
    Soliton { kappa: f64 },
    /// Uniform samples on `[x_min, x_max]`, interpolated with local cubics.
    Sampled { x_min: f64, x_max: f64, values: Vec<f64> },
    /// `inner(x - shift)`.
    Shifted { inner: Box<PotentialSpec>, shift: f64 },
    /// Pointwise sum.
    Sum { terms: Vec<PotentialSpec> },
}

/// A potential together with its right cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    /// Beyond this point the potential is treated as exactly zero. Derived from the kind if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_cutoff: Option<f64>,
    /// Magnitude below which a tail is declared zero when the cutoff is derived.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_tail_tol() -> f64 {
    1e-16
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind) -> Self {
        PotentialSpec { kind, right_cutoff: None, tail_tol: default_tail_tol() }
    }

    pub fn zero() -> Self {
        Self::new(PotentialKind::Zero)
    }

    pub fn wvn(rho: f64) -> Self {
        Self::new(PotentialKind::WvnExample { rho })
    }

    pub fn soliton(kappa: f64) -> Self {
        Self::new(PotentialKind::Soliton { kappa })
    }

    pub fn sampled(x_min: f64, x_max: f64, values: Vec<f64>) -> Self {
        Self::new(PotentialKind::Sampled { x_min, x_max, values })
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match &self.kind {
            PotentialKind::Zero => {}
            PotentialKind::WvnExample { rho } | PotentialKind::SymPlusOne { rho } => pos("rho", *rho)?,
            PotentialKind::WvnPlusOne { rho, alpha } => ExampleParams::new(*rho, *alpha).map(|_| ())?,
            PotentialKind::Soliton { kappa } => pos("kappa", *kappa)?,
            PotentialKind::Sampled { x_min, x_max, values } => {
                if values.len() < 4 || !(x_min < x_max) {
                    return Err(Error::InvalidInput("sampled potential needs >= 4 samples on x_min < x_max".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("sampled potential has non-finite values".into()));
                }
            }
            PotentialKind::Shifted { inner, shift } => {
                if !shift.is_finite() {
                    return Err(Error::InvalidInput("shift must be finite".into()));
                }
                inner.validate()?
            }
            PotentialKind::Sum { terms } => {
                for t in terms {
                    t.validate()?
                }
            }
        }
        if let Some(c) = self.right_cutoff {
            if !c.is_finite() {
                return Err(Error::InvalidInput("right_cutoff must be finite".into()));
            }
        }
        if !(self.tail_tol >= 0.0) {
            return Err(Error::InvalidInput("tail_tol must be nonnegative".into()));
        }
        Ok(())
    }

    /// Right cutoff; `-inf` for the zero potential.
    pub fn effective_right_cutoff(&self) -> f64 {
        if let Some(c) = self.right_cutoff {
            return c;
        }
        match &self.kind {
            PotentialKind::Zero => f64::NEG_INFINITY,
            PotentialKind::WvnExample { .. } => 0.0,
            PotentialKind::SymPlusOne { rho } => slow_tail_cutoff(*rho, self.tail_tol),
            PotentialKind::WvnPlusOne { rho, .. } => slow_tail_cutoff(*rho, self.tail_tol),
            PotentialKind::Soliton { kappa } => {
                // 8 kappa^2 e^{-2 kappa x} <= tail_tol
                let tol = self.tail_tol.max(1e-300);
                ((8.0 * kappa * kappa / tol).ln() / (2.0 * kappa)).max(0.0)
            }
            PotentialKind::Sampled { x_max, .. } => *x_max,
            PotentialKind::Shifted { inner, shift } => inner.effective_right_cutoff() + shift,
            PotentialKind::Sum { terms } => {
                terms.iter().map(|t| t.effective_right_cutoff()).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Left end of a compactly supported sampled potential, if any.
    pub fn left_support(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(f64::INFINITY),
            PotentialKind::Sampled { x_min, .. } => Some(*x_min),
            PotentialKind::Shifted { inner, shift } => inner.left_support().map(|v| v + shift),
            _ => None,
        }
    }

    /// Points where the potential is not smooth; integration is split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.kind {
            PotentialKind::WvnExample { .. } | PotentialKind::SymPlusOne { .. } | PotentialKind::WvnPlusOne { .. } => {
                vec![0.0]
            }
            PotentialKind::Sampled { x_min, x_max, .. } => vec![*x_min, *x_max],
            PotentialKind::Shifted { inner, shift } => inner.breakpoints().into_iter().map(|v| v + shift).collect(),
            PotentialKind::Sum { terms } => terms.iter().flat_map(|t| t.breakpoints()).collect(),
            _ => vec![],
        };
        if let Some(c) = self.right_cutoff {
            b.push(c);
        }
        b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        b
    }

    /// `q(x)`; zero at and beyond an explicitly declared right cutoff.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput("x must be finite".into()));
        }
        if let Some(c) = self.right_cutoff {
            if x >= c {
                return Ok(0.0);
            }
        }
        self.eval_raw(x)
    }

    fn eval_raw(&self, x: f64) -> Result<f64> {
        Ok(match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::WvnExample { rho } => wvn_oracle::q_seed_rho(*rho, x),
            PotentialKind::SymPlusOne { rho } => wvn_oracle::q_sym(*rho, x),
            PotentialKind::WvnPlusOne { rho, alpha } => {
                wvn_oracle::q_plus1(&ExampleParams { rho: *rho, alpha: *alpha }, x)
            }
            PotentialKind::Soliton { kappa } => {
                let c = (kappa * x).cosh();
                -2.0 * kappa * kappa / (c * c)
            }
            PotentialKind::Sampled { x_min, x_max, values } => {
                let tol = 1e-12 * (1.0 + x_min.abs().max(x_max.abs()));
                if x < x_min - tol || x > x_max + tol {
                    return Err(Error::OutOfDomain { x, lo: *x_min, hi: *x_max });
                }
                let h = (x_max - x_min) / (values.len() - 1) as f64;
                lagrange4(*x_min, h, values, x)
            }
            PotentialKind::Shifted { inner, shift } => inner.eval(x - shift)?,
            PotentialKind::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval(x)?;
                }
                s
            }
        })
    }

    /// Seed parameters when this is the closed-form seed.
    pub fn wvn_rho(&self) -> Option<f64> {
        match (&self.kind, self.right_cutoff) {
            (PotentialKind::WvnExample { rho }, None | Some(0.0)) => Some(*rho),
            _ => None,
        }
    }

    /// Evaluates on every grid point.
    pub fn sample(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// The transformed potentials decay like `4/|x|`; beyond a cutoff their tail is not negligible,
/// so the derived cutoff is placed far to the right and callers pass explicit cutoffs in practice.
fn slow_tail_cutoff(_rho: f64, tail_tol: f64) -> f64 {
    (8.0 / tail_tol.max(1e-12)).min(1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_zero() {
        assert_eq!(PotentialSpec::zero().eval(3.7).unwrap(), 0.0);
    }

    #[test]
    fn wvn_vanishes_on_right_and_is_continuous() {
        let q = PotentialSpec::wvn(2.0);
        assert_eq!(q.eval(1.0).unwrap(), 0.0);
        assert!(q.eval(-1e-9).unwrap().abs() < 1e-7);
        assert_eq!(q.effective_right_cutoff(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"kind": "wvn_example", "rho": 2.0, "right_cutoff": 0.0}"#;
        let q: PotentialSpec = serde_json::from_str(s).unwrap();
        assert_eq!(q.kind, PotentialKind::WvnExample { rho: 2.0 });
        assert_eq!(q.right_cutoff, Some(0.0));
        let back = serde_json::to_string(&q).unwrap();
        let again: PotentialSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(again, q);
        let z: PotentialSpec = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert_eq!(z.kind, PotentialKind::Zero);
    }

    #[test]
    fn sampled_out_of_domain() {
        let q = PotentialSpec::sampled(0.0, 1.0, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!((q.eval(0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(q.eval(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn composites() {
        let s = PotentialSpec::new(PotentialKind::Sum {
            terms: vec![
                PotentialSpec::soliton(1.0),
                PotentialSpec::new(PotentialKind::Shifted { inner: Box::new(PotentialSpec::soliton(1.0)), shift: 3.0 }),
            ],
        });
        let v = s.eval(3.0).unwrap();
        let e = -2.0 / 3f64.cosh().powi(2) - 2.0;
        assert!((v - e).abs() < 1e-14);
    }
}
