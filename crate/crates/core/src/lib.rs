//! Binary Darboux transformations for one-dimensional Schrödinger operators.
//!
//! The crate inserts and removes embedded eigenvalues, computes the associated scattering
//! quantities, and evolves the result under KdV through a Fredholm determinant.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod darboux;
pub mod error;
pub mod grid;
pub mod kdv;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod scattering;
pub mod schrodinger;
pub mod verify;
pub mod wave;
pub mod wvn_oracle;

pub use error::{Error, Result};
pub use grid::Grid;
pub use num_complex::Complex64;
pub use ode::OdeTolerances;
pub use potential::{PotentialKind, PotentialSpec};
pub use wave::{wronskian, RealField, WaveField};
pub use wvn_oracle::ExampleParams;
