//! Shared fixtures for the benchmarks.

use darboux_core::darboux::EmbeddedStateSpec;
use darboux_core::{Complex64, Grid};

/// The state at `k = 1` of the example seed.
pub fn example_state(alpha: f64) -> EmbeddedStateSpec {
    EmbeddedStateSpec::new(1.0, alpha, Complex64::new(-1.0, 0.0)).expect("valid state")
}

/// Output grid of the insertion benchmarks.
pub fn output_grid() -> Grid {
    Grid::new(-20.0, 20.0, 4001).expect("valid grid")
}
