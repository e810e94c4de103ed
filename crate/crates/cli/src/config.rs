//! Run configuration: the JSON document every artifact is generated from.

use std::path::{Path, PathBuf};

use darboux_core::darboux::{DarbouxOptions, EmbeddedStateSpec};
use darboux_core::scattering::{default_grid, reflection_transmission, KGrid, ScatterOptions};
use darboux_core::{Complex64, ExampleParams, Grid, OdeTolerances, PotentialKind, PotentialSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scatter,
    Insert,
    Remove,
    Evolve,
    VerifyExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid, CliError> {
        if self.n < 2 {
            return Err(CliError::invalid("grid.n must be at least 2"));
        }
        Ok(Grid::new(self.x_min, self.x_max, self.n)?)
    }
}

/// An embedded state; `r_at_omega = [re, im]` is filled in from the potential when omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub omega: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_at_omega: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    /// Grid extension used for tails and norms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub states: Vec<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<KGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Eigenfunction table read by `remove`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Parameters of `verify-example`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleParams>,
    pub output: String,
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(format!("{name} must be finite")))
    }
}

impl RunConfig {
    /// Loads a config, or the `config` member of a `.meta.json` sidecar.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
        if let Some(inner) = v.get_mut("config") {
            v = inner.take();
        }
        serde_json::from_value(v).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
    }

    pub fn ode(&self) -> OdeTolerances {
        let d = DarbouxOptions::default().ode;
        OdeTolerances { rtol: self.tolerances.rtol.unwrap_or(d.rtol), atol: self.tolerances.atol.unwrap_or(d.atol), ..d }
    }

    pub fn darboux_options(&self) -> DarbouxOptions {
        let d = DarbouxOptions::default();
        DarbouxOptions { ode: self.ode(), extension: self.tolerances.extension.unwrap_or(d.extension), ..d }
    }

    pub fn scatter_options(&self) -> ScatterOptions {
        let d = ScatterOptions::default();
        ScatterOptions {
            ode: OdeTolerances {
                rtol: self.tolerances.rtol.unwrap_or(d.ode.rtol),
                atol: self.tolerances.atol.unwrap_or(d.ode.atol),
                ..d.ode
            },
            ..d
        }
    }

    pub fn potential(&self) -> Result<&PotentialSpec, CliError> {
        self.potential.as_ref().ok_or_else(|| CliError::invalid("potential is required"))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        self.grid.ok_or_else(|| CliError::invalid("grid is required"))?.grid()
    }

    /// Embedded states with their reflection coefficients.
    pub fn states(&self) -> Result<Vec<EmbeddedStateSpec>, CliError> {
        self.states
            .iter()
            .map(|s| {
                let r = s.r_at_omega.ok_or_else(|| CliError::invalid("state without r_at_omega after resolution"))?;
                Ok(EmbeddedStateSpec::new(s.omega, s.alpha, Complex64::new(r[0], r[1]))?)
            })
            .collect()
    }

    /// Checks the invariants and fills every default, so that the result alone reproduces the run.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if self.output.trim().is_empty() {
            return Err(CliError::invalid("output prefix must not be empty"));
        }
        for (name, v) in [("tolerances.rtol", self.tolerances.rtol), ("tolerances.atol", self.tolerances.atol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::invalid(format!("{name} must be positive")));
                }
            }
        }
        if let Some(e) = self.tolerances.extension {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(CliError::invalid("tolerances.extension must be non-negative"));
            }
        }
        if let Some(g) = &self.grid {
            finite("grid.x_min", g.x_min)?;
            finite("grid.x_max", g.x_max)?;
            g.grid()?;
        }
        for s in &self.states {
            finite("omega", s.omega)?;
            finite("alpha", s.alpha)?;
        }
        if let Some(p) = &self.potential {
            p.validate()?;
        }
        match self.command {
            Command::Scatter => {
                let p = self.potential()?.clone();
                if self.grid.is_none() {
                    let g = default_grid(&p);
                    self.grid = Some(GridConfig { x_min: g.x_min, x_max: g.x_max, n: g.n_points });
                }
                if self.k_grid.is_none() {
                    self.k_grid = Some(KGrid { k_min: 0.2, k_max: 3.0, n: 200, exclusions: vec![1.0], radius: 1e-3 });
                }
                let kg = self.k_grid.as_ref().unwrap();
                kg.points()?;
                finite("k_grid.radius", kg.radius)?;
            }
            Command::Insert | Command::Evolve => {
                self.potential()?;
                if self.grid.is_none() {
                    self.grid = Some(if self.command == Command::Insert {
                        GridConfig { x_min: -20.0, x_max: 20.0, n: 4001 }
                    } else {
                        GridConfig { x_min: -10.0, x_max: 10.0, n: 201 }
                    });
                }
                self.resolve_reflection()?;
                self.states()?;
                if self.command == Command::Evolve {
                    let t = self.time.get_or_insert(TimeConfig { t_values: vec![0.0] });
                    if t.t_values.is_empty() {
                        return Err(CliError::invalid("time.t_values must not be empty"));
                    }
                    if t.t_values.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                        return Err(CliError::invalid("time.t_values must be finite and non-negative"));
                    }
                    match self.potential()?.kind {
                        PotentialKind::WvnExample { .. } | PotentialKind::Zero => {}
                        _ => return Err(CliError::invalid("evolve supports the wvn_example and zero potentials")),
                    }
                }
            }
            Command::Remove => {
                let input = self.input.as_ref().ok_or_else(|| CliError::invalid("remove needs an input table"))?;
                if !input.is_file() {
                    return Err(CliError::invalid(format!("input file {} does not exist", input.display())));
                }
                if self.states.iter().any(|s| s.alpha != 1.0) {
                    return Err(CliError::invalid("remove takes normalized eigenfunctions; set alpha to 1"));
                }
                if self.grid.is_none() {
                    self.grid = Some(GridConfig { x_min: -20.0, x_max: 20.0, n: 4001 });
                }
            }
            Command::VerifyExample => {
                let e = self.example.get_or_insert(ExampleParams { rho: 2.0, alpha: 1.0 });
                e.validate()?;
            }
        }
        Ok(self)
    }

    fn resolve_reflection(&mut self) -> Result<(), CliError> {
        let p = self.potential()?.clone();
        let opts = self.scatter_options();
        for s in &mut self.states {
            if s.r_at_omega.is_none() {
                let r = match p.kind {
                    PotentialKind::WvnExample { rho } => {
                        darboux_core::wvn_oracle::scattering_closed(&ExampleParams { rho, alpha: 1.0 }, Complex64::new(s.omega, 0.0)).1
                    }
                    _ => {
                        let g = default_grid(&p);
                        reflection_transmission(&p, s.omega, &g, &opts)?.0
                    }
                };
                s.r_at_omega = Some([r.re, r.im]);
            }
        }
        Ok(())
    }
}
