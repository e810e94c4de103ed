//! `darboux`: insertion and removal of embedded eigenvalues, scattering data and KdV evolution.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid input (error JSON on stderr),
//! 3 numerical failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use darboux_core::scattering::KGrid;
use darboux_core::{ExampleParams, PotentialSpec};

use config::{Command, GridConfig, RunConfig, StateConfig, TimeConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] darboux_core::Error),
}

impl CliError {
    pub fn invalid(m: impl Into<String>) -> Self {
        CliError::Invalid(m.into())
    }

    pub fn io(m: impl Into<String>) -> Self {
        CliError::Core(darboux_core::Error::Io(m.into()))
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid_config",
            CliError::Core(e) => e.kind(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "darboux", version, about = "Embedded eigenvalues, scattering data and KdV positons")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Reflection and transmission coefficients on a momentum grid.
    Scatter(ScatterArgs),
    /// Insert embedded eigenvalues into a potential.
    Insert(StateArgs),
    /// Remove embedded eigenvalues given their normalized eigenfunctions.
    Remove(RemoveArgs),
    /// Evolve the seed and its transform under KdV.
    Evolve(EvolveArgs),
    /// Compare the whole pipeline with the closed forms of the example.
    VerifyExample(VerifyArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON run configuration (or a .meta.json sidecar); flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long)]
    output: Option<String>,
    /// Potential as a JSON file.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Strength of the example seed; shorthand for the `wvn_example` potential.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
}

#[derive(Args, Debug)]
struct ScatterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    k_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k_max: Option<f64>,
    #[arg(long)]
    n_k: Option<usize>,
    /// Momenta to exclude, with balls of radius `--radius`.
    #[arg(long = "exclude", allow_hyphen_values = true)]
    exclusions: Vec<f64>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[command(flatten)]
    common: Common,
    /// Embedded state as `omega:alpha`; repeat for several.
    #[arg(long = "state", value_parser = parse_state)]
    states: Vec<StateConfig>,
}

#[derive(Args, Debug)]
struct RemoveArgs {
    #[command(flatten)]
    common: Common,
    /// Table with columns x,q,y_1,dy_1,... as written by `insert` to `<prefix>.eigen.csv`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Momentum of each eigenfunction column, in order.
    #[arg(long = "omega", allow_hyphen_values = true)]
    omegas: Vec<f64>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    states: StateArgs,
    /// Times; repeat for several.
    #[arg(long = "t", allow_hyphen_values = true)]
    times: Vec<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<String>,
}

fn parse_state(s: &str) -> Result<StateConfig, String> {
    let (w, a) = s.split_once(':').ok_or("expected omega:alpha")?;
    let omega = w.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let alpha = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(StateConfig { omega, alpha, r_at_omega: None })
}

fn base(command: Command, path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => {
            let c = RunConfig::load(p)?;
            if c.command != command {
                return Err(CliError::invalid(format!("config is for {:?}, not {:?}", c.command, command)));
            }
            Ok(c)
        }
        None => Ok(RunConfig {
            command,
            potential: None,
            grid: None,
            states: Vec::new(),
            k_grid: None,
            time: None,
            tolerances: Default::default(),
            input: None,
            example: None,
            output: String::new(),
        }),
    }
}

fn apply_common(cfg: &mut RunConfig, c: &Common, default_out: &str) -> Result<(), CliError> {
    if let Some(p) = &c.potential {
        let text = std::fs::read_to_string(p)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", p.display())))?;
        cfg.potential =
            Some(serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?);
    }
    if let Some(rho) = c.rho {
        cfg.potential = Some(PotentialSpec::wvn(rho));
    }
    if c.x_min.is_some() || c.x_max.is_some() || c.n.is_some() {
        let g = cfg.grid.unwrap_or(GridConfig { x_min: -20.0, x_max: 20.0, n: 4001 });
        cfg.grid = Some(GridConfig { x_min: c.x_min.unwrap_or(g.x_min), x_max: c.x_max.unwrap_or(g.x_max), n: c.n.unwrap_or(g.n) });
    }
    if c.rtol.is_some() {
        cfg.tolerances.rtol = c.rtol;
    }
    if c.atol.is_some() {
        cfg.tolerances.atol = c.atol;
    }
    if let Some(o) = &c.output {
        cfg.output = o.clone();
    }
    if cfg.output.is_empty() {
        cfg.output = default_out.into();
    }
    Ok(())
}

fn build(cli: Cli) -> Result<RunConfig, CliError> {
    let cfg = match cli.command {
        Sub::Scatter(a) => {
            let mut c = base(Command::Scatter, &a.common.config)?;
            apply_common(&mut c, &a.common, "scatter")?;
            if a.k_min.is_some() || a.k_max.is_some() || a.n_k.is_some() || !a.exclusions.is_empty() || a.radius.is_some() {
                let d = c.k_grid.clone().unwrap_or(KGrid { k_min: 0.2, k_max: 3.0, n: 200, exclusions: vec![1.0], radius: 1e-3 });
                c.k_grid = Some(KGrid {
                    k_min: a.k_min.unwrap_or(d.k_min),
                    k_max: a.k_max.unwrap_or(d.k_max),
                    n: a.n_k.unwrap_or(d.n),
                    exclusions: if a.exclusions.is_empty() { d.exclusions } else { a.exclusions },
                    radius: a.radius.unwrap_or(d.radius),
                });
            }
            c
        }
        Sub::Insert(a) => {
            let mut c = base(Command::Insert, &a.common.config)?;
            apply_common(&mut c, &a.common, "insert")?;
            if !a.states.is_empty() {
                c.states = a.states;
            }
            c
        }
        Sub::Remove(a) => {
            let mut c = base(Command::Remove, &a.common.config)?;
            apply_common(&mut c, &a.common, "remove")?;
            if a.input.is_some() {
                c.input = a.input;
            }
            if !a.omegas.is_empty() {
                c.states = a.omegas.iter().map(|&omega| StateConfig { omega, alpha: 1.0, r_at_omega: None }).collect();
            }
            c
        }
        Sub::Evolve(a) => {
            let mut c = base(Command::Evolve, &a.states.common.config)?;
            apply_common(&mut c, &a.states.common, "evolve")?;
            if !a.states.states.is_empty() {
                c.states = a.states.states;
            }
            if !a.times.is_empty() {
                c.time = Some(TimeConfig { t_values: a.times });
            }
            c
        }
        Sub::VerifyExample(a) => {
            let mut c = base(Command::VerifyExample, &a.config)?;
            let d = c.example.unwrap_or(ExampleParams { rho: 2.0, alpha: 1.0 });
            c.example = Some(ExampleParams { rho: a.rho.unwrap_or(d.rho), alpha: a.alpha.unwrap_or(d.alpha) });
            if let Some(o) = a.output {
                c.output = o;
            }
            if c.output.is_empty() {
                c.output = "verify-example".into();
            }
            c
        }
    };
    cfg.resolve()
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("DARBOUX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::invalid(format!("DARBOUX_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    Ok(())
}

fn fail(e: CliError) -> ExitCode {
    let body = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return fail(e);
    }
    let cfg = match build(cli) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match run::run(&cfg) {
        Ok(out) => {
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(e),
    }
}
