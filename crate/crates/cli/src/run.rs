//! Pipelines behind the subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use darboux_core::darboux::{insert_embedded, remove_embedded, EmbeddedEigenpair};
use darboux_core::kdv::{discretization_for, q_plus_evolved, EvolvedInsertionOptions, EvolvedState};
use darboux_core::scattering::sample_scattering;
use darboux_core::verify::{verify_example, VerifyReport};
use darboux_core::wave::fmt17;
use darboux_core::{Grid, PotentialKind, RealField};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::CliError;

/// Outcome of a successful run.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// False when `verify-example` found a failing check.
    pub passed: bool,
}

fn path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

fn create(p: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::invalid(format!("cannot create {}: {e}", dir.display())))?;
    }
    let f = File::create(p).map_err(|e| CliError::invalid(format!("cannot create {}: {e}", p.display())))?;
    Ok(BufWriter::new(f))
}

fn write_meta(cfg: &RunConfig, diagnostics: Value, p: &Path) -> Result<(), CliError> {
    let meta = json!({
        "config": cfg,
        "versions": { "darboux": env!("CARGO_PKG_VERSION") },
        "diagnostics": diagnostics,
    });
    let mut w = create(p)?;
    serde_json::to_writer_pretty(&mut w, &meta).map_err(|e| CliError::io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Runs a resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let csv = path(&cfg.output, ".csv");
    let meta = path(&cfg.output, ".meta.json");
    let mut files = vec![csv.clone(), meta.clone()];
    let mut passed = true;
    let diagnostics = match cfg.command {
        Command::Scatter => scatter(cfg, &csv)?,
        Command::Insert => {
            let eigen = path(&cfg.output, ".eigen.csv");
            let d = insert(cfg, &csv, &eigen)?;
            files.push(eigen);
            d
        }
        Command::Remove => remove(cfg, &csv)?,
        Command::Evolve => evolve(cfg, &csv)?,
        Command::VerifyExample => {
            let rep = verify_example(cfg.example.as_ref().expect("resolved"))?;
            print_table(&rep);
            write_report(&rep, &csv)?;
            passed = rep.all_passed();
            json!({ "all_passed": passed })
        }
    };
    write_meta(cfg, diagnostics, &meta)?;
    Ok(RunOutcome { files, passed })
}

fn scatter(cfg: &RunConfig, csv: &Path) -> Result<Value, CliError> {
    let p = cfg.potential()?;
    let data = sample_scattering(p, cfg.k_grid.as_ref().expect("resolved"), &cfg.grid()?, &cfg.scatter_options())?;
    let mut w = create(csv)?;
    writeln!(w, "k,R_re,R_im,T_re,T_im")?;
    let (tr, ti) = (data.t_re.as_ref().expect("sampled"), data.t_im.as_ref().expect("sampled"));
    let mut unitarity: f64 = 0.0;
    for i in 0..data.k_grid.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(data.k_grid[i]),
            fmt17(data.r_re[i]),
            fmt17(data.r_im[i]),
            fmt17(tr[i]),
            fmt17(ti[i])
        )?;
        let s = data.r_re[i].powi(2) + data.r_im[i].powi(2) + tr[i].powi(2) + ti[i].powi(2);
        unitarity = unitarity.max((s - 1.0).abs());
    }
    w.flush()?;
    Ok(json!({ "n_k": data.k_grid.len(), "max_unitarity_defect": unitarity }))
}

fn insert(cfg: &RunConfig, csv: &Path, eigen: &Path) -> Result<Value, CliError> {
    let r = insert_embedded(cfg.potential()?, &cfg.states()?, &cfg.grid()?, &cfg.darboux_options())?;
    let mut w = create(csv)?;
    r.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(eigen)?;
    let mut head = String::from("x,q");
    for n in 1..=r.n_states() {
        head.push_str(&format!(",y_{n},dy_{n}"));
    }
    writeln!(w, "{head}")?;
    for i in 0..r.work_grid.n_points {
        let mut line = format!("{},{}", fmt17(r.work_grid.x(i)), fmt17(r.q_new[i]));
        for y in &r.ys {
            line.push_str(&format!(",{},{}", fmt17(y.values[i]), fmt17(y.derivs[i])));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(r.metadata())
}

/// Columns `x, q, y_1, dy_1, ..., y_N, dy_N` on a uniform grid.
struct EigenTable {
    grid: Grid,
    q: Vec<f64>,
    ys: Vec<(Vec<f64>, Vec<f64>)>,
}

fn read_eigen_table(p: &Path) -> Result<EigenTable, CliError> {
    let bad = |m: String| CliError::invalid(format!("{}: {m}", p.display()));
    let mut rd = csv::Reader::from_path(p).map_err(|e| bad(e.to_string()))?;
    let head = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if head.len() < 2 || &head[0] != "x" || &head[1] != "q" || head.len() % 2 != 0 {
        return Err(bad("expected columns x,q,y_1,dy_1,...".into()));
    }
    let n = (head.len() - 2) / 2;
    let (mut xs, mut q) = (Vec::new(), Vec::new());
    let mut ys = vec![(Vec::new(), Vec::new()); n];
    for rec in rd.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| bad(format!("{s}: {e}"))))
            .collect::<Result<_, _>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(bad("non-finite entry".into()));
        }
        xs.push(v[0]);
        q.push(v[1]);
        for m in 0..n {
            ys[m].0.push(v[2 + 2 * m]);
            ys[m].1.push(v[3 + 2 * m]);
        }
    }
    if xs.len() < 2 {
        return Err(bad("fewer than two rows".into()));
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let h = grid.spacing();
    if xs.iter().enumerate().any(|(i, &x)| (x - grid.x(i)).abs() > 1e-9 * h.max(1.0)) {
        return Err(bad("x column is not uniform".into()));
    }
    Ok(EigenTable { grid, q, ys })
}

fn remove(cfg: &RunConfig, csv: &Path) -> Result<Value, CliError> {
    let table = read_eigen_table(cfg.input.as_ref().expect("resolved"))?;
    let out = cfg.grid()?;
    if table.ys.len() != cfg.states.len() {
        return Err(CliError::invalid(format!(
            "input carries {} eigenfunctions but {} states were given",
            table.ys.len(),
            cfg.states.len()
        )));
    }
    let off = table.grid.index_of(out.x_min).ok_or(darboux_core::Error::MismatchedGrids)?;
    if off + out.n_points > table.grid.n_points || (table.grid.spacing() - out.spacing()).abs() > 1e-12 * out.spacing() {
        return Err(darboux_core::Error::MismatchedGrids.into());
    }
    let q_in = &table.q[off..off + out.n_points];
    let (q_new, log_det, orth) = if table.ys.is_empty() {
        (q_in.to_vec(), vec![0.0; out.n_points], 0.0)
    } else {
        let pairs = cfg
            .states
            .iter()
            .zip(table.ys)
            .map(|(s, (v, d))| Ok(EmbeddedEigenpair { omega: s.omega, field: RealField::new(table.grid, v, d, s.omega)? }))
            .collect::<Result<Vec<_>, CliError>>()?;
        let r = remove_embedded(&table.q, &pairs, &out, &cfg.darboux_options())?;
        (r.q_new, r.log_det, r.orthonormality_error)
    };
    let mut w = create(csv)?;
    writeln!(w, "x,q,q_new,log_det")?;
    for i in 0..out.n_points {
        writeln!(w, "{},{},{},{}", fmt17(out.x(i)), fmt17(q_in[i]), fmt17(q_new[i]), fmt17(log_det[i]))?;
    }
    w.flush()?;
    Ok(json!({ "orthonormality_error": orth }))
}

fn evolve(cfg: &RunConfig, csv: &Path) -> Result<Value, CliError> {
    let grid = cfg.grid()?;
    let states = cfg.states()?;
    let opts = EvolvedInsertionOptions::default();
    let mut w = create(csv)?;
    writeln!(w, "x,t,q,q_plus")?;
    let mut diag = Vec::new();
    for &t in &cfg.time.as_ref().expect("resolved").t_values {
        let disc = discretization_for(t);
        let st = match cfg.potential()?.kind {
            PotentialKind::WvnExample { rho } => EvolvedState::new(rho, t, disc)?,
            _ => EvolvedState::free(t, disc)?,
        };
        let ins = q_plus_evolved(&st, &states, &grid, &opts)?;
        for i in 0..grid.n_points {
            writeln!(w, "{},{},{},{}", fmt17(grid.x(i)), fmt17(t), fmt17(ins.q[i]), fmt17(ins.q_plus[i]))?;
        }
        diag.push(json!({
            "t": t,
            "discretization": disc,
            "gram_imag": ins.gram_imag,
            "min_log_det": ins.log_det.iter().cloned().fold(f64::INFINITY, f64::min),
        }));
    }
    w.flush()?;
    Ok(json!({ "times": diag, "options": opts }))
}

fn print_table(rep: &VerifyReport) {
    let width = rep.checks.iter().map(|c| c.label.len()).max().unwrap_or(0);
    println!("rho = {}, alpha = {}", rep.rho, rep.alpha);
    for c in &rep.checks {
        println!(
            "{:<width$}  {:>10.3e}  <= {:<8.1e}  {}",
            c.label,
            c.value,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
}

fn write_report(rep: &VerifyReport, csv: &Path) -> Result<(), CliError> {
    let mut w = create(csv)?;
    writeln!(w, "check,value,tolerance,passed")?;
    for c in &rep.checks {
        writeln!(w, "\"{}\",{},{},{}", c.label, fmt17(c.value), fmt17(c.tolerance), c.passed)?;
    }
    w.flush()?;
    Ok(())
}
