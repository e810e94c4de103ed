//! End-to-end checks of the pipeline on the Wigner-von Neumann example against its closed forms.

use num_complex::Complex64 as c64;
use serde::Serialize;

use crate::darboux::{
    eigenfunction_norm, fit_discrepancy, insert_embedded, phi_n, remove_inserted, residue_of_psi_plus,
    DarbouxOptions, EmbeddedStateSpec,
};
use crate::error::Result;
use crate::grid::Grid;
use crate::kdv::{conservation_integrals, discretization_for, dyson_q, jost_evolved, EvolvedState};
use crate::potential::PotentialSpec;
use crate::scattering::{reflection_transmission, ResidueOptions, ScatterOptions};
use crate::schrodinger::right_jost;
use crate::wvn_oracle::{
    phi_closed, psi_plus_closed, q_plus1, q_seed, scattering_closed, tau, y_closed, ExampleParams,
};

/// One comparison against a closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rho: f64,
    pub alpha: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(out: &mut Vec<Check>, label: &str, value: f64, tolerance: f64) {
    out.push(Check { label: label.into(), value, tolerance, passed: value.is_finite() && value <= tolerance });
}

fn sup<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Runs every check for strength `rho` and normalization `alpha` of the inserted state at `k = 1`.
pub fn verify_example(params: &ExampleParams) -> Result<VerifyReport> {
    params.validate()?;
    let p = *params;
    let seed = PotentialSpec::wvn(p.rho);
    let mut c = Vec::new();

    let right: Vec<f64> = (0..=200).map(|i| 0.1 * i as f64).collect();
    check(&mut c, "seed vanishes on the right half-line", sup(right.iter().map(|&x| seed.eval(x).unwrap_or(f64::NAN).abs())), 0.0);

    let far: Vec<f64> = (0..=1000).map(|i| -1010.0 + 0.01 * i as f64).collect();
    check(
        &mut c,
        "seed decays like 4 sin(2x)/|x| on the left",
        sup(far.iter().map(|&x| (x * q_seed(&p, x) + 4.0 * (2.0 * x).sin()).abs())),
        2e-2,
    );

    let sgrid = Grid::new(-40.0, 1.0, 4101)?;
    let sopts = ScatterOptions::default();
    let mut r_err: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for &k in &[0.3, 0.7, 1.0, 1.5, 2.5, -0.8] {
        let (r, t) = reflection_transmission(&seed, k, &sgrid, &sopts)?;
        let (tc, rc, _) = scattering_closed(&p, c64::new(k, 0.0));
        r_err = r_err.max((r - rc).norm()).max((t - tc).norm());
        unit = unit.max((r.norm_sqr() + t.norm_sqr() - 1.0).abs());
    }
    check(&mut c, "reflection and transmission match the closed form", r_err, 1e-6);
    check(&mut c, "scattering matrix is unitary", unit, 1e-6);
    let (r1, _) = reflection_transmission(&seed, 1.0, &sgrid, &sopts)?;
    check(&mut c, "full reflection at k = 1", (r1.norm() - 1.0).abs(), 1e-6);

    let jgrid = Grid::new(-20.0, 1.0, 2101)?;
    let psi = right_jost(&seed, c64::new(0.7, 0.0), &jgrid, &sopts.ode)?;
    let mut jerr: f64 = 0.0;
    for (i, x) in jgrid.points().into_iter().enumerate() {
        jerr = jerr.max((psi.values[i] - psi_plus_closed(&p, x, 0.7)?).norm());
    }
    check(&mut c, "right Jost solution matches the closed form", jerr, 1e-6);

    let opts = DarbouxOptions::default();
    let state = EmbeddedStateSpec::new(1.0, p.alpha, c64::new(-1.0, 0.0))?;
    let ggrid = Grid::new(-30.0, 10.0, 4001)?;
    let phi = phi_n(&seed, &state, &ggrid, &opts)?;
    check(
        &mut c,
        "generator matches 2 sin x / tau",
        sup(ggrid.points().into_iter().enumerate().map(|(i, x)| (phi.values[i] - phi_closed(&p, x)).abs())),
        1e-6,
    );

    let out = Grid::new(-20.0, 20.0, 4001)?;
    let r = insert_embedded(&seed, &[state], &out, &opts)?;
    let i0 = r.grid.index_of(0.0).expect("0 is a node") + r.offset;
    check(
        &mut c,
        "Gram entry at the origin equals 2 alpha^2 / rho",
        (r.stages[0].gram.entry(i0, 0, 0) - 2.0 * p.alpha * p.alpha / p.rho).abs(),
        1e-8,
    );
    let q = r.q_new_out();
    let xs = r.grid.points();
    check(&mut c, "inserted potential matches the closed form", sup(xs.iter().enumerate().map(|(i, &x)| (q[i] - q_plus1(&p, x)).abs())), 1e-6);
    let y = r.y_out(0)?;
    check(&mut c, "inserted eigenfunction matches the closed form", sup(xs.iter().enumerate().map(|(i, &x)| (y.values[i] + y_closed(&p, x)).abs())), 1e-7);
    check(&mut c, "inserted eigenfunction has unit norm", (eigenfunction_norm(&r, 0)? - 1.0).abs(), 1e-6);
    let (_, rnorm) = residue_of_psi_plus(&r, 0, 150.0, &ResidueOptions { delta0: 1e-3, ..Default::default() })?;
    check(&mut c, "residue of the Jost solution at k = 1 has norm alpha", (rnorm - p.alpha).abs(), 1e-4);
    let back = remove_inserted(&r)?;
    check(
        &mut c,
        "removal recovers the seed",
        sup(back.q_new.iter().zip(r.q_seed_out()).map(|(a, b)| (a - b).abs())),
        1e-6,
    );

    let sym = ExampleParams::symmetric(p.rho);
    let ssym = EmbeddedStateSpec::new(1.0, sym.alpha, c64::new(-1.0, 0.0))?;
    let rs = insert_embedded(&seed, &[ssym], &out, &opts)?;
    check(
        &mut c,
        "symmetric normalization gives an even potential",
        sup(xs.iter().enumerate().map(|(i, &x)| (rs.q_new_out()[i] - crate::wvn_oracle::q_sym(p.rho, x)).abs())),
        1e-6,
    );

    let tail: Vec<f64> = (0..=18000).map(|i| 20.0 + 0.01 * i as f64).collect();
    let d: Vec<f64> = tail.iter().map(|&x| q_seed(&p, x) - q_plus1(&p, x)).collect();
    let (amp, delta) = fit_discrepancy(&tail, &d, 1.0);
    check(&mut c, "right-tail discrepancy has amplitude 4", (amp - 4.0).abs(), 0.4);
    check(&mut c, "right-tail discrepancy has zero phase", delta.abs(), 0.1);

    let st = EvolvedState::new(p.rho, 0.0, discretization_for(0.0))?;
    let pts: Vec<f64> = (0..=30).map(|i| -15.0 + i as f64).collect();
    let mut ld: f64 = 0.0;
    let mut dq: f64 = 0.0;
    let mut je: f64 = 0.0;
    for &x in &pts {
        dq = dq.max((dyson_q(&st, x)? - q_seed(&p, x)).abs());
        if x <= 0.0 {
            ld = ld.max((st.log_det(x)? - tau(&p, x).ln()).abs());
            let (v, _) = jost_evolved(&st, x, c64::new(0.7, 0.0))?;
            je = je.max((v - psi_plus_closed(&p, x, 0.7)?).norm());
        }
    }
    check(&mut c, "Fredholm determinant equals tau on the left at t = 0", ld, 1e-6);
    check(&mut c, "determinant formula recovers the seed at t = 0", dq, 1e-8);
    check(&mut c, "kernel Jost solution matches the closed form at t = 0", je, 1e-6);

    let cons = conservation_integrals(&p, 200.0)?;
    check(&mut c, "mass is unchanged by insertion", cons.mass_change.abs(), 5e-2);
    check(&mut c, "energy is unchanged by insertion", cons.energy_change.abs(), 5e-2);

    Ok(VerifyReport { rho: p.rho, alpha: p.alpha, checks: c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_passes() {
        let rep = verify_example(&ExampleParams { rho: 2.0, alpha: 1.0 }).unwrap();
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
