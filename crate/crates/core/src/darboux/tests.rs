use super::*;
use crate::wvn_oracle::{self, bound_state, i_closed, phi_closed, q_plus1, y_closed, ExampleParams};

fn wvn_state(alpha: f64) -> EmbeddedStateSpec {
    EmbeddedStateSpec::new(1.0, alpha, c64::new(-1.0, 0.0)).unwrap()
}

fn out_grid() -> Grid {
    Grid::new(-20.0, 20.0, 4001).unwrap()
}

#[test]
fn sqrt_branch() {
    assert!((wvn_state(1.0).sqrt_r() - c64::new(0.0, 1.0)).norm() < 1e-15);
    let s = EmbeddedStateSpec::new(1.0, 1.0, c64::from_polar(1.0, 3.0)).unwrap();
    assert!((s.sqrt_r() - c64::from_polar(1.0, 1.5)).norm() < 1e-15);
}

#[test]
fn state_validation() {
    assert!(matches!(
        EmbeddedStateSpec::new(1.0, 1.0, c64::new(0.5, 0.0)),
        Err(Error::NotResonant { .. })
    ));
    assert!(EmbeddedStateSpec::new(1.0, 0.0, c64::new(-1.0, 0.0)).is_err());
    let s = wvn_state(1.0);
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[s, s], &out_grid(), &DarbouxOptions::default());
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}

#[test]
fn non_resonant_momentum_is_rejected() {
    let s = EmbeddedStateSpec::new(2.0, 1.0, c64::new(-1.0, 0.0)).unwrap();
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[s], &out_grid(), &DarbouxOptions::default());
    assert!(matches!(r, Err(Error::NotResonant { .. })), "{r:?}");
}

#[test]
fn generator_matches_closed_form() {
    let p = ExampleParams { rho: 2.0, alpha: 1.0 };
    let g = Grid::new(-30.0, 10.0, 4001).unwrap();
    let phi = phi_n(&PotentialSpec::wvn(2.0), &wvn_state(1.0), &g, &DarbouxOptions::default()).unwrap();
    for (i, x) in g.points().into_iter().enumerate() {
        assert!((phi.values[i] - phi_closed(&p, x)).abs() < 1e-6, "x={x}");
        if x >= 0.0 {
            assert!((phi.values[i] - 2.0 * x.sin()).abs() < 1e-12);
        }
    }
}

#[test]
fn gram_matches_closed_form() {
    for &(rho, alpha) in &[(2.0, 1.0), (0.5, 2.0)] {
        let p = ExampleParams { rho, alpha };
        let r = insert_embedded(&PotentialSpec::wvn(rho), &[wvn_state(alpha)], &out_grid(), &DarbouxOptions::default())
            .unwrap();
        let gram = &r.stages[0].gram;
        let mut worst: f64 = 0.0;
        for i in 0..r.grid.n_points {
            let x = r.grid.x(i);
            let g = gram.entry(i + r.offset, 0, 0);
            worst = worst.max((g - alpha * alpha * i_closed(&p, x)).abs());
        }
        assert!(worst < 1e-8, "rho={rho}: {worst}");
        let i0 = r.grid.index_of(0.0).unwrap() + r.offset;
        assert!((gram.entry(i0, 0, 0) - alpha * alpha * 2.0 / rho).abs() < 1e-8);
        assert!(gram.entry(0, 0, 0) < 0.1 * gram.entry(i0, 0, 0));
    }
}

#[test]
fn single_insertion_reproduces_closed_form() {
    for &alpha in &[1.0, 0.5, 2.0f64.sqrt() / 2.0 * 2.0f64.sqrt()] {
        let p = ExampleParams { rho: 2.0, alpha };
        let r = insert_embedded(&PotentialSpec::wvn(2.0), &[wvn_state(alpha)], &out_grid(), &DarbouxOptions::default())
            .unwrap();
        let q = r.q_new_out();
        let mut worst: f64 = 0.0;
        for (i, x) in r.grid.points().into_iter().enumerate() {
            worst = worst.max((q[i] - q_plus1(&p, x)).abs());
        }
        assert!(worst < 1e-6, "alpha={alpha}: {worst}");
        let y = r.y_out(0).unwrap();
        for (i, x) in r.grid.points().into_iter().enumerate() {
            assert!((y.values[i] + y_closed(&p, x)).abs() < 1e-7);
        }
        let norm = eigenfunction_norm(&r, 0).unwrap();
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
        assert!(eigen_residual(&r, 0) < 1e-4);
        assert!(jacobi_check(&r) < 1e-6);
        assert!(second_derivative_check(&r) < 1e-4);
    }
}

#[test]
fn empty_insertion_is_identity() {
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[], &out_grid(), &DarbouxOptions::default()).unwrap();
    assert_eq!(r.q_new_out(), r.q_seed_out());
    let c = chain_insert(&PotentialSpec::wvn(2.0), &[], &out_grid(), &DarbouxOptions::default()).unwrap();
    assert_eq!(c.q_new, r.q_new);
}

fn synthetic(omegas: &[f64], alphas: &[f64], x0: f64) -> Vec<EmbeddedStateSpec> {
    omegas
        .iter()
        .zip(alphas)
        .map(|(&w, &a)| {
            let c = c64::from_polar(1.0, -w * x0 - std::f64::consts::FRAC_PI_2);
            EmbeddedStateSpec::new(w, a, c * c).unwrap()
        })
        .collect()
}

#[test]
fn chain_equals_direct_on_synthetic_generators() {
    let x0 = -5.0;
    let grid = Grid::new(x0, 15.0, 2001).unwrap();
    let opts = DarbouxOptions { base: GramBase::Point(x0), check_resonance: false, ..Default::default() };
    let states = synthetic(&[0.7, 1.3], &[0.8, 1.1], x0);
    let direct = insert_embedded(&PotentialSpec::zero(), &states, &grid, &opts).unwrap();
    let chain = chain_insert(&PotentialSpec::zero(), &states, &grid, &opts).unwrap();
    // generators are +-2 sin(omega (x - x0))
    let phi = &direct.phis[0];
    for (i, x) in phi.grid.points().into_iter().enumerate().step_by(97) {
        assert!((phi.values[i].abs() - (2.0 * (0.7 * (x - x0)).sin()).abs()).abs() < 1e-12);
    }
    let (a, b) = (direct.q_new_out(), chain.q_new_out());
    let worst = a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
    let ld = direct.log_det_out().iter().zip(chain.log_det_out()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(ld < 1e-8, "{ld}");
    for n in 0..2 {
        let (ya, yb) = (direct.y_out(n).unwrap(), chain.y_out(n).unwrap());
        let d = ya.values.iter().zip(&yb.values).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(d < 1e-8, "y_{n}: {d}");
        assert!(eigen_residual(&direct, n) < 1e-4);
    }
    let single = insert_embedded(&PotentialSpec::zero(), &states[..1], &grid, &opts).unwrap();
    let single_chain = chain_insert(&PotentialSpec::zero(), &states[..1], &grid, &opts).unwrap();
    assert_eq!(single.q_new, single_chain.q_new);
}

#[test]
fn removal_round_trip() {
    for &(rho, alpha) in &[(2.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
        let r = insert_embedded(&PotentialSpec::wvn(rho), &[wvn_state(alpha)], &out_grid(), &DarbouxOptions::default())
            .unwrap();
        let back = remove_inserted(&r).unwrap();
        let worst = back.q_new.iter().zip(r.q_seed_out()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "rho={rho} alpha={alpha}: {worst}");
        assert!(back.orthonormality_error < 1e-6);
    }
}

#[test]
fn removal_from_symmetric_closed_form() {
    let rho = 2.0;
    let p = ExampleParams::symmetric(rho);
    let out = out_grid();
    let (g, _) = out.extended(-420.0, 420.0);
    let xs = g.points();
    let q: Vec<f64> = xs.iter().map(|&x| wvn_oracle::q_sym(rho, x)).collect();
    let (v, d): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| wvn_oracle::y_closed_derivs(&p, x)).unzip();
    let pair = EmbeddedEigenpair { omega: 1.0, field: RealField::new(g, v, d, 1.0).unwrap() };
    let back = remove_embedded(&q, &[pair], &out, &DarbouxOptions::default()).unwrap();
    for (i, x) in out.points().into_iter().enumerate() {
        assert!((back.q_new[i] - wvn_oracle::q_seed(&p, x)).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn removal_rejects_non_normalized_input() {
    let p = ExampleParams::symmetric(2.0);
    let out = out_grid();
    let (g, _) = out.extended(-420.0, 420.0);
    let xs = g.points();
    let q: Vec<f64> = xs.iter().map(|&x| wvn_oracle::q_sym(2.0, x)).collect();
    let (v, d): (Vec<f64>, Vec<f64>) =
        xs.iter().map(|&x| wvn_oracle::y_closed_derivs(&p, x)).map(|(a, b)| (1.1 * a, 1.1 * b)).unzip();
    let pair = EmbeddedEigenpair { omega: 1.0, field: RealField::new(g, v, d, 1.0).unwrap() };
    assert!(matches!(
        remove_embedded(&q, &[pair], &out, &DarbouxOptions::default()),
        Err(Error::NotOrthonormal(_))
    ));
}

#[test]
fn residue_and_pole_condition() {
    for &alpha in &[1.0, 0.5] {
        let r = insert_embedded(&PotentialSpec::wvn(2.0), &[wvn_state(alpha)], &out_grid(), &DarbouxOptions::default())
            .unwrap();
        let (_, norm) =
            residue_of_psi_plus(&r, 0, 150.0, &ResidueOptions { delta0: 1e-3, ..Default::default() }).unwrap();
        assert!((norm - alpha).abs() < 1e-4, "alpha={alpha}: {norm}");
        let dev = embedded_pole_condition(&r, 0, &ResidueOptions::default()).unwrap();
        assert!(dev < 1e-4, "{dev}");
    }
}

#[test]
fn transformed_jost_matches_closed_form() {
    let p = ExampleParams { rho: 2.0, alpha: 0.7 };
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[wvn_state(0.7)], &out_grid(), &DarbouxOptions::default())
        .unwrap();
    for &k in &[c64::new(0.5, 0.0), c64::new(2.0, 0.3), c64::new(1.7, 0.0)] {
        let (phi, psi) = transformed_solutions(&r, k, None).unwrap();
        for (i, x) in r.grid.points().into_iter().enumerate() {
            if x >= 0.0 {
                let c = wvn_oracle::psi_plus1_closed(&p, x, k).unwrap();
                assert!((psi.values[i] - c).norm() < 1e-6 * (1.0 + c.norm()), "k={k} x={x}");
            }
        }
        for x in [-15.0, -3.0, 0.0, 7.0] {
            let w = crate::wave::wronskian(&phi, &psi, x).unwrap();
            assert!((w - 2.0 * c64::new(0.0, 1.0) * k).norm() < 1e-6, "k={k} x={x}: {w}");
        }
    }
    assert!(matches!(
        transformed_solutions(&r, c64::new(1.0, 0.0), None),
        Err(Error::PoleEvaluation { .. })
    ));
}

#[test]
fn isolated_pole_is_preserved() {
    let p = ExampleParams { rho: 2.0, alpha: 1.0 };
    let (kappa, c2) = bound_state(&p);
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[wvn_state(1.0)], &out_grid(), &DarbouxOptions::default())
        .unwrap();
    let ok = check_isolated_pole_preservation(&r, kappa, c2).unwrap();
    assert!(ok.passed, "{ok:?}");
    let bad = check_isolated_pole_preservation(&r, kappa, 1.1 * c2).unwrap();
    assert!(!bad.passed);
    let base = insert_embedded(&PotentialSpec::wvn(2.0), &[], &out_grid(), &DarbouxOptions::default()).unwrap();
    assert!(check_isolated_pole_preservation(&base, kappa, c2).unwrap().passed);
}

#[test]
fn discrepancy_envelope() {
    let p = ExampleParams { rho: 2.0, alpha: 1.0 };
    let xs: Vec<f64> = (0..=18000).map(|i| 20.0 + i as f64 * 0.01).collect();
    let d: Vec<f64> = xs.iter().map(|&x| wvn_oracle::q_seed(&p, x) - q_plus1(&p, x)).collect();
    let (a, delta) = fit_discrepancy(&xs, &d, 1.0);
    assert!((a - 4.0).abs() < 0.4 && delta.abs() < 0.1, "A={a} delta={delta}");
}

#[test]
fn csv_and_metadata() {
    let r = insert_embedded(&PotentialSpec::wvn(2.0), &[wvn_state(1.0)], &Grid::new(-1.0, 1.0, 5).unwrap(), &DarbouxOptions::default())
        .unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert!(s.starts_with("x,q_seed,q_new,log_det,y_1\n"));
    assert_eq!(s.lines().count(), 6);
    let m = r.metadata();
    assert_eq!(m["states"][0]["omega"], 1.0);
}
