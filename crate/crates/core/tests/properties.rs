use darboux_core::darboux::{insert_embedded, remove_inserted, DarbouxOptions, EmbeddedStateSpec};
use darboux_core::kdv::{discretization_for, dyson_q, EvolvedState};
use darboux_core::scattering::{reflection_transmission, KGrid, ScatterOptions};
use darboux_core::schrodinger::{left_jost, right_jost};
use darboux_core::wave::fmt17;
use darboux_core::wvn_oracle::{i_closed, q_plus1, q_seed, scattering_closed, tau};
use darboux_core::{wronskian, Complex64, ExampleParams, Grid, OdeTolerances, PotentialSpec};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ExampleParams> {
    (0.1f64..5.0, 0.2f64..3.0).prop_map(|(rho, alpha)| ExampleParams { rho, alpha })
}

proptest! {
    #[test]
    fn tau_is_even_and_at_least_one(p in params(), x in -200.0f64..200.0) {
        let t = tau(&p, x);
        prop_assert!(t >= 1.0);
        prop_assert_eq!(t, tau(&p, -x));
    }

    #[test]
    fn closed_scattering_is_unitary(p in params(), k in -6.0f64..6.0) {
        prop_assume!(k.abs() > 1e-6);
        let (t, r, _) = scattering_closed(&p, Complex64::new(k, 0.0));
        prop_assert!(r.norm() <= 1.0 + 1e-14);
        prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
        let (_, rm, _) = scattering_closed(&p, Complex64::new(-k, 0.0));
        prop_assert!((rm - r.conj()).norm() < 1e-12);
    }

    #[test]
    fn gram_is_positive_and_increasing(p in params(), x in -100.0f64..100.0, dx in 0.0f64..5.0) {
        let (a, b) = (i_closed(&p, x), i_closed(&p, x + dx));
        prop_assert!(a > 0.0);
        prop_assert!(b >= a * (1.0 - 1e-14));
    }

    #[test]
    fn inserted_potential_is_bounded(p in params(), x in -50.0f64..50.0) {
        let q = q_plus1(&p, x);
        prop_assert!(q.is_finite());
        prop_assert!(q.abs() <= 2.0 * q_seed(&p, x).abs() + 8.0 * p.rho.max(1.0) + 8.0 / (p.alpha * p.alpha));
    }

    #[test]
    fn formatted_numbers_round_trip(v in proptest::num::f64::NORMAL) {
        prop_assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn grid_nodes_are_found(lo in -50.0f64..0.0, len in 0.5f64..50.0, n in 2usize..2000, frac in 0.0f64..1.0) {
        let g = Grid::new(lo, lo + len, n).unwrap();
        let i = ((n - 1) as f64 * frac) as usize;
        prop_assert_eq!(g.index_of(g.x(i)), Some(i));
    }

    #[test]
    fn momentum_grid_honours_exclusions(c in 0.3f64..2.9, r in 1e-4f64..0.1, n in 2usize..400) {
        let kg = KGrid { k_min: 0.2, k_max: 3.0, n, exclusions: vec![c], radius: r };
        let ks = kg.points().unwrap();
        prop_assert!(ks.iter().all(|k| (k - c).abs() > r && *k != 0.0));
        prop_assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wronskian_is_constant_and_matches_transmission(rho in 0.2f64..4.0, k in 0.15f64..3.0) {
        prop_assume!((k - 1.0).abs() > 1e-3);
        let spec = PotentialSpec::wvn(rho);
        let grid = Grid::new(-30.0, 1.0, 3101).unwrap();
        let tol = OdeTolerances { rtol: 1e-12, atol: 1e-14, ..OdeTolerances::default() };
        let kc = Complex64::new(k, 0.0);
        let psi = right_jost(&spec, kc, &grid, &tol).unwrap();
        let left = left_jost(&spec, kc, &grid, &tol).unwrap();
        let w0 = wronskian(&left.field, &psi, -25.0).unwrap();
        for x in [-12.5, -3.0, 0.0, 0.9] {
            let w = wronskian(&left.field, &psi, x).unwrap();
            prop_assert!((w - w0).norm() < 1e-7 * (1.0 + w0.norm()), "x = {x}");
        }
        let (r, t) = reflection_transmission(&spec, k, &grid, &ScatterOptions::default()).unwrap();
        prop_assert!(r.norm() <= 1.0 + 1e-8);
        prop_assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn insertion_and_removal_match_closed_forms(alpha in 0.3f64..2.5, rho in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let p = ExampleParams { rho, alpha };
        let state = EmbeddedStateSpec::new(1.0, alpha, Complex64::new(-1.0, 0.0)).unwrap();
        let grid = Grid::new(-10.0, 10.0, 1001).unwrap();
        let r = insert_embedded(&PotentialSpec::wvn(rho), &[state], &grid, &DarbouxOptions::default()).unwrap();
        for (i, x) in grid.points().into_iter().enumerate() {
            prop_assert!((r.q_new_out()[i] - q_plus1(&p, x)).abs() < 1e-6, "x = {x}");
            prop_assert!(r.log_det_out()[i] >= 0.0);
        }
        let back = remove_inserted(&r).unwrap();
        let worst = back.q_new.iter().zip(r.q_seed_out()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn determinant_formula_recovers_the_seed(rho in 0.3f64..4.0, x in -15.0f64..15.0) {
        let st = EvolvedState::new(rho, 0.0, discretization_for(0.0)).unwrap();
        let p = ExampleParams { rho, alpha: 1.0 };
        prop_assert!((dyson_q(&st, x).unwrap() - q_seed(&p, x)).abs() < 1e-6);
        if x <= 0.0 {
            prop_assert!((st.log_det(x).unwrap() - tau(&p, x).ln()).abs() < 1e-5);
        }
    }
}
