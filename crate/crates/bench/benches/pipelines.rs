use criterion::{black_box, criterion_group, criterion_main, Criterion};
use darboux_bench::{example_state, output_grid};
use darboux_core::darboux::{insert_embedded, remove_inserted, DarbouxOptions};
use darboux_core::kdv::{discretization_for, dyson_q, q_plus_evolved, EvolvedInsertionOptions, EvolvedState};
use darboux_core::scattering::{reflection_transmission, ScatterOptions};
use darboux_core::{Grid, PotentialSpec};

fn scattering(c: &mut Criterion) {
    let seed = PotentialSpec::wvn(2.0);
    let grid = Grid::new(-40.0, 1.0, 4101).unwrap();
    let opts = ScatterOptions::default();
    c.bench_function("reflection at one momentum", |b| {
        b.iter(|| reflection_transmission(&seed, black_box(0.7), &grid, &opts).unwrap())
    });
}

fn darboux(c: &mut Criterion) {
    let seed = PotentialSpec::wvn(2.0);
    let opts = DarbouxOptions::default();
    let grid = output_grid();
    let mut g = c.benchmark_group("darboux");
    g.sample_size(10);
    g.bench_function("insert one state", |b| {
        b.iter(|| insert_embedded(&seed, &[example_state(1.0)], &grid, &opts).unwrap())
    });
    let r = insert_embedded(&seed, &[example_state(1.0)], &grid, &opts).unwrap();
    g.bench_function("remove one state", |b| b.iter(|| remove_inserted(&r).unwrap()));
    g.finish();
}

fn kdv(c: &mut Criterion) {
    let mut g = c.benchmark_group("kdv");
    g.sample_size(10);
    for t in [0.0, 0.02] {
        g.bench_function(format!("determinant solve at t = {t}"), |b| {
            b.iter_with_setup(
                || EvolvedState::new(2.0, t, discretization_for(t)).unwrap(),
                |st| dyson_q(&st, black_box(-3.0)).unwrap(),
            )
        });
    }
    let st = EvolvedState::new(2.0, 0.02, discretization_for(0.02)).unwrap();
    let grid = Grid::new(-5.0, 5.0, 41).unwrap();
    g.bench_function("evolved insertion on 41 points", |b| {
        b.iter(|| {
            let fresh = EvolvedState::new(2.0, st.t, st.disc).unwrap();
            q_plus_evolved(&fresh, &[example_state(1.0)], &grid, &EvolvedInsertionOptions::default()).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, scattering, darboux, kdv);
criterion_main!(benches);
