use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ionnet_core::heralding::{type2_herald, DetectionPattern, Qubit};
use ionnet_core::ion_crystal::monte_carlo::cross_section_mc;
use ionnet_core::ion_crystal::{
    equilibrium_positions, radiation_pattern, recoil_fidelity, DopplerParams, IonCrystal,
    ScatterGeometry,
};
use ionnet_core::light_collection::{
    fiber_overlap_numeric, optimize_focus, FiberMode, Jones, Paraboloid,
};
use ionnet_core::network::cluster_time;
use ionnet_core::{Amplitude, QubitKind};

fn equilibrium(c: &mut Criterion) {
    let mut g = c.benchmark_group("equilibrium");
    for n in [5, 20, 50, 100] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| equilibrium_positions(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn pattern(c: &mut Criterion) {
    let mut g = c.benchmark_group("radiation_pattern_2048");
    g.sample_size(10);
    for n in [3, 10, 30] {
        let crystal =
            IonCrystal::doppler_limited(n, 10.0, 600.0, DopplerParams::default()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &crystal, |b, crystal| {
            b.iter(|| radiation_pattern(crystal, 0.0, 2048))
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let crystal = IonCrystal::doppler_limited(5, 10.0, 600.0, DopplerParams::default()).unwrap();
    let geom = ScatterGeometry::new(0.0, 0.3);
    c.bench_function("cross_section_mc_n5_1e4", |b| {
        b.iter(|| cross_section_mc(&crystal, &geom, 10_000, black_box(1), 0))
    });
}

fn collection(c: &mut Criterion) {
    let fiber = FiberMode::new(1.0, Jones::left_circular()).unwrap();
    let mirror = Paraboloid::new(0.53, None).unwrap();
    c.bench_function("fiber_overlap_numeric", |b| {
        b.iter(|| fiber_overlap_numeric(1, black_box(&mirror), &fiber).unwrap())
    });
    c.bench_function("optimize_focus", |b| {
        b.iter(|| optimize_focus(1, black_box(&fiber), None).unwrap())
    });
}

fn scalar(c: &mut Criterion) {
    c.bench_function("recoil_fidelity", |b| {
        b.iter(|| recoil_fidelity(black_box(0.1), 5.0, 0.01, 1.0).unwrap())
    });
    c.bench_function("cluster_time", |b| {
        b.iter(|| cluster_time(black_box(1e3), 0.1, 0.1, 1e-6).unwrap())
    });
    let q = Qubit::new(Amplitude::new(0.6, 0.0), Amplitude::new(0.8, 0.0));
    let pattern = DetectionPattern::coincidence();
    c.bench_function("type2_herald_frequency", |b| {
        b.iter(|| type2_herald(black_box(q), q, QubitKind::Frequency, &pattern, None).unwrap())
    });
}

criterion_group!(
    benches,
    equilibrium,
    pattern,
    monte_carlo,
    collection,
    scalar
);
criterion_main!(benches);
