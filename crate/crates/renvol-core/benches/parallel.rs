//! Parallel vs sequential execution of the data-parallel inner loops:
//! ε-ladder volume rungs and the curvature-heavy interior quadrature.

use criterion::{criterion_group, criterion_main, Criterion};

use renvol_core::exec::ExecMode;
use renvol_core::gb;
use renvol_core::models::cap_family;
use renvol_core::series::LadderSpec;

fn bench_volume_ladder(c: &mut Criterion) {
    let cap = cap_family(0.2);
    let spec = LadderSpec::default();
    let mut group = c.benchmark_group("volume_ladder");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| gb::vol_half_ladder(&cap, &spec, ExecMode::Parallel).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| gb::vol_half_ladder(&cap, &spec, ExecMode::Sequential).unwrap())
    });
    group.finish();
}

fn bench_interior_quadrature(c: &mut Criterion) {
    let cap = cap_family(0.0);
    let mut group = c.benchmark_group("interior_curvature_integral");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| gb::interior_wq(&cap, 0.2, ExecMode::Parallel).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| gb::interior_wq(&cap, 0.2, ExecMode::Sequential).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_volume_ladder, bench_interior_quadrature);
criterion_main!(benches);
