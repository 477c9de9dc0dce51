use criterion::{black_box, criterion_group, criterion_main, Criterion};
use perculab_bench::{random_family, random_t};
use perculab_core::dynamics::{step_q, step_t, BoundaryMode, PairingScheme};
use perculab_core::geometry::family_distance;
use perculab_core::topology::{boundaries, stability_certificates, DEFAULT_SEARCH_RADIUS};

fn dynamics(c: &mut Criterion) {
    let t = random_t(128, 1);
    c.bench_function("step_t radius 128", |b| b.iter(|| step_t(black_box(&t), BoundaryMode::FrozenRing).unwrap()));
    let p = PairingScheme::default();
    c.bench_function("step_q radius 128", |b| b.iter(|| step_q(black_box(&t), &p, BoundaryMode::FrozenRing).unwrap()));
}

fn topology(c: &mut Criterion) {
    let t = random_t(64, 2);
    c.bench_function("boundaries radius 64", |b| b.iter(|| boundaries(black_box(&t)).unwrap()));
    c.bench_function("certificates radius 64", |b| {
        b.iter(|| stability_certificates(black_box(&t), None, DEFAULT_SEARCH_RADIUS))
    });
}

fn geometry(c: &mut Criterion) {
    let f0 = random_family(16, 3);
    let f1 = random_family(16, 4);
    let step = 0.25 / 16.0;
    let mut g = c.benchmark_group("family_distance");
    g.sample_size(10);
    g.bench_function("radius 16, unrelated seeds", |b| b.iter(|| family_distance(&f0, &f1, step).unwrap()));
    g.finish();
}

criterion_group!(benches, dynamics, topology, geometry);
criterion_main!(benches);
