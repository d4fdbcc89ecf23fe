use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use planar_squeeze::bec::{ground_state, BecParams};
use planar_squeeze::bound::{cj_direct, cj_exact, DEFAULT_TOL};
use planar_squeeze::entanglement::{s2, werner_state, SignConfig, WernerParams};
use planar_squeeze::interferometer::JxEigenbasis;
use planar_squeeze::SpinQuantumNumber;

fn exact_bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("cj_exact");
    for j in [5u32, 50, 500] {
        let spin = SpinQuantumNumber::from_two_j(2 * j);
        group.bench_with_input(BenchmarkId::from_parameter(j), &spin, |b, &s| {
            b.iter(|| cj_exact(black_box(s), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn direct_bound(c: &mut Criterion) {
    let spin = SpinQuantumNumber::from_two_j(20);
    c.bench_function("cj_direct/10", |b| {
        b.iter(|| cj_direct(black_box(spin), 5, 0).unwrap())
    });
}

fn bec_ground(c: &mut Criterion) {
    let params = BecParams::from_ratio(100, -2.034).unwrap();
    c.bench_function("bec_ground/100", |b| {
        b.iter(|| ground_state(black_box(&params)).unwrap())
    });
}

fn jx_eigenbasis(c: &mut Criterion) {
    let spin = SpinQuantumNumber::from_two_j(200);
    c.bench_function("jx_eigenbasis/100", |b| {
        b.iter(|| JxEigenbasis::new(black_box(spin)).unwrap())
    });
}

fn werner_s2(c: &mut Criterion) {
    let rho = werner_state(&WernerParams::new(SpinQuantumNumber::from_two_j(10), 2, 0.3).unwrap()).unwrap();
    let signs = SignConfig::all_plus(2);
    c.bench_function("werner_s2/5", |b| b.iter(|| s2(black_box(&rho), &signs).unwrap()));
}

criterion_group!(
    benches,
    exact_bound,
    direct_bound,
    bec_ground,
    jx_eigenbasis,
    werner_s2
);
criterion_main!(benches);
