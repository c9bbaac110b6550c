use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use stieltjes_bench::{forcing_gauge, smooth_pair, step_pair};
use stieltjes_core::{
    cousin_fine_partition, integrate_limit, integrate_step_pair, oracle_gauge, oracle_refinement, IntegralKind,
    Interval,
};

fn closed_form(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_pair");
    for nodes in [8, 64, 1024] {
        let (f, g) = step_pair(nodes, 1);
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, _| {
            b.iter(|| integrate_step_pair(black_box(&f), black_box(&g), IntegralKind::K).unwrap())
        });
    }
    group.finish();
}

fn limit(c: &mut Criterion) {
    let (f, g) = smooth_pair(2);
    let mut group = c.benchmark_group("integrate_limit");
    for tol in [1e-2, 1e-4] {
        group.bench_with_input(BenchmarkId::from_parameter(tol), &tol, |b, &tol| {
            b.iter(|| integrate_limit(black_box(&f), black_box(&g), IntegralKind::K, tol).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let (f, g) = step_pair(8, 3);
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("refinement_y", |b| {
        b.iter(|| oracle_refinement(black_box(&f), black_box(&g), IntegralKind::Y, 1e-9, 0).unwrap())
    });
    group.bench_function("gauge_k", |b| b.iter(|| oracle_gauge(black_box(&f), black_box(&g), 1e-9, 0).unwrap()));
    let (f, g) = smooth_pair(4);
    group.bench_function("refinement_d_smooth", |b| {
        b.iter(|| oracle_refinement(black_box(&f), black_box(&g), IntegralKind::D, 1e-4, 0).unwrap())
    });
    group.finish();
}

fn cousin(c: &mut Criterion) {
    let mut group = c.benchmark_group("cousin_fine_partition");
    for level in [6, 12] {
        let gauge = forcing_gauge(level, &[0.0, 0.3, 0.5, 0.71, 1.0]);
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, _| {
            b.iter(|| cousin_fine_partition(black_box(&gauge), Interval::unit()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, closed_form, limit, oracles, cousin);
criterion_main!(benches);
