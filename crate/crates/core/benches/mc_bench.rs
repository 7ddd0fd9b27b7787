//! Criterion benches comparing sequential and rayon-parallel execution of
//! the data-parallel inner loops: path synthesis, the Gaussian expectation
//! oracle, and a small error-curve run.
//!
//! With `--no-default-features` the parallel arm degrades to sequential;
//! the numbers then coincide, which is itself worth seeing.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sdelab::analysis::weak_strong_errors;
use sdelab::brownian::BrownianPath;
use sdelab::euler::Scheme;
use sdelab::grid::TimeGrid;
use sdelab::mc::{gaussian_expectation_mc, Execution};
use sdelab::models::ex3;
use sdelab::rng::SeedSpec;

fn modes() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_gaussian_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("gaussian_expectation_mc");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new("cos_cubic_exp", name), &exec, |b, &exec| {
            b.iter(|| {
                gaussian_expectation_mc(
                    |z| (1e-3 * (z * z * z).exp()).cos(),
                    1.0,
                    200_000,
                    SeedSpec::new(7, 0),
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_path_sampling(c: &mut Criterion) {
    let grid = TimeGrid::new(2.0, 14).unwrap();
    c.bench_function("brownian_path_2e14", |b| {
        let mut path = BrownianPath::sample(SeedSpec::new(1, 0), grid, 0);
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            path.resample(SeedSpec::new(1, i));
            path.terminal()
        })
    });
}

fn bench_error_curve(c: &mut Criterion) {
    let mut group = c.benchmark_group("weak_strong_errors");
    group.sample_size(10);
    let model = ex3();
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new("ex3_k10_n512", name), &exec, |b, &exec| {
            b.iter(|| {
                weak_strong_errors(
                    &model,
                    &[0.0; 4],
                    2.0,
                    &[5, 8, 10],
                    512,
                    42,
                    Scheme::Plain,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_gaussian_oracle, bench_path_sampling, bench_error_curve);
criterion_main!(benches);
