//! Sequential vs parallel timings of the data-parallel kernels.
//!
//! "sequential" runs inside a one-thread rayon pool, "parallel" on the
//! global pool. Build with `--no-default-features` to time the plain
//! iterator fallback instead (both variants then coincide).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;
use tto_core::oracle::build_matrix;
use tto_core::three_term::{solve_three_term, AnnulusProblem, WertOptions};
use tto_core::{
    apply_tto, scan_eigenvalues, Complex64 as C64, FourierSeries, InnerFunction, LaurentSymbol, Region, ScanOptions,
};

fn pools() -> Vec<(&'static str, Option<ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("sequential", Some(one)), ("parallel", None)]
}

fn run<R>(pool: &Option<ThreadPool>, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn theta() -> InnerFunction {
    InnerFunction::from_zeros(&[
        C64::new(0.3, 0.1),
        C64::new(-0.4, 0.0),
        C64::new(0.0, 0.6),
        C64::new(0.5, -0.5),
    ])
    .unwrap()
}

fn bench_scan(c: &mut Criterion) {
    let theta = theta();
    let phi = LaurentSymbol::new(
        vec![C64::new(1.0, 0.0), C64::new(0.3, 0.2)],
        vec![C64::new(0.5, 0.0), C64::new(3.0, 0.0), C64::new(0.2, -0.1)],
    )
    .unwrap();
    let region = Region::square(5.0).unwrap();
    let mut opts = ScanOptions::for_theta(&theta);
    opts.grid = 48;
    let mut group = c.benchmark_group("scan_eigenvalues");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || scan_eigenvalues(&theta, &phi, &region, &opts).unwrap()))
        });
    }
    group.finish();
}

fn bench_apply(c: &mut Criterion) {
    let theta = theta();
    let phi = LaurentSymbol::three_term(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(4.0, 0.0)).unwrap();
    let f = FourierSeries::from_fn(4096, 16384, |z| (C64::new(1.0, 0.0) - 0.5 * z).inv());
    let mut group = c.benchmark_group("apply_tto");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || apply_tto(&theta, &phi, black_box(&f)).unwrap()))
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let zeros: Vec<C64> = (0..24).map(|k| C64::from_polar(0.7, 0.26 * k as f64)).collect();
    let theta = InnerFunction::from_zeros(&zeros).unwrap();
    let phi = LaurentSymbol::three_term(C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(4.0, 0.0)).unwrap();
    let mut group = c.benchmark_group("build_matrix");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || build_matrix(&theta, &phi).unwrap()))
        });
    }
    group.finish();
}

fn bench_wert(c: &mut Criterion) {
    let theta = InnerFunction::monomial(8);
    let prob = AnnulusProblem::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(4.0, 0.0),
        theta.clone(),
    )
    .unwrap();
    let opts = WertOptions::for_theta(&theta);
    let mut group = c.benchmark_group("solve_three_term");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || solve_three_term(&prob, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_apply, bench_oracle, bench_wert);
criterion_main!(benches);
