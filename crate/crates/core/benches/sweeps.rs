//! Sequential vs parallel execution of the grid sweeps and series products.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use soliton_core::families::make_cao;
use soliton_core::toric::TruncatedSeries;
use soliton_core::verify::{check_conservation, CheckOptions, GridSpec};
use soliton_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn conservation_sweep(c: &mut Criterion) {
    let cao = make_cao(2, 1.0).unwrap();
    let grid = GridSpec::square(2, 1.5, 4).unwrap();
    let mut group = c.benchmark_group("conservation_cao2_256pts");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = CheckOptions { exec, ..Default::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_conservation(&cao, &grid, 1e-6, &opts).unwrap())
        });
    }
    group.finish();
}

fn series_product(c: &mut Criterion) {
    let mut a = TruncatedSeries::zero(4, 14).unwrap();
    let monomials: Vec<Vec<u16>> = a.terms().map(|(e, _)| e.to_vec()).collect();
    for (i, e) in monomials.iter().enumerate() {
        a.set(e, 1.0 / (1.0 + i as f64)).unwrap();
    }
    let mut group = c.benchmark_group("series_mul_n4_d14");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| a.mul_with(&a, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, conservation_sweep, series_product);
criterion_main!(benches);
