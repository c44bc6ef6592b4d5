//! Sequential vs rayon execution of the two parallel hot spots: independent
//! sweep rows and the chunked reductions inside energies and CG.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use narrowgap::analysis::HRule;
use narrowgap::geometry::{preset, Params, PresetName};
use narrowgap::par::{self, Mode};
use narrowgap::pde::{build_grid, solve_dirichlet, BoundaryData};

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn reductions(c: &mut Criterion) {
    let n = 1 << 21;
    let a: Vec<f64> = (0..n).map(|k| (k as f64).sin()).collect();
    let b: Vec<f64> = (0..n).map(|k| (k as f64 * 0.5).cos()).collect();
    let mut group = c.benchmark_group("chunked_dot");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| par::chunked_sum_with(mode, n, |r| r.map(|k| a[k] * b[k]).sum::<f64>()))
        });
    }
    group.finish();
}

fn sweep_rows(c: &mut Criterion) {
    let eps = [0.2, 0.1, 0.05, 0.025];
    let mut group = c.benchmark_group("capacitor_rows");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| {
                par::map_indexed_with(mode, eps.len(), |k| {
                    let config = preset(PresetName::CapacitorStrip2d, eps[k], &Params::new()).unwrap();
                    let grid = build_grid(&config, &HRule::default().spec(eps[k])).unwrap();
                    let u = solve_dirichlet(&grid, &BoundaryData::constants(0.0, 1.0, 0.0), 1e-10).unwrap();
                    u.values.len()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, reductions, sweep_rows);
criterion_main!(benches);
