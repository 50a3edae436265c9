//! Compares the data-parallel path map against its sequential twin on the
//! gap-diffusion absorption workload. Both arms share the same per-path
//! closure, so the difference is pure scheduling overhead and speedup.

use criterion::{criterion_group, criterion_main, Criterion};
use radial_sle::drivers::sample_gap_process;
use radial_sle::mc::{map_paths, map_paths_seq};
use radial_sle::{Result, RngSpec};
use std::f64::consts::PI;

const N_PATHS: u64 = 256;

fn absorption(i: u64) -> Result<f64> {
    let g = sample_gap_process(3.0, PI, 1e-2, 50.0, RngSpec::new(42).with_stream(i))?;
    Ok(g.t_absorb)
}

fn bench_gap_absorption(c: &mut Criterion) {
    let a = map_paths(N_PATHS, absorption).unwrap();
    let b = map_paths_seq(N_PATHS, absorption).unwrap();
    assert_eq!(a, b, "schedulers must agree bitwise");

    let mut group = c.benchmark_group("gap_absorption");
    group.sample_size(10);
    group.bench_function("map_paths", |bench| {
        bench.iter(|| map_paths(N_PATHS, absorption).unwrap())
    });
    group.bench_function("map_paths_seq", |bench| {
        bench.iter(|| map_paths_seq(N_PATHS, absorption).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_gap_absorption);
criterion_main!(benches);
