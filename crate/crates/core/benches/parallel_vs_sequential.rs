//! Parallel-vs-sequential comparison for every data-parallel code path:
//! each group benches the default (rayon) entry point against its `_seq`
//! twin on the same inputs, so `cargo bench` shows the speedup (or, on
//! small inputs, the overhead) of the parallel core.

use criterion::{criterion_group, criterion_main, Criterion};
use echcap_core::{
    check_embedding, check_embedding_seq, convergence_report, convergence_report_seq,
    maxplus_convolve, maxplus_convolve_seq, parse_domain_spec, parse_j_grid, sequence_of,
    sequence_of_seq, upper_bound_points, upper_bound_points_seq, Convention, SwParams,
};
use std::time::Duration;

fn configured<'a>(
    c: &'a mut Criterion,
    name: &str,
) -> criterion::BenchmarkGroup<'a, criterion::measurement::WallTime> {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(2));
    group
}

/// One O(k²) max-plus convolution of two ball staircases.
fn bench_convolution(c: &mut Criterion) {
    let s1 = sequence_of(&parse_domain_spec("ball:1").unwrap(), 4000);
    let s2 = sequence_of(&parse_domain_spec("ball:3/2").unwrap(), 4000);
    let mut group = configured(c, "maxplus_convolve_k4000");
    group.bench_function("parallel", |b| {
        b.iter(|| maxplus_convolve(&s1, &s2, 4000).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| maxplus_convolve_seq(&s1, &s2, 4000).unwrap())
    });
    group.finish();
}

/// Full table of a three-ball union: two chained convolutions plus the
/// per-ball staircases.
fn bench_union_table(c: &mut Criterion) {
    let spec = parse_domain_spec("union:(ball:1;ball:3/2;ball:2/3)").unwrap();
    let mut group = configured(c, "union_table_k3000");
    group.bench_function("parallel", |b| b.iter(|| sequence_of(&spec, 3000)));
    group.bench_function("sequential", |b| b.iter(|| sequence_of_seq(&spec, 3000)));
    group.finish();
}

/// Obstruction scan: two ellipsoid tables plus the index-wise comparison.
fn bench_embedding_scan(c: &mut Criterion) {
    let from = parse_domain_spec("ellipsoid:1,4").unwrap();
    let into = parse_domain_spec("ball:201/100").unwrap();
    let mut group = configured(c, "embedding_scan_k20000");
    group.bench_function("parallel", |b| {
        b.iter(|| check_embedding(&from, &into, 20_000))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| check_embedding_seq(&from, &into, 20_000))
    });
    group.finish();
}

/// Windowed volume estimator over 10⁵ indices of a precomputed table.
fn bench_volume_window(c: &mut Criterion) {
    let seq = sequence_of(&parse_domain_spec("ellipsoid:1,2").unwrap(), 200_000);
    let mut group = configured(c, "volume_window_100k");
    group.bench_function("parallel", |b| {
        b.iter(|| {
            convergence_report(&seq, 100_000, 200_000, Convention::Liouville, Some(1.0)).unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            convergence_report_seq(&seq, 100_000, 200_000, Convention::Liouville, Some(1.0))
                .unwrap()
        })
    });
    group.finish();
}

/// Upper-bound curve over the standard 281-point grid.
fn bench_swbound_grid(c: &mut Criterion) {
    let params = SwParams::with_defaults(1.0, 1.0 / 32.0, 1.0 / 256.0);
    let grid = parse_j_grid("1e20:1e300:logstep10").unwrap();
    let mut group = configured(c, "swbound_grid_281");
    group.bench_function("parallel", |b| {
        b.iter(|| upper_bound_points(&params, &grid).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| upper_bound_points_seq(&params, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_convolution,
    bench_union_table,
    bench_embedding_scan,
    bench_volume_window,
    bench_swbound_grid
);
criterion_main!(benches);
