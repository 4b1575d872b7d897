use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use safehorizon::{
    extension_coefficient, horizon_time, scenario_trace, worst_case_posterior_bounded,
    worst_case_posterior_pfd_zero, Anticipation,
};
use safehorizon_bench::{ops, pfd_zero, step_schedule, time_grid, BOUND_CASES};

fn bounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("worst_case_bound");
    for (p, tp, tf) in BOUND_CASES {
        g.bench_with_input(
            BenchmarkId::new("pfd_zero", format!("{p}/{tp:e}/{tf:e}")),
            &(),
            |b, _| {
                b.iter(|| worst_case_posterior_pfd_zero(black_box(p), ops(tp), ops(tf)).unwrap())
            },
        );
    }
    g.bench_function("bounded", |b| {
        b.iter(|| worst_case_posterior_bounded(black_box(0.9), 1e-9, ops(1e6), ops(5e6)).unwrap())
    });
    g.finish();
}

fn extension(c: &mut Criterion) {
    let constraint = pfd_zero(0.92);
    c.bench_function("extension_coefficient", |b| {
        b.iter(|| extension_coefficient(black_box(&constraint), 0.95, ops(1.0)).unwrap())
    });
}

fn horizons(c: &mut Criterion) {
    let schedule = step_schedule();
    c.bench_function("horizon_time", |b| {
        b.iter(|| horizon_time(black_box(&schedule), 7.5, 5.0, Anticipation::Aware).unwrap())
    });
    let grid = time_grid(1000);
    c.bench_function("scenario_trace_1000", |b| {
        b.iter(|| scenario_trace(black_box(&schedule), 5.0, &grid, Anticipation::Aware).unwrap())
    });
}

criterion_group!(benches, bounds, extension, horizons);
criterion_main!(benches);
