//! Hot-path kernels: envelope construction, the tridiagonal solve, one
//! advance per route, and the full per-step constraint enforcement.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hjc_bench::{desk_field, near_constraint_field};
use hjc_core::{
    advance_field_fd, advance_field_lax, enforce_constraint, solve_tridiagonal,
    upper_envelope_brute, upper_envelope_quadratic, Route, StepParams,
};

fn bench_envelope(c: &mut Criterion) {
    let mut group = c.benchmark_group("envelope");
    for n in [256usize, 2001] {
        let (_, grid, field) = desk_field(n);
        let curvature = 1.0 / (4.0 * 0.02);
        group.bench_with_input(BenchmarkId::new("hull", n), &n, |b, _| {
            b.iter(|| upper_envelope_quadratic(black_box(&field.values), grid, curvature));
        });
        group.bench_with_input(BenchmarkId::new("brute", n), &n, |b, _| {
            b.iter(|| upper_envelope_brute(black_box(&field.values), grid, curvature));
        });
    }
    group.finish();
}

fn bench_tridiagonal(c: &mut Criterion) {
    let mut group = c.benchmark_group("tridiagonal");
    for n in [256usize, 2001] {
        let lambda = 0.8;
        let lower = vec![-lambda; n - 1];
        let upper = vec![-lambda; n - 1];
        let mut diag = vec![1.0 + 2.0 * lambda; n];
        diag[0] = 1.0 + lambda;
        diag[n - 1] = 1.0 + lambda;
        let rhs: Vec<f64> = (0..n).map(|j| (j as f64 * 0.01).sin()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_tridiagonal(black_box(&lower), &diag, &upper, &rhs).expect("solve"));
        });
    }
    group.finish();
}

fn bench_advance(c: &mut Criterion) {
    let (model, _, field) = desk_field(2001);
    let dt = 1e-3;
    c.bench_function("advance_fd", |b| {
        b.iter(|| {
            advance_field_fd(black_box(&field), 0.5, &model, dt, 2.0).expect("step")
        });
    });
    c.bench_function("advance_lax", |b| {
        b.iter(|| advance_field_lax(black_box(&field), 0.5, &model, 0.02).expect("step"));
    });
}

fn bench_enforce(c: &mut Criterion) {
    let (model, _, field) = near_constraint_field(2001);
    for (name, route, dt, theta) in [
        ("enforce_fd", Route::FdMonotone, 1e-3, 9.0),
        ("enforce_lax", Route::LaxOleinik, 0.02, 0.0),
    ] {
        c.bench_function(name, |b| {
            let params = StepParams {
                model: &model,
                dt,
                route,
                lf_dissipation: theta,
                constraint_tol: 1e-10,
            };
            b.iter(|| enforce_constraint(black_box(&field), &params).expect("enforce"));
        });
    }
}

criterion_group!(
    kernels,
    bench_envelope,
    bench_tridiagonal,
    bench_advance,
    bench_enforce
);
criterion_main!(kernels);
