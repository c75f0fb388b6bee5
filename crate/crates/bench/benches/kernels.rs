use std::hint::black_box;

use apvar_core::arith::ArithTables;
use apvar_core::forms::delta_coefficients_exact;
use apvar_core::shifted::{lambda_h, MoebiusPrefix};
use apvar_core::specfun::bessel::{bessel_j, bessel_k0, bessel_y0};
use apvar_core::specfun::gamma::ln_gamma;
use apvar_core::specfun::omega::{omega_direct_real, OmegaKind, OmegaTable};
use apvar_core::variance::bucket_sums;
use apvar_core::voronoi::twisted_sum;
use apvar_core::SmoothWeight;
use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_j11_x30", |b| b.iter(|| bessel_j(11, black_box(30.0))));
    c.bench_function("bessel_j11_x200", |b| b.iter(|| bessel_j(11, black_box(200.0))));
    c.bench_function("bessel_y0_x2.5", |b| b.iter(|| bessel_y0(black_box(2.5))));
    c.bench_function("bessel_k0_x1.5", |b| b.iter(|| bessel_k0(black_box(1.5))));
    c.bench_function("ln_gamma_complex", |b| b.iter(|| ln_gamma(black_box(Complex64::new(0.5, 40.0)))));
}

fn transforms(c: &mut Criterion) {
    let w = SmoothWeight::new(500.0, 2000.0).unwrap();
    c.bench_function("omega_j_direct", |b| b.iter(|| omega_direct_real(OmegaKind::CUSP, black_box(0.3), &w)));
    c.bench_function("omega_y_direct", |b| b.iter(|| omega_direct_real(OmegaKind::Y, black_box(0.3), &w)));
    let table = OmegaTable::build(OmegaKind::Y, &w, 4.0, 1e-9).unwrap();
    c.bench_function("omega_y_table_eval", |b| b.iter(|| table.eval(black_box(0.73))));
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    g.bench_function("omega_y_table_build", |b| b.iter(|| OmegaTable::build(OmegaKind::Y, &w, 4.0, 1e-9)));
    g.bench_function("sieve_1e6", |b| b.iter(|| ArithTables::build(black_box(1_000_000))));
    g.bench_function("delta_coefficients_2e4", |b| b.iter(|| delta_coefficients_exact(black_box(20_000))));
    g.finish();
}

fn sums(c: &mut Criterion) {
    let t = ArithTables::build(100_000).unwrap();
    let w = SmoothWeight::new(2500.0, 100_000.0).unwrap();
    c.bench_function("bucket_sums_1e5_q997", |b| b.iter(|| bucket_sums(|n| t.tau[n] as f64, 100_000, black_box(997))));
    c.bench_function("twisted_sum_1e5", |b| b.iter(|| twisted_sum(|n| t.tau[n] as f64, 3, black_box(97), &w)));
    let mob = MoebiusPrefix::build(100_000).unwrap();
    c.bench_function("lambda_h_k1e5", |b| b.iter(|| lambda_h(black_box(1e4), 2e4, 360, 100_000, &mob)));
}

criterion_group!(benches, special_functions, transforms, sums);
criterion_main!(benches);
