use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rfourier::harmonic::{hat_omega, Arc, ArcSet};
use rfourier::kahane::{run_pipeline, KahaneOptions};
use rfourier::maximal::carleson_max;
use rfourier::rational::q;
use rfourier::schnorr::{assemble_divergence, SchnorrTest};
use rfourier_bench::{sample_poly, small_set};

fn eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval");
    for d in [64i64, 512, 4096] {
        let p = sample_poly(d);
        g.bench_with_input(BenchmarkId::new("eval", d), &p, |b, p| b.iter(|| p.eval(black_box(0.7))));
        g.bench_with_input(BenchmarkId::new("carleson_max", d), &p, |b, p| b.iter(|| carleson_max(p, black_box(0.7))));
    }
    g.finish();
}

fn harmonic(c: &mut Criterion) {
    let set = ArcSet::new(vec![Arc::new(q(-1, 4), q(1, 8)).unwrap(), Arc::new(q(1, 2), q(3, 4)).unwrap()]).unwrap();
    c.bench_function("hat_omega", |b| b.iter(|| hat_omega(black_box(Complex64::new(0.3, -0.4)), &set)));
}

fn kahane(c: &mut Criterion) {
    let mut g = c.benchmark_group("kahane");
    g.sample_size(10);
    for e in [4i64, 6] {
        let set = small_set(e);
        g.bench_with_input(BenchmarkId::new("run_pipeline", e), &set, |b, s| {
            b.iter(|| run_pipeline(s, &KahaneOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn assembly(c: &mut Criterion) {
    let test = SchnorrTest::rational_point(q(1, 3)).unwrap();
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    g.bench_function("grid 0,0", |b| b.iter(|| assemble_divergence(&test, 0, 0, &KahaneOptions::default()).unwrap()));
    g.finish();
}

criterion_group!(benches, eval, harmonic, kahane, assembly);
criterion_main!(benches);
