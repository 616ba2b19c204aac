use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use freefactor_core::rational::q;
use freefactor_core::{ef_exact, ef_matrix_closed, make_trace, make_uniform, StateAlgebra};

fn exact_vs_closed(c: &mut Criterion) {
    let mut group = c.benchmark_group("ef_exact");
    for n in [2usize, 4, 6, 8] {
        let a = make_uniform(n).unwrap();
        group.bench_with_input(BenchmarkId::new("commutative", n), &a, |b, a| {
            b.iter(|| ef_exact(black_box(a)).unwrap())
        });
    }
    for n in [2usize, 3, 4] {
        let a = make_trace(n).unwrap();
        group.bench_with_input(BenchmarkId::new("trace", n), &a, |b, a| {
            b.iter(|| ef_exact(black_box(a)).unwrap())
        });
    }
    let m2 = StateAlgebra::matrix("M2", vec![q(3, 4), q(1, 4)]);
    group.bench_function("m2_skewed", |b| {
        b.iter(|| ef_exact(black_box(&m2)).unwrap())
    });
    group.finish();

    let w = vec![q(3, 4), q(1, 4)];
    c.bench_function("ef_matrix_closed/m2", |b| {
        b.iter(|| ef_matrix_closed(black_box(&w)).unwrap())
    });
}

fn figures(c: &mut Criterion) {
    let mut group = c.benchmark_group("figures");
    group.sample_size(10);
    group.bench_function("figure1_200", |b| {
        b.iter(|| freefactor_core::figures::figure1(black_box(200)))
    });
    group.bench_function("figure2_50", |b| {
        b.iter(|| freefactor_core::figures::figure2(black_box(50)))
    });
    group.finish();
}

criterion_group!(benches, exact_vs_closed, figures);
criterion_main!(benches);
