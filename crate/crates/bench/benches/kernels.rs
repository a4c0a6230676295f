use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use henkin_bench::{sample_pairs, sample_relation};
use henkin_core::orbitpred::orbit_types;
use henkin_core::*;
use std::hint::black_box;

fn orbit_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("orbit_types");
    for size in [0u32, 2, 4] {
        let support: SupportSet = (0..size).map(|i| Atom::new(1, i)).collect();
        g.bench_with_input(BenchmarkId::new("binary", size), &support, |b, p| {
            b.iter(|| orbit_types(&Structure::KSigma0(2), 2, black_box(p)))
        });
    }
    g.finish();

    let r = sample_relation(Structure::Sigma0, 3);
    let s = sample_relation(Structure::Sigma0, 2).complement();
    c.bench_function("boolean/or", |b| b.iter(|| black_box(&r).or(black_box(&s)).unwrap()));
    c.bench_function("least_support", |b| b.iter(|| black_box(&r).least_support()));
    let pairs = sample_pairs(256);
    c.bench_function("membership/256", |b| b.iter(|| pairs.iter().filter(|t| r.contains(&t[..])).count()));
}

fn evaluation(c: &mut Criterion) {
    let wo = mk_well_order();
    let cfg = EvalConfig::new(Structure::FiniteStd(3));
    c.bench_function("eval/well_order_finite3", |b| b.iter(|| eval(&wo, &Assignment::new(), &cfg).unwrap()));

    let h = parse("forall y. (D(y) <-> y = x | y = c)").unwrap();
    let f = Assignment::new().with_ind("c", Atom::new(1, 2));
    let cfg = EvalConfig::new(Structure::KSigma0(2));
    c.bench_function("build_sigma/ksigma0_2", |b| b.iter(|| build_sigma(&h, &f, &cfg).unwrap()));
}

fn refuters(c: &mut Criterion) {
    let mut g = c.benchmark_group("refute");
    g.sample_size(10);
    g.bench_function("tr1_k2_s1", |b| b.iter(|| refute_tr1(2, 1).unwrap()));
    g.bench_function("wo1_s2", |b| b.iter(|| refute_wo1(2).unwrap()));
    g.finish();
}

criterion_group!(benches, orbit_kernel, evaluation, refuters);
criterion_main!(benches);
