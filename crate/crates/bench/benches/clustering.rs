use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kplateau::synth::random_corpus;
use kplateau::{dot, run_clustering, ClusterConfig, CriterionKind, Method, Partition};
use kplateau_bench::bench_corpus;

fn sparse_ops(c: &mut Criterion) {
    let corpus = bench_corpus();
    let (a, b) = (corpus.doc(0), corpus.doc(1));
    c.bench_function("dot", |bench| bench.iter(|| dot(black_box(a), black_box(b))));

    let assignment: Vec<usize> = (0..corpus.n()).map(|i| i % 8).collect();
    let partition = Partition::new(&corpus, assignment).unwrap();
    c.bench_function("delta_move/h2", |bench| {
        bench.iter(|| partition.delta_move(black_box(9), 1, 2, CriterionKind::H2).unwrap())
    });
}

fn methods(c: &mut Criterion) {
    let corpus = bench_corpus();
    let mut group = c.benchmark_group("rb_by_k");
    group.sample_size(10);
    for k in [2, 8, 32] {
        let config = ClusterConfig::new(Method::RepeatedBisection, CriterionKind::I2, k).with_seed(1);
        group.bench_with_input(BenchmarkId::from_parameter(k), &config, |bench, config| {
            bench.iter(|| run_clustering(&corpus, config).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("kinds_rb_k16");
    group.sample_size(10);
    for kind in CriterionKind::ALL {
        let config = ClusterConfig::new(Method::RepeatedBisection, kind, 16).with_seed(1);
        group.bench_with_input(BenchmarkId::from_parameter(kind), &config, |bench, config| {
            bench.iter(|| run_clustering(&corpus, config).unwrap())
        });
    }
    group.finish();

    let small = random_corpus(400, 300, 0.05, 4, 3);
    let mut group = c.benchmark_group("methods_k10");
    group.sample_size(10);
    for method in [Method::RepeatedBisection, Method::Direct, Method::Agglomerative] {
        let config = ClusterConfig::new(method, CriterionKind::I2, 10).with_seed(1);
        group.bench_with_input(BenchmarkId::from_parameter(method), &config, |bench, config| {
            bench.iter(|| run_clustering(&small, config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sparse_ops, methods);
criterion_main!(benches);
