mod common;

use common::{canonical, dense, exhaustive_best_split, naive_agglomerative, rel_close};
use kplateau::rng::stream;
use kplateau::synth::{block_corpus, random_corpus};
use kplateau::{
    agglomerative, bisect, evaluate_partition, run_clustering, BisectSelection, ClusterConfig,
    Corpus, CriterionKind, Labels, Method, Partition, SparseVector,
};
use rand::seq::SliceRandom;

fn two_groups() -> Corpus {
    // Five documents on terms 0..3, five on terms 3..6.
    let mut vectors = Vec::new();
    for i in 0..10u32 {
        let base = if i < 5 { 0 } else { 3 };
        let pairs = vec![(base, 1.0 + (i % 3) as f64), (base + 1, 1.0), (base + 2, (i % 2) as f64 + 0.5)];
        vectors.push(SparseVector::from_pairs(pairs));
    }
    let labels = Labels::from_ids(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    Corpus::from_vectors(vectors, 6, Some(labels)).unwrap()
}

#[test]
fn bisect_two_documents() {
    let corpus = random_corpus(2, 5, 0.6, 0, 1);
    let p = bisect(&corpus, &[0, 1], CriterionKind::I2, 3, 10, 0).unwrap();
    assert_eq!(p.sizes(), vec![1, 1]);
}

#[test]
fn bisect_rejects_single_document() {
    let corpus = random_corpus(2, 5, 0.6, 0, 1);
    assert!(bisect(&corpus, &[1], CriterionKind::I2, 3, 10, 0).is_err());
}

#[test]
fn bisect_finds_exhaustive_optimum_on_two_groups() {
    let corpus = two_groups();
    let vectors = dense(&corpus);
    let ids: Vec<usize> = (0..10).collect();
    for kind in [CriterionKind::I2, CriterionKind::E1, CriterionKind::H2] {
        let (best, best_value) = exhaustive_best_split(&vectors, kind);
        assert_eq!(canonical(&best), vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        for trials in [1, 10] {
            let p = bisect(&corpus, &ids, kind, trials, 10, 7).unwrap();
            assert_eq!(canonical(p.assignment()), canonical(&best), "{kind}");
            assert!(rel_close(p.value(kind).unwrap(), best_value, 1e-12));
        }
    }
}

#[test]
fn bisect_on_subset_maps_ids() {
    let corpus = two_groups();
    let ids = [1, 3, 6, 8, 9];
    let p = bisect(&corpus, &ids, CriterionKind::I2, 4, 10, 0).unwrap();
    assert_eq!(p.ids(), &ids);
    let mut groups: Vec<Vec<usize>> = (0..2).map(|c| p.member_ids(c)).collect();
    groups.sort();
    assert_eq!(groups, vec![vec![1, 3], vec![6, 8, 9]]);
}

#[test]
fn refinement_trace_is_monotone() {
    let corpus = random_corpus(60, 40, 0.15, 0, 12);
    for kind in CriterionKind::ALL {
        let mut rng = stream(3, &[kind as u64]);
        let mut start: Vec<usize> = (0..60).map(|i| i % 6).collect();
        start.shuffle(&mut rng);
        let mut p = Partition::new(&corpus, start).unwrap();
        let mut trace = vec![p.value(kind).unwrap()];
        let stats = p.refine_with(
            kind,
            20,
            |n| {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                order
            },
            |q| trace.push(q.value(kind).unwrap()),
        );
        assert_eq!(trace.len(), stats.moves + 1);
        for w in trace.windows(2) {
            assert!(kind.better(w[1], w[0]), "{kind}: {} then {}", w[0], w[1]);
        }
        assert!(p.sizes().iter().all(|&s| s > 0));
    }
}

#[test]
fn every_method_handles_k_one_and_k_n() {
    let corpus = random_corpus(12, 15, 0.3, 2, 5);
    for method in [Method::RepeatedBisection, Method::Direct, Method::Agglomerative] {
        let one = run_clustering(&corpus, &ClusterConfig::new(method, CriterionKind::I2, 1)).unwrap();
        assert_eq!(one.partition.assignment(), &[0; 12][..], "{method}");
        let all = run_clustering(&corpus, &ClusterConfig::new(method, CriterionKind::I2, 12)).unwrap();
        assert_eq!(all.partition.sizes(), vec![1; 12], "{method}");
    }
}

#[test]
fn invalid_k_is_rejected() {
    let corpus = random_corpus(6, 10, 0.4, 0, 5);
    for k in [0, 7] {
        let cfg = ClusterConfig::new(Method::RepeatedBisection, CriterionKind::I1, k);
        assert!(run_clustering(&corpus, &cfg).is_err());
    }
}

#[test]
fn block_classes_are_recovered() {
    let corpus = block_corpus(4, 25, 30, 9);
    for method in [Method::RepeatedBisection, Method::Direct, Method::Agglomerative] {
        let cfg = ClusterConfig::new(method, CriterionKind::I2, 4).with_seed(1);
        let run = run_clustering(&corpus, &cfg).unwrap();
        let report = evaluate_partition(&run.partition, &corpus).unwrap();
        assert_eq!(report.purity, 1.0, "{method}");
        assert_eq!(report.entropy, 0.0, "{method}");
        assert_eq!(run.partition.k(), 4);
    }
}

#[test]
fn best_gain_selection_recovers_blocks() {
    let corpus = block_corpus(5, 12, 20, 2);
    let mut cfg = ClusterConfig::new(Method::RepeatedBisection, CriterionKind::E1, 5).with_seed(4);
    cfg.bisect_selection = BisectSelection::BestGain;
    let run = run_clustering(&corpus, &cfg).unwrap();
    assert_eq!(evaluate_partition(&run.partition, &corpus).unwrap().purity, 1.0);
}

#[test]
fn same_seed_same_partition() {
    let corpus = random_corpus(80, 50, 0.1, 3, 6);
    for method in [Method::RepeatedBisection, Method::Direct] {
        for kind in CriterionKind::ALL {
            let cfg = ClusterConfig::new(method, kind, 7).with_seed(42);
            let a = run_clustering(&corpus, &cfg).unwrap();
            let b = run_clustering(&corpus, &cfg).unwrap();
            assert_eq!(a.partition.assignment(), b.partition.assignment(), "{method} {kind}");
            assert!(a.wall_time > 0.0);
        }
    }
}

#[test]
fn output_is_canonically_labeled() {
    let corpus = random_corpus(40, 30, 0.2, 0, 8);
    for method in [Method::RepeatedBisection, Method::Direct, Method::Agglomerative] {
        let run = run_clustering(&corpus, &ClusterConfig::new(method, CriterionKind::H2, 6)).unwrap();
        let a = run.partition.assignment();
        assert_eq!(a, canonical(a).as_slice(), "{method}");
    }
}

#[test]
fn agglomerative_matches_naive_oracle() {
    for seed in 0..4 {
        let corpus = random_corpus(30, 25, 0.2, 0, seed);
        let vectors = dense(&corpus);
        for k in [1, 2, 5, 13, 30] {
            let fast = agglomerative(&corpus, k).unwrap();
            let slow = naive_agglomerative(&vectors, k);
            assert_eq!(canonical(fast.assignment()), canonical(&slow), "seed {seed} k {k}");
        }
    }
}

#[test]
fn identical_documents_merge_first() {
    let v = |pairs: Vec<(u32, f64)>| SparseVector::from_pairs(pairs);
    let vectors = vec![
        v(vec![(0, 1.0), (1, 1.0)]),
        v(vec![(2, 1.0), (3, 0.2)]),
        v(vec![(4, 1.0)]),
        v(vec![(2, 1.0), (3, 0.2)]),
    ];
    let corpus = Corpus::from_vectors(vectors, 5, None).unwrap();
    let p = agglomerative(&corpus, 3).unwrap();
    assert_eq!(p.assignment(), &[0, 1, 2, 1]);
}
