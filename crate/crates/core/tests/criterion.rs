mod common;

use common::{dense, pairwise_criterion, rel_close};
use kplateau::rng::stream;
use kplateau::synth::random_corpus;
use kplateau::{CriterionKind, Error, Partition};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_assignment(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut a: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    a.shuffle(rng);
    a
}

#[test]
fn composite_values_match_pairwise_sums() {
    let corpus = random_corpus(20, 15, 0.3, 0, 11);
    let vectors = dense(&corpus);
    let mut rng = stream(5, &[]);
    let assignment = random_assignment(&mut rng, 20, 3);
    let p = Partition::new(&corpus, assignment.clone()).unwrap();
    for kind in CriterionKind::ALL {
        let fast = p.value(kind).unwrap();
        let slow = pairwise_criterion(&vectors, &assignment, kind);
        assert!(rel_close(fast, slow, 1e-12), "{kind}: {fast} vs {slow}");
    }
}

#[test]
fn hybrids_are_ratios() {
    let corpus = random_corpus(30, 20, 0.3, 0, 3);
    let p = Partition::new(&corpus, (0..30).map(|i| i % 4).collect()).unwrap();
    let v = |k| p.value(k).unwrap();
    assert!(rel_close(v(CriterionKind::H1), v(CriterionKind::I1) / v(CriterionKind::E1), 1e-14));
    assert!(rel_close(v(CriterionKind::H2), v(CriterionKind::I2) / v(CriterionKind::E1), 1e-14));
}

#[test]
fn single_cluster_values() {
    // With one cluster the cross term equals the intra term.
    let corpus = random_corpus(12, 10, 0.4, 0, 8);
    let vectors = dense(&corpus);
    let p = Partition::new(&corpus, vec![0; 12]).unwrap();
    let intra: f64 = vectors
        .iter()
        .flat_map(|u| vectors.iter().map(move |v| common::dense_dot(u, v)))
        .sum();
    assert!(rel_close(p.value(CriterionKind::I2).unwrap(), intra.sqrt(), 1e-12));
    assert!(rel_close(p.value(CriterionKind::G1).unwrap(), 1.0, 1e-12));
    assert!(rel_close(p.value(CriterionKind::E1).unwrap(), 12.0 * intra.sqrt(), 1e-12));
}

#[test]
fn delta_matches_recompute_across_long_walk() {
    let corpus = random_corpus(50, 30, 0.25, 0, 21);
    for kind in CriterionKind::ALL {
        let mut rng = stream(99, &[kind as u64]);
        let mut p = Partition::new(&corpus, random_assignment(&mut rng, 50, 5)).unwrap();
        let mut done = 0;
        while done < 300 {
            let pos = rng.gen_range(0..50);
            let from = p.assignment()[pos];
            let to = rng.gen_range(0..5);
            if to == from || p.sizes()[from] < 2 {
                continue;
            }
            let before = p.value(kind).unwrap();
            let delta = p.delta_move(pos, from, to, kind).unwrap();
            p.apply_move(pos, from, to).unwrap();
            let fresh = Partition::new(&corpus, p.assignment().to_vec()).unwrap();
            let after = fresh.value(kind).unwrap();
            assert!((delta - (after - before)).abs() <= 1e-9, "{kind} move {done}");
            assert!((p.value(kind).unwrap() - after).abs() <= 1e-9);
            done += 1;
        }
    }
}

#[test]
fn delta_is_reversible() {
    let corpus = random_corpus(25, 20, 0.3, 0, 4);
    let mut p = Partition::new(&corpus, (0..25).map(|i| i % 3).collect()).unwrap();
    for kind in CriterionKind::ALL {
        let there = p.delta_move(4, 1, 2, kind).unwrap();
        p.apply_move(4, 1, 2).unwrap();
        let back = p.delta_move(4, 2, 1, kind).unwrap();
        p.apply_move(4, 2, 1).unwrap();
        assert!((there + back).abs() <= 1e-10, "{kind}");
    }
}

#[test]
fn emptying_move_is_rejected() {
    let corpus = random_corpus(5, 8, 0.5, 0, 2);
    let mut p = Partition::new(&corpus, vec![0, 0, 0, 0, 1]).unwrap();
    assert!(matches!(
        p.delta_move(4, 1, 0, CriterionKind::I2),
        Err(Error::WouldEmptyCluster { doc: 4, cluster: 1 })
    ));
    assert!(matches!(p.apply_move(4, 1, 0), Err(Error::WouldEmptyCluster { .. })));
    assert!(matches!(p.apply_move(0, 1, 0), Err(Error::NotInCluster { .. })));
    assert_eq!(p.assignment(), &[0, 0, 0, 0, 1]);
}

#[test]
fn empty_cluster_in_assignment_is_rejected() {
    let corpus = random_corpus(4, 8, 0.5, 0, 2);
    assert!(Partition::new(&corpus, vec![0, 0, 2, 2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_clusters_keeps_values(seed in any::<u64>(), k in 2usize..5) {
        let corpus = random_corpus(18, 12, 0.35, 0, seed);
        let mut rng = stream(seed, &[1]);
        let assignment = random_assignment(&mut rng, 18, k);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let relabeled: Vec<usize> = assignment.iter().map(|&c| perm[c]).collect();
        let a = Partition::new(&corpus, assignment).unwrap();
        let b = Partition::new(&corpus, relabeled).unwrap();
        for kind in CriterionKind::ALL {
            prop_assert!(rel_close(a.value(kind).unwrap(), b.value(kind).unwrap(), 1e-12));
        }
    }

    #[test]
    fn document_order_does_not_matter(seed in any::<u64>(), k in 2usize..5) {
        let corpus = random_corpus(18, 12, 0.35, 0, seed);
        let mut rng = stream(seed, &[2]);
        let assignment = random_assignment(&mut rng, 18, k);
        let mut order: Vec<usize> = (0..18).collect();
        order.shuffle(&mut rng);
        let shuffled: Vec<usize> = order.iter().map(|&i| assignment[i]).collect();
        let a = Partition::new(&corpus, assignment).unwrap();
        let b = Partition::on_subset(&corpus, order, shuffled).unwrap();
        for kind in CriterionKind::ALL {
            prop_assert!(rel_close(a.value(kind).unwrap(), b.value(kind).unwrap(), 1e-12));
        }
    }

    #[test]
    fn values_match_oracle(seed in any::<u64>(), k in 2usize..6) {
        let corpus = random_corpus(16, 10, 0.4, 0, seed);
        let vectors = dense(&corpus);
        let mut rng = stream(seed, &[3]);
        let assignment = random_assignment(&mut rng, 16, k);
        let p = Partition::new(&corpus, assignment.clone()).unwrap();
        for kind in CriterionKind::ALL {
            let slow = pairwise_criterion(&vectors, &assignment, kind);
            prop_assert!(rel_close(p.value(kind).unwrap(), slow, 1e-10));
        }
    }
}
