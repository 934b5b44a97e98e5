//! Independent reference implementations used as test oracles. None of these
//! touch composite vectors or incremental state.

#![allow(dead_code)]

use std::collections::HashMap;

use kplateau::{Corpus, CriterionKind};

pub fn dense(corpus: &Corpus) -> Vec<Vec<f64>> {
    corpus
        .docs()
        .iter()
        .map(|d| {
            let mut v = vec![0.0; corpus.vocab_size()];
            for (i, x) in d.iter() {
                v[i as usize] = x;
            }
            v
        })
        .collect()
}

pub fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates a criterion straight from pairwise similarity sums over
/// ordered document pairs (self-pairs included).
pub fn pairwise_criterion(vectors: &[Vec<f64>], assignment: &[usize], kind: CriterionKind) -> f64 {
    pairwise_criterion_gram(&gram(vectors), assignment, kind)
}

/// All pairwise dot products.
pub fn gram(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dense_dot(u, v)).collect())
        .collect()
}

pub fn pairwise_criterion_gram(gram: &[Vec<f64>], assignment: &[usize], kind: CriterionKind) -> f64 {
    let k = assignment.iter().max().unwrap() + 1;
    let mut size = vec![0.0; k];
    let mut intra = vec![0.0; k];
    let mut cross = vec![0.0; k];
    for (u, &cu) in assignment.iter().enumerate() {
        size[cu] += 1.0;
        for (v, &cv) in assignment.iter().enumerate() {
            let s = gram[u][v];
            cross[cu] += s;
            if cu == cv {
                intra[cu] += s;
            }
        }
    }
    let sum = |f: &dyn Fn(usize) -> f64| (0..k).map(f).sum::<f64>();
    let i1 = sum(&|i| intra[i] / size[i]);
    let i2 = sum(&|i| intra[i].sqrt());
    let e1 = sum(&|i| size[i] * cross[i] / intra[i].sqrt());
    let g1 = sum(&|i| cross[i] / intra[i]);
    let g1p = sum(&|i| size[i] * size[i] * cross[i] / intra[i]);
    match kind {
        CriterionKind::I1 => i1,
        CriterionKind::I2 => i2,
        CriterionKind::E1 => e1,
        CriterionKind::G1 => g1,
        CriterionKind::G1p => g1p,
        CriterionKind::H1 => i1 / e1,
        CriterionKind::H2 => i2 / e1,
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Entropy and purity computed from a hash-map tally with base-2 logs.
pub fn quality_oracle(assignment: &[usize], classes: &[usize]) -> (f64, f64) {
    let n = assignment.len() as f64;
    let q = classes.iter().collect::<std::collections::HashSet<_>>().len();
    let mut table: HashMap<usize, HashMap<usize, usize>> = HashMap::new();
    for (&c, &l) in assignment.iter().zip(classes) {
        *table.entry(c).or_default().entry(l).or_default() += 1;
    }
    let mut entropy = 0.0;
    let mut purity = 0.0;
    for row in table.values() {
        let n_r: usize = row.values().sum();
        let n_r = n_r as f64;
        let e = if q > 1 {
            -row.values()
                .map(|&c| {
                    let p = c as f64 / n_r;
                    p * p.log2()
                })
                .sum::<f64>()
                / (q as f64).log2()
        } else {
            0.0
        };
        let p = *row.values().max().unwrap() as f64 / n_r;
        entropy += n_r / n * e;
        purity += n_r / n * p;
    }
    (entropy, purity)
}

/// Naive average-link agglomeration: every step rescans every cluster pair
/// and recomputes its average similarity from document pairs. Clusters are
/// named by their smallest document id; ties go to the lowest pair.
pub fn naive_agglomerative(vectors: &[Vec<f64>], k: usize) -> Vec<usize> {
    let mut clusters: Vec<Vec<usize>> = (0..vectors.len()).map(|i| vec![i]).collect();
    while clusters.len() > k {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut s = 0.0;
                for &u in &clusters[a] {
                    for &v in &clusters[b] {
                        s += dense_dot(&vectors[u], &vectors[v]);
                    }
                }
                let avg = s / (clusters[a].len() * clusters[b].len()) as f64;
                if best.is_none_or(|(bs, _, _)| avg > bs) {
                    best = Some((avg, a, b));
                }
            }
        }
        let (_, a, b) = best.unwrap();
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        clusters[a].sort_unstable();
        clusters.sort_by_key(|c| c[0]);
    }
    let mut assignment = vec![0; vectors.len()];
    for (label, c) in clusters.iter().enumerate() {
        for &d in c {
            assignment[d] = label;
        }
    }
    assignment
}

/// Relabels clusters in order of first appearance.
pub fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Exhaustive best two-way split of `vectors` for `kind` (first document is
/// pinned to cluster 0 to skip mirrored splits).
pub fn exhaustive_best_split(vectors: &[Vec<f64>], kind: CriterionKind) -> (Vec<usize>, f64) {
    let n = vectors.len();
    let g = gram(vectors);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 1u64..(1 << (n - 1)) {
        let assignment: Vec<usize> = (0..n)
            .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
            .collect();
        let v = pairwise_criterion_gram(&g, &assignment, kind);
        if best.as_ref().is_none_or(|(_, b)| kind.better(v, *b)) {
            best = Some((assignment, v));
        }
    }
    best.unwrap()
}
