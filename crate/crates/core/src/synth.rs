//! Seeded synthetic corpora for tests, benchmarks and demos.

use rand::Rng;

use crate::corpus::{Corpus, Labels};
use crate::rng::stream;
use crate::sparse::SparseVector;

/// `blocks` classes of `docs_per_block` documents each. Class `b` only uses
/// terms `b * terms_per_block .. (b + 1) * terms_per_block`, so documents of
/// different classes are orthogonal.
pub fn block_corpus(blocks: usize, docs_per_block: usize, terms_per_block: usize, seed: u64) -> Corpus {
    assert!(blocks > 0 && docs_per_block > 0 && terms_per_block > 0);
    let mut rng = stream(seed, &[0xb10c]);
    let mut vectors = Vec::with_capacity(blocks * docs_per_block);
    let mut classes = Vec::with_capacity(blocks * docs_per_block);
    for b in 0..blocks {
        let base = (b * terms_per_block) as u32;
        for _ in 0..docs_per_block {
            let mut pairs: Vec<(u32, f64)> = Vec::new();
            for t in 0..terms_per_block as u32 {
                if rng.gen_bool(0.5) {
                    pairs.push((base + t, rng.gen_range(1.0..5.0f64).floor()));
                }
            }
            if pairs.is_empty() {
                pairs.push((base + rng.gen_range(0..terms_per_block as u32), 1.0));
            }
            vectors.push(SparseVector::from_pairs(pairs));
            classes.push(b);
        }
    }
    Corpus::from_vectors(vectors, blocks * terms_per_block, Some(Labels::from_ids(&classes)))
        .expect("every synthetic document has a nonzero entry")
}

/// `n` random non-negative documents over `vocab` terms with `q` random
/// classes (unlabeled when `q == 0`).
pub fn random_corpus(n: usize, vocab: usize, density: f64, q: usize, seed: u64) -> Corpus {
    assert!(n > 0 && vocab > 0);
    let mut rng = stream(seed, &[0x7a4d]);
    let vectors = (0..n)
        .map(|_| {
            let mut pairs: Vec<(u32, f64)> = Vec::new();
            for t in 0..vocab as u32 {
                if rng.gen_bool(density) {
                    pairs.push((t, rng.gen_range(0.05..3.0)));
                }
            }
            if pairs.is_empty() {
                pairs.push((rng.gen_range(0..vocab as u32), 1.0));
            }
            SparseVector::from_pairs(pairs)
        })
        .collect();
    let labels = (q > 0).then(|| {
        let ids: Vec<usize> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        Labels::from_ids(&ids)
    });
    Corpus::from_vectors(vectors, vocab, labels).expect("every random document has a nonzero entry")
}
