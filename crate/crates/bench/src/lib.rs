//! Shared fixtures for the clustering benchmarks.

use kplateau::synth::block_corpus;
use kplateau::Corpus;

/// A corpus shaped loosely like a small newswire collection: 8 topics of
/// 250 documents over 400 terms each.
pub fn bench_corpus() -> Corpus {
    block_corpus(8, 250, 400, 17)
}
