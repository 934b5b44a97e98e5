//! Partitional document clustering driven by global criterion functions.
//!
//! The pipeline is: load a sparse document-term matrix ([`corpus`]), weight
//! and normalize it into a [`Corpus`] of unit vectors, cluster it with
//! repeated bisection, direct k-way refinement or average-link
//! agglomeration ([`cluster`]) while optimizing one of seven criteria
//! ([`criterion`]), score the result by entropy and purity ([`quality`]),
//! and sweep k to find where quality stops changing ([`sweep`]).

pub mod cluster;
pub mod corpus;
pub mod criterion;
mod error;
pub mod format;
pub mod partition;
pub mod quality;
pub mod rng;
pub mod sparse;
pub mod sweep;
pub mod synth;

pub use cluster::{
    agglomerative, bisect, direct_kway, refine, repeated_bisection, run_clustering, BisectSelection,
    ClusterConfig, ClusterRun, Method,
};
pub use corpus::{
    build_corpus, load_labels, load_sparse_matrix, parse_labels, parse_sparse_matrix,
    write_sparse_matrix, Corpus, Labels, RawMatrix, Weighting,
};
pub use criterion::{
    is_improvement, value_from_stats, ClusterStats, CriterionKind, CriterionState, Direction,
    IMPROVEMENT_EPS,
};
pub use error::{Error, Result};
pub use partition::{Partition, RefineStats};
pub use quality::{
    cluster_entropy, cluster_purity, confusion, evaluate, evaluate_partition, ConfusionCounts,
    QualityReport,
};
pub use sparse::{composite, dot, euclidean_distance, CompositeVector, SparseVector};
pub use sweep::{
    read_csv, recommend_k, recommend_per_kind, sweep, write_csv, Recommendation, SweepConfig,
    SweepOutcome, SweepRow,
};
