//! The seven global clustering criterion functions and their incremental
//! evaluation.
//!
//! Every criterion is written in terms of three per-cluster quantities:
//! the size `n_i`, the intra-cluster similarity `||D_i||^2` and the
//! similarity of the cluster to the whole collection `<D_i, D>`:
//!
//! | kind | direction | value                                   |
//! |------|-----------|-----------------------------------------|
//! | I1   | maximize  | `sum_i ||D_i||^2 / n_i`                 |
//! | I2   | maximize  | `sum_i ||D_i||`                         |
//! | E1   | minimize  | `sum_i n_i <D_i, D> / ||D_i||`          |
//! | G1   | minimize  | `sum_i <D_i, D> / ||D_i||^2`            |
//! | G1p  | minimize  | `sum_i n_i^2 <D_i, D> / ||D_i||^2`      |
//! | H1   | maximize  | `I1 / E1`                               |
//! | H2   | maximize  | `I2 / E1`                               |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sparse::{CompositeVector, SparseVector};

/// Minimum change accepted as an improvement during refinement.
pub const IMPROVEMENT_EPS: f64 = 1e-10;

/// Composites are rebuilt from their members after this many incremental
/// updates.
pub const REBUILD_INTERVAL: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionKind {
    I1,
    I2,
    E1,
    G1,
    G1p,
    H1,
    H2,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 7] = [
        CriterionKind::I1,
        CriterionKind::I2,
        CriterionKind::E1,
        CriterionKind::G1,
        CriterionKind::G1p,
        CriterionKind::H1,
        CriterionKind::H2,
    ];

    pub fn direction(self) -> Direction {
        match self {
            CriterionKind::I1 | CriterionKind::I2 | CriterionKind::H1 | CriterionKind::H2 => {
                Direction::Maximize
            }
            CriterionKind::E1 | CriterionKind::G1 | CriterionKind::G1p => Direction::Minimize,
        }
    }

    /// The lowercase name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::I1 => "i1",
            CriterionKind::I2 => "i2",
            CriterionKind::E1 => "e1",
            CriterionKind::G1 => "g1",
            CriterionKind::G1p => "g1p",
            CriterionKind::H1 => "h1",
            CriterionKind::H2 => "h2",
        }
    }

    /// True when `a` is strictly better than `b` in this kind's direction.
    /// NaN is never better.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self.direction() {
            Direction::Maximize => a > b || (b.is_nan() && !a.is_nan()),
            Direction::Minimize => a < b || (b.is_nan() && !a.is_nan()),
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown criterion {s:?} (expected one of i1, i2, e1, g1, g1p, h1, h2)"
                ))
            })
    }
}

/// Whether `delta` is a strict improvement for `kind`.
pub fn is_improvement(delta: f64, kind: CriterionKind) -> bool {
    match kind.direction() {
        Direction::Maximize => delta > IMPROVEMENT_EPS,
        Direction::Minimize => delta < -IMPROVEMENT_EPS,
    }
}

/// Scalar summary of one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterStats {
    pub size: usize,
    /// `||D_i||^2`, the sum of similarities over ordered member pairs.
    pub intra: f64,
    /// `<D_i, D>`, the summed similarity of members to every document.
    pub cross: f64,
}

/// Additive per-cluster parts; H1 and H2 are ratios of their sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Parts {
    i1: f64,
    i2: f64,
    e1: f64,
    g1: f64,
    g1p: f64,
}

impl Parts {
    fn of(s: &ClusterStats) -> Parts {
        let n = s.size as f64;
        let norm = s.intra.sqrt();
        Parts {
            i1: s.intra / n,
            i2: norm,
            e1: n * s.cross / norm,
            g1: s.cross / s.intra,
            g1p: n * n * s.cross / s.intra,
        }
    }

    fn add(&mut self, o: &Parts, sign: f64) {
        self.i1 += sign * o.i1;
        self.i2 += sign * o.i2;
        self.e1 += sign * o.e1;
        self.g1 += sign * o.g1;
        self.g1p += sign * o.g1p;
    }

    fn value(&self, kind: CriterionKind) -> f64 {
        match kind {
            CriterionKind::I1 => self.i1,
            CriterionKind::I2 => self.i2,
            CriterionKind::E1 => self.e1,
            CriterionKind::G1 => self.g1,
            CriterionKind::G1p => self.g1p,
            CriterionKind::H1 => self.i1 / self.e1,
            CriterionKind::H2 => self.i2 / self.e1,
        }
    }
}

/// Evaluates `kind` over arbitrary cluster summaries.
pub fn value_from_stats<'a>(
    stats: impl IntoIterator<Item = &'a ClusterStats>,
    kind: CriterionKind,
) -> Result<f64> {
    let mut parts = Parts::default();
    for (i, s) in stats.into_iter().enumerate() {
        if s.size == 0 || s.intra <= 0.0 {
            return Err(Error::DegenerateCluster(i));
        }
        parts.add(&Parts::of(s), 1.0);
    }
    Ok(parts.value(kind))
}

/// Composite vectors and cached sums for a k-way partition of a document
/// set. Membership itself lives in [`crate::Partition`].
#[derive(Debug, Clone)]
pub struct CriterionState {
    composites: Vec<CompositeVector>,
    stats: Vec<ClusterStats>,
    total: CompositeVector,
    /// `<d, D>` for every document position.
    doc_cross: Vec<f64>,
    parts: Parts,
    updates: usize,
}

impl CriterionState {
    /// Builds the state for `docs` split by `assignment` into `k` clusters.
    /// Every cluster must be non-empty.
    pub fn new(docs: &[&SparseVector], assignment: &[usize], k: usize, dim: usize) -> Result<Self> {
        if docs.len() != assignment.len() {
            return Err(Error::LengthMismatch {
                expected: docs.len(),
                found: assignment.len(),
            });
        }
        let total = CompositeVector::from_docs(dim, docs.iter().copied());
        let doc_cross = docs.iter().map(|d| total.dot_sparse(d)).collect();
        let mut state = CriterionState {
            composites: (0..k).map(|_| CompositeVector::zeros(dim)).collect(),
            stats: vec![
                ClusterStats {
                    size: 0,
                    intra: 0.0,
                    cross: 0.0
                };
                k
            ],
            total,
            doc_cross,
            parts: Parts::default(),
            updates: 0,
        };
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (pos, &c) in assignment.iter().enumerate() {
            if c >= k {
                return Err(Error::InvalidInput(format!(
                    "cluster index {c} at position {pos} not below k = {k}"
                )));
            }
            members[c].push(pos);
        }
        if let Some(c) = members.iter().position(Vec::is_empty) {
            return Err(Error::InvalidInput(format!("cluster {c} is empty")));
        }
        state.rebuild(docs, &members);
        Ok(state)
    }

    /// Recomputes every composite and cached sum from membership lists.
    pub fn rebuild(&mut self, docs: &[&SparseVector], members: &[Vec<usize>]) {
        for (c, m) in members.iter().enumerate() {
            self.composites[c].rebuild(m.iter().map(|&p| docs[p]));
            self.stats[c] = ClusterStats {
                size: m.len(),
                intra: self.composites[c].squared_norm(),
                cross: self.composites[c].dot(&self.total),
            };
        }
        self.recompute_parts();
        self.updates = 0;
    }

    fn recompute_parts(&mut self) {
        let mut parts = Parts::default();
        for s in &self.stats {
            parts.add(&Parts::of(s), 1.0);
        }
        self.parts = parts;
    }

    pub fn k(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[ClusterStats] {
        &self.stats
    }

    pub fn composite(&self, cluster: usize) -> &CompositeVector {
        &self.composites[cluster]
    }

    pub fn total(&self) -> &CompositeVector {
        &self.total
    }

    /// Incremental moves applied since the last full rebuild.
    pub fn updates_since_rebuild(&self) -> usize {
        self.updates
    }

    /// Exact criterion value, summed fresh over the cluster summaries.
    pub fn value(&self, kind: CriterionKind) -> Result<f64> {
        value_from_stats(&self.stats, kind)
    }

    fn moved_stats(&self, doc: &SparseVector, pos: usize, from: usize, to: usize) -> [ClusterStats; 2] {
        let self_sim = doc.squared_norm();
        let cross = self.doc_cross[pos];
        let (f, t) = (&self.stats[from], &self.stats[to]);
        [
            ClusterStats {
                size: f.size - 1,
                intra: f.intra - 2.0 * self.composites[from].dot_sparse(doc) + self_sim,
                cross: f.cross - cross,
            },
            ClusterStats {
                size: t.size + 1,
                intra: t.intra + 2.0 * self.composites[to].dot_sparse(doc) + self_sim,
                cross: t.cross + cross,
            },
        ]
    }

    /// Change in `kind` if the document at `pos` moved from `from` to `to`.
    /// Unchecked: the caller guarantees membership, `from != to` and
    /// `size(from) >= 2`. Touches only the two affected clusters.
    pub(crate) fn move_delta(
        &self,
        doc: &SparseVector,
        pos: usize,
        from: usize,
        to: usize,
        kind: CriterionKind,
    ) -> f64 {
        let [nf, nt] = self.moved_stats(doc, pos, from, to);
        let mut diff = Parts::of(&nf);
        diff.add(&Parts::of(&nt), 1.0);
        diff.add(&Parts::of(&self.stats[from]), -1.0);
        diff.add(&Parts::of(&self.stats[to]), -1.0);
        match kind {
            CriterionKind::H1 | CriterionKind::H2 => {
                let mut after = self.parts;
                after.add(&diff, 1.0);
                after.value(kind) - self.parts.value(kind)
            }
            _ => diff.value(kind),
        }
    }

    /// Applies the move to composites and cached sums. Unchecked, like
    /// [`Self::move_delta`].
    pub(crate) fn apply_move(&mut self, doc: &SparseVector, pos: usize, from: usize, to: usize) {
        let old_from = Parts::of(&self.stats[from]);
        let old_to = Parts::of(&self.stats[to]);
        let cross = self.doc_cross[pos];
        self.composites[from].remove(doc);
        self.composites[to].add(doc);
        let f = &mut self.stats[from];
        f.size -= 1;
        f.cross -= cross;
        f.intra = self.composites[from].squared_norm();
        let t = &mut self.stats[to];
        t.size += 1;
        t.cross += cross;
        t.intra = self.composites[to].squared_norm();
        self.parts.add(&old_from, -1.0);
        self.parts.add(&old_to, -1.0);
        let (nf, nt) = (Parts::of(&self.stats[from]), Parts::of(&self.stats[to]));
        self.parts.add(&nf, 1.0);
        self.parts.add(&nt, 1.0);
        self.updates += 1;
    }
}
