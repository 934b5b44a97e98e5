//! Entropy and purity of a clustering against ground-truth classes.
//!
//! For a cluster `S_r` of size `n_r` holding `n_r^i` documents of class `i`
//! out of `q` classes:
//!
//! ```text
//! E(S_r)  = -1/ln(q) * sum_i (n_r^i / n_r) ln(n_r^i / n_r)
//! Pu(S_r) = max_i n_r^i / n_r
//! ```
//!
//! The solution-level scores weight each cluster by `n_r / n`. Lower entropy
//! and higher purity are better.

use crate::corpus::{Corpus, Labels};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Cluster-by-class contingency table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    counts: Vec<Vec<usize>>,
    q: usize,
}

impl ConfusionCounts {
    /// `assignment[d]` is the cluster of document `d`. The number of rows is
    /// one past the largest cluster id.
    pub fn new(assignment: &[usize], labels: &Labels) -> Result<Self> {
        if assignment.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                found: assignment.len(),
            });
        }
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let q = labels.q();
        let mut counts = vec![vec![0; q]; k];
        for (&c, &class) in assignment.iter().zip(labels.ids()) {
            counts[c][class] += 1;
        }
        Ok(ConfusionCounts { counts, q })
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn row(&self, cluster: usize) -> &[usize] {
        &self.counts[cluster]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

/// Contingency table of a whole-corpus partition.
pub fn confusion(partition: &Partition<'_>, labels: &Labels) -> Result<ConfusionCounts> {
    if partition.n() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: partition.n(),
        });
    }
    let mut counts = vec![vec![0; labels.q()]; partition.k()];
    for (&id, &c) in partition.ids().iter().zip(partition.assignment()) {
        counts[c][labels.ids()[id]] += 1;
    }
    Ok(ConfusionCounts {
        counts,
        q: labels.q(),
    })
}

/// Sums in ascending order so the result does not depend on how clusters or
/// classes are numbered.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Normalized entropy of one cluster's class counts. Zero counts contribute
/// nothing; with a single class the entropy is 0.
pub fn cluster_entropy(row: &[usize], q: usize) -> Result<f64> {
    let n_r: usize = row.iter().sum();
    if n_r == 0 {
        return Err(Error::InvalidInput("entropy of an empty cluster".into()));
    }
    if q <= 1 {
        return Ok(0.0);
    }
    let n_r = n_r as f64;
    let h = ordered_sum(
        row.iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n_r;
                0.0 - p * p.ln()
            })
            .collect(),
    );
    Ok(h / (q as f64).ln())
}

pub fn cluster_purity(row: &[usize]) -> Result<f64> {
    let n_r: usize = row.iter().sum();
    if n_r == 0 {
        return Err(Error::InvalidInput("purity of an empty cluster".into()));
    }
    let max = row.iter().copied().max().unwrap_or(0);
    Ok(max as f64 / n_r as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterQuality {
    pub cluster: usize,
    pub size: usize,
    pub entropy: f64,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub entropy: f64,
    pub purity: f64,
    /// Non-empty clusters only.
    pub per_cluster: Vec<ClusterQuality>,
}

impl QualityReport {
    pub fn from_confusion(counts: &ConfusionCounts) -> Result<Self> {
        let n = counts.total();
        if n == 0 {
            return Err(Error::InvalidInput("no documents to evaluate".into()));
        }
        let mut per_cluster = Vec::with_capacity(counts.k());
        let (mut entropy, mut purity) = (Vec::new(), Vec::new());
        for (r, row) in counts.rows().iter().enumerate() {
            let size: usize = row.iter().sum();
            if size == 0 {
                continue;
            }
            let e = cluster_entropy(row, counts.q())?;
            let p = cluster_purity(row)?;
            let w = size as f64 / n as f64;
            entropy.push(w * e);
            purity.push(w * p);
            per_cluster.push(ClusterQuality {
                cluster: r,
                size,
                entropy: e,
                purity: p,
            });
        }
        Ok(QualityReport {
            entropy: ordered_sum(entropy),
            purity: ordered_sum(purity),
            per_cluster,
        })
    }

    /// Plain-text rendering: summary `key=value` lines, then one line per
    /// cluster.
    pub fn to_text(&self) -> String {
        use crate::format::sig6;
        let mut out = format!(
            "entropy={}\npurity={}\nclusters={}\n",
            sig6(self.entropy),
            sig6(self.purity),
            self.per_cluster.len()
        );
        out.push_str("cluster,size,entropy,purity\n");
        for c in &self.per_cluster {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c.cluster,
                c.size,
                sig6(c.entropy),
                sig6(c.purity)
            ));
        }
        out
    }
}

/// Scores a cluster assignment (one cluster id per document) against labels.
pub fn evaluate(assignment: &[usize], labels: &Labels) -> Result<QualityReport> {
    QualityReport::from_confusion(&ConfusionCounts::new(assignment, labels)?)
}

/// Scores a whole-corpus partition against the corpus labels.
pub fn evaluate_partition(partition: &Partition<'_>, corpus: &Corpus) -> Result<QualityReport> {
    let labels = corpus.labels().ok_or(Error::MissingLabels)?;
    QualityReport::from_confusion(&confusion(partition, labels)?)
}
