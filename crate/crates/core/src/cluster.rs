//! Partitional clustering drivers: repeated bisection, direct k-way and
//! average-link agglomeration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::criterion::{value_from_stats, ClusterStats, CriterionKind};
use crate::error::{Error, Result};
use crate::partition::{Partition, RefineStats};
use crate::rng::{derive_seed, stream};
use crate::sparse::{dot, CompositeVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    RepeatedBisection,
    Direct,
    Agglomerative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RepeatedBisection => "rb",
            Method::Direct => "direct",
            Method::Agglomerative => "agglo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rb" => Ok(Method::RepeatedBisection),
            "direct" => Ok(Method::Direct),
            "agglo" => Ok(Method::Agglomerative),
            _ => Err(Error::InvalidInput(format!(
                "unknown method {s:?} (expected rb, direct or agglo)"
            ))),
        }
    }
}

/// Which cluster repeated bisection splits next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BisectSelection {
    /// The cluster with the most documents, ties to the lowest index.
    #[default]
    Largest,
    /// Tentatively bisect every cluster and keep the split with the best
    /// global criterion value.
    BestGain,
}

impl FromStr for BisectSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "largest" => Ok(BisectSelection::Largest),
            "best-gain" => Ok(BisectSelection::BestGain),
            _ => Err(Error::InvalidInput(format!(
                "unknown bisection selection {s:?} (expected largest or best-gain)"
            ))),
        }
    }
}

impl fmt::Display for BisectSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BisectSelection::Largest => "largest",
            BisectSelection::BestGain => "best-gain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub kind: CriterionKind,
    pub k: usize,
    pub n_trials: usize,
    pub max_refine_iters: usize,
    pub seed: u64,
    pub method: Method,
    pub bisect_selection: BisectSelection,
}

impl ClusterConfig {
    pub const DEFAULT_TRIALS: usize = 10;
    pub const DEFAULT_REFINE_ITERS: usize = 10;

    pub fn new(method: Method, kind: CriterionKind, k: usize) -> Self {
        ClusterConfig {
            kind,
            k,
            n_trials: Self::DEFAULT_TRIALS,
            max_refine_iters: Self::DEFAULT_REFINE_ITERS,
            seed: 0,
            method,
            bisect_selection: BisectSelection::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidInput("n_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Refines `partition` with sweeps over a freshly shuffled document order.
pub fn refine<R: Rng>(
    partition: &mut Partition<'_>,
    kind: CriterionKind,
    max_sweeps: usize,
    rng: &mut R,
) -> RefineStats {
    partition.refine_with(
        kind,
        max_sweeps,
        |n| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            order
        },
        |_| {},
    )
}

/// Keeps the best-valued candidate; earlier candidates win ties.
fn best_of<'c>(
    kind: CriterionKind,
    candidates: Vec<Result<Partition<'c>>>,
) -> Result<Partition<'c>> {
    let mut best: Option<(f64, Partition<'c>)> = None;
    for candidate in candidates {
        let p = candidate?;
        let v = p.value(kind)?;
        if best.as_ref().is_none_or(|(b, _)| kind.better(v, *b)) {
            best = Some((v, p));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidInput("no trials were run".into()))
}

/// Splits the corpus documents `ids` into two non-empty clusters, keeping
/// the best of `n_trials` seeded and refined trials.
pub fn bisect<'c>(
    corpus: &'c Corpus,
    ids: &[usize],
    kind: CriterionKind,
    n_trials: usize,
    max_refine_iters: usize,
    seed: u64,
) -> Result<Partition<'c>> {
    if ids.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "cannot bisect a set of {} document(s)",
            ids.len()
        )));
    }
    let trials: Vec<_> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, &[t]);
            bisect_trial(corpus, ids, kind, max_refine_iters, &mut rng)
        })
        .collect();
    best_of(kind, trials)
}

fn bisect_trial<'c, R: Rng>(
    corpus: &'c Corpus,
    ids: &[usize],
    kind: CriterionKind,
    max_refine_iters: usize,
    rng: &mut R,
) -> Result<Partition<'c>> {
    let picked = index::sample(rng, ids.len(), 2);
    let (a, b) = (picked.index(0), picked.index(1));
    let (seed_a, seed_b) = (corpus.doc(ids[a]), corpus.doc(ids[b]));
    let assignment = ids
        .iter()
        .enumerate()
        .map(|(pos, &id)| {
            if pos == a {
                0
            } else if pos == b {
                1
            } else {
                let d = corpus.doc(id);
                usize::from(dot(d, seed_b) > dot(d, seed_a))
            }
        })
        .collect();
    let mut partition = Partition::on_subset(corpus, ids.to_vec(), assignment)?;
    refine(&mut partition, kind, max_refine_iters, rng);
    Ok(partition)
}

struct Node {
    ids: Vec<usize>,
    tag: u64,
    split: Option<Split>,
}

struct Split {
    children: [Vec<usize>; 2],
    stats: [ClusterStats; 2],
}

/// Global summaries for clusters of the full corpus.
struct GlobalStats {
    doc_cross: Vec<f64>,
    dim: usize,
}

impl GlobalStats {
    fn new(corpus: &Corpus) -> Self {
        let total = CompositeVector::from_docs(corpus.vocab_size(), corpus.docs());
        GlobalStats {
            doc_cross: corpus.docs().iter().map(|d| total.dot_sparse(d)).collect(),
            dim: corpus.vocab_size(),
        }
    }

    fn of(&self, corpus: &Corpus, ids: &[usize]) -> ClusterStats {
        let c = CompositeVector::from_docs(self.dim, ids.iter().map(|&i| corpus.doc(i)));
        ClusterStats {
            size: ids.len(),
            intra: c.squared_norm(),
            cross: ids.iter().map(|&i| self.doc_cross[i]).sum(),
        }
    }
}

/// Starts from one cluster and performs `k - 1` bisections.
pub fn repeated_bisection<'c>(corpus: &'c Corpus, config: &ClusterConfig) -> Result<Partition<'c>> {
    config.validate(corpus.n())?;
    let mut nodes = vec![Node {
        ids: (0..corpus.n()).collect(),
        tag: 0,
        split: None,
    }];
    let global = match config.bisect_selection {
        BisectSelection::BestGain => Some(GlobalStats::new(corpus)),
        BisectSelection::Largest => None,
    };
    let mut node_stats: Vec<ClusterStats> = Vec::new();
    if let Some(g) = &global {
        node_stats.push(g.of(corpus, &nodes[0].ids));
    }

    let split_node = |node: &Node| -> Result<Split> {
        let p = bisect(
            corpus,
            &node.ids,
            config.kind,
            config.n_trials,
            config.max_refine_iters,
            derive_seed(config.seed, &[node.tag]),
        )?;
        let children = [p.member_ids(0), p.member_ids(1)];
        let stats = match &global {
            Some(g) => [0, 1].map(|c| ClusterStats {
                size: children[c].len(),
                intra: p.state().stats()[c].intra,
                cross: children[c].iter().map(|&i| g.doc_cross[i]).sum(),
            }),
            None => [0, 1].map(|c| p.state().stats()[c]),
        };
        Ok(Split { children, stats })
    };

    while nodes.len() < config.k {
        let target = match config.bisect_selection {
            BisectSelection::Largest => {
                let mut best = 0;
                for (i, node) in nodes.iter().enumerate() {
                    if node.ids.len() > nodes[best].ids.len() {
                        best = i;
                    }
                }
                best
            }
            BisectSelection::BestGain => {
                let mut best: Option<(usize, f64)> = None;
                for (i, node) in nodes.iter_mut().enumerate() {
                    if node.ids.len() < 2 {
                        continue;
                    }
                    if node.split.is_none() {
                        let split = split_node(node)?;
                        node.split = Some(split);
                    }
                    let split = node.split.as_ref().unwrap();
                    let candidate = node_stats
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, s)| s)
                        .chain(split.stats.iter());
                    let v = value_from_stats(candidate, config.kind)?;
                    if best.is_none_or(|(_, b)| config.kind.better(v, b)) {
                        best = Some((i, v));
                    }
                }
                best.expect("k <= n leaves a splittable cluster").0
            }
        };
        let split = match nodes[target].split.take() {
            Some(s) => s,
            None => split_node(&nodes[target])?,
        };
        let tag = nodes[target].tag;
        let [left, right] = split.children;
        nodes[target] = Node {
            ids: left,
            tag: derive_seed(tag, &[0]),
            split: None,
        };
        nodes.push(Node {
            ids: right,
            tag: derive_seed(tag, &[1]),
            split: None,
        });
        if global.is_some() {
            node_stats[target] = split.stats[0];
            node_stats.push(split.stats[1]);
        }
    }

    let mut assignment = vec![0; corpus.n()];
    for (c, node) in nodes.iter().enumerate() {
        for &i in &node.ids {
            assignment[i] = c;
        }
    }
    let mut partition = Partition::new(corpus, assignment)?;
    partition.canonicalize();
    Ok(partition)
}

/// Seeds `k` clusters with random documents, assigns the rest by cosine
/// similarity and refines with moves between any pair of clusters.
pub fn direct_kway<'c>(corpus: &'c Corpus, config: &ClusterConfig) -> Result<Partition<'c>> {
    config.validate(corpus.n())?;
    let trials: Vec<_> = (0..config.n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(config.seed, &[t]);
            direct_trial(corpus, config, &mut rng)
        })
        .collect();
    let mut partition = best_of(config.kind, trials)?;
    partition.canonicalize();
    Ok(partition)
}

fn direct_trial<'c, R: Rng>(corpus: &'c Corpus, config: &ClusterConfig, rng: &mut R) -> Result<Partition<'c>> {
    let k = config.k;
    let seeds: Vec<_> = index::sample(rng, corpus.n(), k)
        .into_iter()
        .map(|i| corpus.doc(i))
        .collect();
    let mut assignment: Vec<usize> = corpus
        .docs()
        .iter()
        .map(|d| {
            let mut best = (0, f64::NEG_INFINITY);
            for (c, s) in seeds.iter().enumerate() {
                let sim = dot(d, s);
                if sim > best.1 {
                    best = (c, sim);
                }
            }
            best.0
        })
        .collect();
    repair_empty(corpus, &mut assignment, k);
    let mut partition = Partition::new(corpus, assignment)?;
    refine(&mut partition, config.kind, config.max_refine_iters, rng);
    Ok(partition)
}

/// Fills every empty cluster with the document of the largest cluster that
/// is least similar to that cluster's centroid.
fn repair_empty(corpus: &Corpus, assignment: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut largest = 0;
        for c in 1..k {
            if sizes[c] > sizes[largest] {
                largest = c;
            }
        }
        let members: Vec<usize> = (0..assignment.len()).filter(|&i| assignment[i] == largest).collect();
        let centroid = CompositeVector::from_docs(corpus.vocab_size(), members.iter().map(|&i| corpus.doc(i)));
        let mut worst = (members[0], f64::INFINITY);
        for &i in &members {
            let sim = centroid.dot_sparse(corpus.doc(i));
            if sim < worst.1 {
                worst = (i, sim);
            }
        }
        assignment[worst.0] = empty;
        sizes[largest] -= 1;
        sizes[empty] += 1;
    }
}

/// Average-link agglomeration over cosine similarity, stopping at `k`
/// clusters.
///
/// The similarity of clusters `a` and `b` is `<D_a, D_b> / (n_a n_b)`. The
/// pair sums `<D_a, D_b>` are kept in a triangular table and merged by
/// addition. Ties go to the lowest `(a, b)` pair, where a cluster is named by
/// its smallest document id.
pub fn agglomerative(corpus: &Corpus, k: usize) -> Result<Partition<'_>> {
    let n = corpus.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let docs = corpus.docs();
    // rows[a][b - a - 1] = <D_a, D_b> for a < b.
    let mut rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| ((a + 1)..n).map(|b| dot(&docs[a], &docs[b])).collect())
        .collect();
    let sum = |rows: &Vec<Vec<f64>>, a: usize, b: usize| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        rows[lo][hi - lo - 1]
    };
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();

    let best_partner = |rows: &Vec<Vec<f64>>, size: &[usize], active: &[bool], a: usize| {
        let mut best: Option<(f64, usize)> = None;
        for c in (0..n).filter(|&c| c != a && active[c]) {
            let sim = sum(rows, a, c) / (size[a] * size[c]) as f64;
            if best.is_none_or(|(s, _)| sim > s) {
                best = Some((sim, c));
            }
        }
        best
    };
    let mut best: Vec<Option<(f64, usize)>> = (0..n)
        .map(|a| best_partner(&rows, &size, &active, a))
        .collect();

    for _ in 0..(n - k) {
        let mut pick: Option<(f64, usize, usize)> = None;
        for a in (0..n).filter(|&a| active[a]) {
            if let Some((sim, p)) = best[a] {
                let (lo, hi) = if a < p { (a, p) } else { (p, a) };
                let better = match pick {
                    None => true,
                    Some((s, pl, ph)) => sim > s || (sim == s && (lo, hi) < (pl, ph)),
                };
                if better {
                    pick = Some((sim, lo, hi));
                }
            }
        }
        let (_, a, b) = pick.expect("more than k active clusters");

        for c in (0..n).filter(|&c| active[c] && c != a && c != b) {
            let merged = sum(&rows, a, c) + sum(&rows, b, c);
            let (lo, hi) = if a < c { (a, c) } else { (c, a) };
            rows[lo][hi - lo - 1] = merged;
        }
        size[a] += size[b];
        active[b] = false;
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        best[b] = None;

        best[a] = best_partner(&rows, &size, &active, a);
        for c in (0..n).filter(|&c| active[c] && c != a) {
            match best[c] {
                Some((_, p)) if p == a || p == b => {
                    best[c] = best_partner(&rows, &size, &active, c);
                }
                Some((s, p)) => {
                    let sim = sum(&rows, a, c) / (size[a] * size[c]) as f64;
                    if sim > s || (sim == s && a < p) {
                        best[c] = Some((sim, a));
                    }
                }
                None => best[c] = best_partner(&rows, &size, &active, c),
            }
        }
    }

    let mut assignment = vec![0; n];
    for (label, slot) in (0..n).filter(|&s| active[s]).enumerate() {
        for &i in &members[slot] {
            assignment[i] = label;
        }
    }
    Partition::new(corpus, assignment)
}

/// A finished clustering and the wall-clock seconds spent computing it.
#[derive(Debug, Clone)]
pub struct ClusterRun<'c> {
    pub partition: Partition<'c>,
    pub wall_time: f64,
}

/// Runs the configured method; `wall_time` covers only the clustering call.
pub fn run_clustering<'c>(corpus: &'c Corpus, config: &ClusterConfig) -> Result<ClusterRun<'c>> {
    config.validate(corpus.n())?;
    let start = Instant::now();
    let partition = match config.method {
        Method::RepeatedBisection => repeated_bisection(corpus, config)?,
        Method::Direct => direct_kway(corpus, config)?,
        Method::Agglomerative => agglomerative(corpus, config.k)?,
    };
    let wall_time = start.elapsed().as_secs_f64();
    Ok(ClusterRun {
        partition,
        wall_time,
    })
}
