//! Quality-versus-k sweeps, CSV output and plateau-based selection of k.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::cluster::{run_clustering, BisectSelection, ClusterConfig, Method};
use crate::corpus::Corpus;
use crate::criterion::CriterionKind;
use crate::error::{Error, Result};
use crate::format::sig6;
use crate::quality::evaluate_partition;
use crate::rng::derive_seed;

/// The cluster counts swept by default.
pub const DEFAULT_K_GRID: [usize; 12] = [2, 4, 5, 10, 15, 20, 25, 50, 75, 100, 150, 200];

pub const CSV_HEADER: &str = "k,kind,criterion_value,entropy,purity,wall_time_s,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_grid: Vec<usize>,
    pub kinds: Vec<CriterionKind>,
    pub method: Method,
    pub seed: u64,
    pub repeats: usize,
    pub n_trials: usize,
    pub max_refine_iters: usize,
    pub bisect_selection: BisectSelection,
    /// When false, `wall_time` is recorded as 0 so output is reproducible
    /// byte-for-byte.
    pub record_timing: bool,
}

impl SweepConfig {
    pub fn new(kinds: Vec<CriterionKind>) -> Self {
        SweepConfig {
            k_grid: DEFAULT_K_GRID.to_vec(),
            kinds,
            method: Method::RepeatedBisection,
            seed: 0,
            repeats: 1,
            n_trials: ClusterConfig::DEFAULT_TRIALS,
            max_refine_iters: ClusterConfig::DEFAULT_REFINE_ITERS,
            bisect_selection: BisectSelection::default(),
            record_timing: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_grid.is_empty() {
            return Err(Error::InvalidInput("empty k grid".into()));
        }
        if self.kinds.is_empty() {
            return Err(Error::InvalidInput("no criterion kinds to sweep".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidInput("repeats must be at least 1".into()));
        }
        if self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("k grid must be strictly ascending".into()));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::InvalidK { k, n });
        }
        Ok(())
    }

    /// The clustering seed of one sweep cell.
    pub fn cell_seed(&self, kind: CriterionKind, k: usize, repeat: usize) -> u64 {
        derive_seed(self.seed, &[kind as u64, k as u64, repeat as u64])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub kind: CriterionKind,
    pub criterion_value: f64,
    pub entropy: f64,
    pub purity: f64,
    pub wall_time: f64,
    /// Seed that reproduces this cell with a single clustering run.
    pub seed: u64,
}

/// A sweep cell that did not produce a row.
#[derive(Debug)]
pub struct CellFailure {
    pub k: usize,
    pub kind: CriterionKind,
    pub repeat: usize,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<CellFailure>,
}

/// Clusters the corpus once per (kind, k, repeat) cell and scores each
/// result. Cells run sequentially so wall-clock times are not distorted by
/// co-scheduling. A failing cell is logged and skipped.
pub fn sweep(corpus: &Corpus, config: &SweepConfig) -> Result<SweepOutcome> {
    if corpus.labels().is_none() {
        return Err(Error::MissingLabels);
    }
    config.validate(corpus.n())?;
    let mut outcome = SweepOutcome::default();
    for &kind in &config.kinds {
        for &k in &config.k_grid {
            for repeat in 0..config.repeats {
                match run_cell(corpus, config, kind, k, repeat) {
                    Ok(row) => {
                        log::info!(
                            "{kind} k={k}: entropy {:.4} purity {:.4} in {:.3}s",
                            row.entropy,
                            row.purity,
                            row.wall_time
                        );
                        outcome.rows.push(row);
                    }
                    Err(error) => {
                        log::warn!("{kind} k={k} repeat {repeat} failed: {error}");
                        outcome.failures.push(CellFailure {
                            k,
                            kind,
                            repeat,
                            error,
                        });
                    }
                }
            }
        }
    }
    sort_rows(&mut outcome.rows);
    Ok(outcome)
}

fn run_cell(
    corpus: &Corpus,
    config: &SweepConfig,
    kind: CriterionKind,
    k: usize,
    repeat: usize,
) -> Result<SweepRow> {
    let seed = config.cell_seed(kind, k, repeat);
    let cluster_config = ClusterConfig {
        kind,
        k,
        n_trials: config.n_trials,
        max_refine_iters: config.max_refine_iters,
        seed,
        method: config.method,
        bisect_selection: config.bisect_selection,
    };
    let run = run_clustering(corpus, &cluster_config)?;
    let quality = evaluate_partition(&run.partition, corpus)?;
    Ok(SweepRow {
        k,
        kind,
        criterion_value: run.partition.value(kind)?,
        entropy: quality.entropy,
        purity: quality.purity,
        wall_time: if config.record_timing { run.wall_time } else { 0.0 },
        seed,
    })
}

/// Sorts by (kind, k); the sort is stable so repeats keep their order.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by_key(|r| (r.kind, r.k));
}

pub fn write_csv(rows: &[SweepRow], mut out: impl Write) -> std::io::Result<()> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    writeln!(out, "{CSV_HEADER}")?;
    for r in &sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k,
            r.kind,
            sig6(r.criterion_value),
            sig6(r.entropy),
            sig6(r.purity),
            sig6(r.wall_time),
            r.seed
        )?;
    }
    Ok(())
}

pub fn read_csv(reader: impl BufRead) -> Result<Vec<SweepRow>> {
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == CSV_HEADER => {}
        Some((_, Ok(h))) => {
            return Err(Error::parse(1, format!("unexpected header {h:?}; expected {CSV_HEADER:?}")))
        }
        Some((_, Err(e))) => return Err(Error::parse(1, e.to_string())),
        None => return Err(Error::parse(1, "empty sweep file")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 7 {
            return Err(Error::parse(lineno, format!("expected 7 fields, found {}", f.len())));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::parse(lineno, format!("bad {what} {s:?}")))
        };
        rows.push(SweepRow {
            k: f[0]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad k {:?}", f[0])))?,
            kind: f[1]
                .parse()
                .map_err(|e: Error| Error::parse(lineno, e.to_string()))?,
            criterion_value: num(f[2], "criterion value")?,
            entropy: num(f[3], "entropy")?,
            purity: num(f[4], "purity")?,
            wall_time: num(f[5], "wall time")?,
            seed: f[6]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad seed {:?}", f[6])))?,
        });
    }
    Ok(rows)
}

pub const DEFAULT_EPS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub kind: Option<CriterionKind>,
    pub recommended_k: usize,
    pub eps_entropy: f64,
    pub eps_purity: f64,
    /// False when no grid point starts a plateau; `recommended_k` is then
    /// the largest grid value.
    pub qualifies: bool,
    /// Largest entropy and purity departures from the recommended point over
    /// the later grid points.
    pub max_entropy_change: f64,
    pub max_purity_change: f64,
    /// Grid points after the recommended one.
    pub window: Vec<usize>,
}

impl Recommendation {
    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(kind) = self.kind {
            let _ = writeln!(out, "kind={kind}");
        }
        let window: Vec<String> = self.window.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "recommended_k={}", self.recommended_k);
        let _ = writeln!(out, "eps_e={}", sig6(self.eps_entropy));
        let _ = writeln!(out, "eps_p={}", sig6(self.eps_purity));
        let _ = writeln!(out, "qualifies={}", self.qualifies);
        let _ = writeln!(out, "max_entropy_change={}", sig6(self.max_entropy_change));
        let _ = writeln!(out, "max_purity_change={}", sig6(self.max_purity_change));
        let _ = writeln!(out, "window={}", window.join(" "));
        out
    }
}

/// Picks the smallest grid k after which neither entropy nor purity moves
/// by more than the tolerances.
///
/// Rows with the same k (repeats) are averaged. A candidate must be
/// followed by at least one later grid point; when none qualifies the
/// largest k is returned with `qualifies = false`.
pub fn recommend_k(rows: &[SweepRow], eps_entropy: f64, eps_purity: f64) -> Result<Recommendation> {
    let mut kinds: Vec<CriterionKind> = rows.iter().map(|r| r.kind).collect();
    kinds.dedup();
    kinds.sort();
    kinds.dedup();
    if kinds.len() > 1 {
        return Err(Error::InvalidInput(
            "rows mix several criterion kinds; recommend one kind at a time".into(),
        ));
    }
    let mut by_k: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = by_k.entry(r.k).or_insert((0.0, 0.0, 0));
        e.0 += r.entropy;
        e.1 += r.purity;
        e.2 += 1;
    }
    let points: Vec<(usize, f64, f64)> = by_k
        .into_iter()
        .map(|(k, (e, p, c))| (k, e / c as f64, p / c as f64))
        .collect();
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 grid points, found {}",
            points.len()
        )));
    }

    let departures = |i: usize| -> (f64, f64) {
        let (_, e0, p0) = points[i];
        points[i + 1..].iter().fold((0.0f64, 0.0f64), |(de, dp), &(_, e, p)| {
            (de.max((e - e0).abs()), dp.max((p - p0).abs()))
        })
    };
    let chosen = (0..points.len() - 1).find(|&i| {
        let (de, dp) = departures(i);
        de <= eps_entropy && dp <= eps_purity
    });
    let (index, qualifies) = match chosen {
        Some(i) => (i, true),
        None => (points.len() - 1, false),
    };
    let (max_entropy_change, max_purity_change) = departures(index);
    Ok(Recommendation {
        kind: kinds.first().copied(),
        recommended_k: points[index].0,
        eps_entropy,
        eps_purity,
        qualifies,
        max_entropy_change,
        max_purity_change,
        window: points[index + 1..].iter().map(|p| p.0).collect(),
    })
}

/// Runs [`recommend_k`] separately for every kind present in `rows`.
pub fn recommend_per_kind(
    rows: &[SweepRow],
    eps_entropy: f64,
    eps_purity: f64,
) -> Result<Vec<Recommendation>> {
    let mut by_kind: BTreeMap<CriterionKind, Vec<SweepRow>> = BTreeMap::new();
    for r in rows {
        by_kind.entry(r.kind).or_default().push(r.clone());
    }
    by_kind
        .values()
        .map(|rows| recommend_k(rows, eps_entropy, eps_purity))
        .collect()
}
