use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use kplateau::sweep::DEFAULT_EPS;
use kplateau::{
    build_corpus, evaluate, evaluate_partition, load_labels, load_sparse_matrix, read_csv,
    recommend_k, recommend_per_kind, run_clustering, sweep, write_csv, BisectSelection,
    ClusterConfig, Corpus, CriterionKind, Method, SweepConfig, Weighting,
};
use log::info;

/// Criterion-driven document clustering and k sweeps.
#[derive(Parser, Debug)]
#[command(name = "kplateau", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster a corpus once and write the assignment.
    Cluster(ClusterArgs),
    /// Score an assignment file against class labels.
    Eval(EvalArgs),
    /// Cluster over a grid of k and criterion kinds, writing a CSV.
    Sweep(SweepArgs),
    /// Recommend k from a sweep CSV.
    Recommend(RecommendArgs),
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Sparse document-term matrix (header `n_docs n_terms nnz`, then
    /// `term value` pairs with 1-based terms, one document per line).
    #[arg(long)]
    matrix: PathBuf,
    /// Class labels, one per matrix row.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = Weighting::TfIdf)]
    weighting: Weighting,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = Method::RepeatedBisection)]
    method: Method,
    /// Trials per bisection (or per direct k-way run).
    #[arg(long, default_value_t = ClusterConfig::DEFAULT_TRIALS, value_parser = positive)]
    trials: usize,
    #[arg(long, default_value_t = ClusterConfig::DEFAULT_REFINE_ITERS)]
    max_refine_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which cluster repeated bisection splits next.
    #[arg(long, default_value_t = BisectSelection::Largest)]
    bisect_selection: BisectSelection,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = CriterionKind::I2)]
    kind: CriterionKind,
    /// Number of clusters.
    #[arg(long, value_parser = positive)]
    k: usize,
    /// Assignment output (one 0-based cluster per matrix row, -1 for dropped
    /// rows). Defaults to stdout, in which case the summary goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_delimiter = ',', default_value = "i2")]
    kinds: Vec<CriterionKind>,
    /// Comma-separated ascending cluster counts.
    #[arg(long, value_delimiter = ',',
          default_value = "2,4,5,10,15,20,25,50,75,100,150,200")]
    k_grid: Vec<usize>,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    repeats: usize,
    /// Write 0 for wall time so identical runs give identical files.
    #[arg(long)]
    no_timing: bool,
    /// CSV output; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RecommendArgs {
    /// Sweep CSV.
    csv: PathBuf,
    /// Only recommend for this kind; by default every kind in the CSV.
    #[arg(long)]
    kind: Option<CriterionKind>,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps_entropy: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps_purity: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// A command line that parsed but makes no sense.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Cluster(args) => cluster_cmd(args),
        Command::Eval(args) => eval_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Recommend(args) => recommend_cmd(args),
    }
}

fn load_corpus(args: &CorpusArgs) -> anyhow::Result<Corpus> {
    let raw = load_sparse_matrix(&args.matrix)?;
    let labels = match &args.labels {
        Some(path) => Some(load_labels(path, raw.n_docs)?),
        None => None,
    };
    let corpus = build_corpus(&raw, labels, args.weighting)?;
    info!(
        "loaded {} documents over {} terms ({} nonzeros)",
        corpus.n(),
        corpus.vocab_size(),
        raw.nnz()
    );
    Ok(corpus)
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cluster_cmd(args: ClusterArgs) -> anyhow::Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let k = args.k;
    if k > corpus.n() {
        bail!("--k {k} exceeds the number of documents ({})", corpus.n());
    }
    let config = ClusterConfig {
        kind: args.kind,
        k,
        n_trials: args.search.trials,
        max_refine_iters: args.search.max_refine_iters,
        seed: args.search.seed,
        method: args.search.method,
        bisect_selection: args.search.bisect_selection,
    };
    let run = run_clustering(&corpus, &config)?;

    let rows = corpus.source_rows().len() + corpus.dropped_rows().len();
    let mut per_row: Vec<Option<usize>> = vec![None; rows];
    for (&row, &c) in corpus.source_rows().iter().zip(run.partition.assignment()) {
        per_row[row] = Some(c);
    }
    let mut out = output(args.out.as_deref())?;
    for c in &per_row {
        match c {
            Some(c) => writeln!(out, "{c}")?,
            None => writeln!(out, "-1")?,
        }
    }
    out.flush()?;
    drop(out);

    let mut summary = format!(
        "method={}\nkind={}\nk={}\nvalue={}\nwall_time_s={}\n",
        config.method,
        config.kind,
        k,
        kplateau::format::sig6(run.partition.value(config.kind)?),
        kplateau::format::sig6(run.wall_time),
    );
    if corpus.labels().is_some() {
        summary.push_str(&evaluate_partition(&run.partition, &corpus)?.to_text());
    }
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

/// Reads one cluster index per line; `-1` marks a row without a cluster.
fn read_assignment(path: &Path) -> anyhow::Result<Vec<Option<usize>>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>()?;
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| match l.trim() {
            "-1" => Ok(None),
            s => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| anyhow!("{}:{}: bad cluster index {s:?}", path.display(), i + 1)),
        })
        .collect()
}

fn eval_cmd(args: EvalArgs) -> anyhow::Result<()> {
    let assignment = read_assignment(&args.assignment)?;
    let labels = load_labels(&args.labels, assignment.len())
        .with_context(|| format!("{} does not match the assignment", args.labels.display()))?;
    let keep: Vec<usize> = (0..assignment.len()).filter(|&i| assignment[i].is_some()).collect();
    let clusters: Vec<usize> = keep.iter().filter_map(|&i| assignment[i]).collect();
    let report = evaluate(&clusters, &labels.select(&keep))?;
    print!("{}", report.to_text());
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> anyhow::Result<()> {
    if args.k_grid.contains(&0) {
        return Err(usage("--k-grid values must be at least 1"));
    }
    if args.k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("--k-grid must be strictly ascending"));
    }
    if args.kinds.is_empty() {
        return Err(usage("--kinds needs at least one criterion"));
    }
    let corpus = load_corpus(&args.corpus)?;
    if corpus.labels().is_none() {
        bail!("sweep needs --labels to score entropy and purity");
    }
    let config = SweepConfig {
        k_grid: args.k_grid,
        kinds: args.kinds,
        method: args.search.method,
        seed: args.search.seed,
        repeats: args.repeats,
        n_trials: args.search.trials,
        max_refine_iters: args.search.max_refine_iters,
        bisect_selection: args.search.bisect_selection,
        record_timing: !args.no_timing,
    };
    let outcome = sweep(&corpus, &config)?;
    for f in &outcome.failures {
        eprintln!("warning: cell k={} kind={} repeat={} failed: {}", f.k, f.kind, f.repeat, f.error);
    }
    let mut out = output(args.out.as_deref())?;
    write_csv(&outcome.rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn recommend_cmd(args: RecommendArgs) -> anyhow::Result<()> {
    let file = File::open(&args.csv).with_context(|| format!("cannot open {}", args.csv.display()))?;
    let mut rows = read_csv(BufReader::new(file))?;
    if let Some(kind) = args.kind {
        rows.retain(|r| r.kind == kind);
        if rows.is_empty() {
            bail!("{} has no rows for kind {kind}", args.csv.display());
        }
    }
    let recs = if args.kind.is_some() {
        vec![recommend_k(&rows, args.eps_entropy, args.eps_purity)?]
    } else {
        recommend_per_kind(&rows, args.eps_entropy, args.eps_purity)?
    };
    let text: Vec<String> = recs.iter().map(|r| r.to_text()).collect();
    let mut out = output(args.out.as_deref())?;
    write!(out, "{}", text.join("\n"))?;
    out.flush()?;
    Ok(())
}
