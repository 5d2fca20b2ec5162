//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use corrclust_core::classify::assign_to_clusters;
use corrclust_core::learn::{score_all, score_cross, train, PairDataset, TrainConfig};
use corrclust_core::solver::{solve, solve_exact, solve_gaec, MAX_EXACT_LIMIT};
use corrclust_core::synth::{make_planted_partition, sample_embeddings, sample_logits, NoiseModel, PlantedSpec};
use corrclust_core::{PairLabeling, Partition, SolverConfig};

use crate::io;
use crate::report;
use crate::reproduce::{self, Experiment, ReproConfig};

#[derive(Debug, Parser)]
#[command(name = "corrclust", version, about = "Correlation clustering of pairwise logits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a planted partition with noisy logits and/or class embeddings.
    Synth(SynthArgs),
    /// Fit the pairwise scorer to labeled features.
    Train(TrainArgs),
    /// Score all pairs of a feature set, or all pairs across two sets.
    Score(ScoreArgs),
    /// Cluster a logit matrix.
    Solve(SolveArgs),
    /// Assign test elements to the most probable training cluster.
    Classify(ClassifyArgs),
    /// Compare a prediction with the true partition.
    Eval(EvalArgs),
    /// Run a seeded experiment and print its table.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Cluster sizes: "KxS" for K clusters of S elements, or a comma list.
    #[arg(long)]
    pub sizes: String,
    #[arg(long, default_value_t = 1.5)]
    pub mu: f64,
    /// Mean magnitude of cut logits; defaults to --mu.
    #[arg(long)]
    pub mu_cut: Option<f64>,
    /// Logit noise, or embedding noise when writing features.
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_logits: Option<PathBuf>,
    #[arg(long)]
    pub out_truth: Option<PathBuf>,
    #[arg(long)]
    pub out_features: Option<PathBuf>,
    #[arg(long)]
    pub out_classes: Option<PathBuf>,
    /// Embedding dimension.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Minimum distance between class centers.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub classes: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 20_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e6)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Score --features (rows) against these features (columns) instead.
    #[arg(long)]
    pub cross_with: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub logits: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Stop after greedy edge contraction.
    #[arg(long, conflicts_with = "exact")]
    pub gaec_only: bool,
    /// Enumerate all partitions (small instances only).
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 14)]
    pub exact_limit: usize,
    #[arg(long, default_value_t = 100)]
    pub max_passes: usize,
    /// Minimum gain for a local move to be accepted.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Test-by-train logits.
    #[arg(long)]
    pub cross: PathBuf,
    #[arg(long)]
    pub train_truth: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub truth: PathBuf,
    /// Partition or pair-labeling file.
    #[arg(long)]
    pub pred: PathBuf,
    /// Per-element group tags for subgroup tables.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
    /// Write the cluster-by-class precision/recall table here.
    #[arg(long)]
    pub fig3: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// threshold-vs-cc, joint, unseen, noise, learning, oracle or fig3.
    #[arg(long)]
    pub experiment: String,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub clusters: usize,
    #[arg(long, default_value_t = 16)]
    pub cluster_size: usize,
    #[arg(long, default_value_t = reproduce::DEFAULT_MU)]
    pub mu: f64,
    #[arg(long, default_value_t = reproduce::DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Training elements per class in the "+T" protocols.
    #[arg(long, default_value_t = 8)]
    pub train_per_class: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::FormatError> for Failure {
    fn from(e: io::FormatError) -> Self {
        Failure::Data(e.into())
    }
}

impl From<corrclust_core::Error> for Failure {
    fn from(e: corrclust_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` and runs the command, printing diagnostics to stderr.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train_cmd(a),
        Command::Score(a) => score(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Eval(a) => eval(a),
        Command::Reproduce(a) => reproduce_cmd(a),
    }
}

/// Parses "KxS" or "a,b,c".
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid --sizes {s:?}: expected KxS or a comma list of positive integers");
    let sizes: Vec<usize> = if let Some((k, size)) = s.split_once('x') {
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let size: usize = size.trim().parse().map_err(|_| bad())?;
        vec![size; k]
    } else {
        s.split(',')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

fn read(path: &Path) -> Result<String, Failure> {
    Ok(io::read_text(path)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    Ok(io::write_text(path, text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn context<T, E: Into<anyhow::Error>>(r: Result<T, E>, what: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::Data(e.into().context(format!("reading {}", what.display()))))
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let sizes = parse_sizes(&a.sizes).map_err(usage)?;
    let wants_logits = a.out_logits.is_some() || a.out_truth.is_some();
    let wants_embeddings = a.out_features.is_some() || a.out_classes.is_some();
    if !wants_logits && !wants_embeddings {
        return Err(usage("synth needs --out-logits/--out-truth or --out-features/--out-classes"));
    }
    let truth = make_planted_partition(&PlantedSpec {
        cluster_sizes: sizes.clone(),
        seed: a.seed,
    })?;
    if let Some(p) = &a.out_truth {
        write(p, &io::write_partition(&truth))?;
    }
    if let Some(p) = &a.out_logits {
        let nm = NoiseModel {
            mu_join: a.mu,
            mu_cut: a.mu_cut.unwrap_or(a.mu),
            sigma: a.sigma,
        };
        nm.validate().map_err(|e| usage(e.to_string()))?;
        write(p, &io::write_logits(&sample_logits(&truth, &nm, a.seed)?))?;
    }
    if wants_embeddings {
        let (features, classes) = sample_embeddings(&sizes, a.dim, a.separation, a.sigma, a.seed)
            .map_err(|e| usage(e.to_string()))?;
        if let Some(p) = &a.out_features {
            write(p, &io::write_features(&features))?;
        }
        if let Some(p) = &a.out_classes {
            write(p, &io::write_classes(&classes))?;
        }
    }
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<(), Failure> {
    let cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch,
        iterations: a.iters,
        seed: a.seed,
        weight_decay: a.weight_decay,
        tau: a.tau,
        ..TrainConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let features = context(io::read_features(&read(&a.features)?), &a.features)?;
    let classes = context(io::read_classes(&read(&a.classes)?), &a.classes)?;
    let ds = PairDataset::new(features, classes)?;
    let outcome = train(&ds, &cfg)?;
    write(&a.out, &io::write_model(&outcome.params))?;
    let tail = outcome.losses.len().min(100);
    let recent = &outcome.losses[outcome.losses.len() - tail..];
    let mean = if tail == 0 { f64::NAN } else { recent.iter().sum::<f64>() / tail as f64 };
    println!(
        "{}",
        serde_json::json!({ "iterations": outcome.losses.len(), "mean_loss_last_100": mean })
    );
    Ok(())
}

fn score(a: ScoreArgs) -> Result<(), Failure> {
    let params = context(io::read_model(&read(&a.model)?), &a.model)?;
    let features = context(io::read_features(&read(&a.features)?), &a.features)?;
    let text = match &a.cross_with {
        Some(other) => {
            let cols = context(io::read_features(&read(other)?), other)?;
            io::write_cross(&score_cross(&params, &features, &cols)?)
        }
        None => io::write_logits(&score_all(&params, &features)?),
    };
    write(&a.out, &text)
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let cfg = SolverConfig {
        max_klj_passes: a.max_passes,
        exact_limit: a.exact_limit,
        epsilon_gain: a.epsilon,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let m = context(io::read_logits(&read(&a.logits)?), &a.logits)?;
    let p = if a.exact {
        solve_exact(&m, cfg.exact_limit.min(MAX_EXACT_LIMIT))?
    } else if a.gaec_only {
        solve_gaec(&m)
    } else {
        solve(&m, &cfg)
    };
    write(&a.out, &io::write_partition(&p))?;
    let objective = m.objective(&p.to_labeling())?;
    println!(
        "{}",
        serde_json::json!({ "n": p.len(), "clusters": p.num_clusters(), "objective": objective })
    );
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<(), Failure> {
    let cross = context(io::read_cross(&read(&a.cross)?), &a.cross)?;
    let train_truth = context(io::read_partition(&read(&a.train_truth)?), &a.train_truth)?;
    if cross.cols() != train_truth.len() {
        return Err(Failure::Data(anyhow!(
            "cross scores have {} training columns but the training partition has n={}",
            cross.cols(),
            train_truth.len()
        )));
    }
    let assignment = assign_to_clusters(&cross, &train_truth)?;
    write(&a.out, &io::write_classes(&assignment))
}

/// Reads a partition file, or a pair-labeling file by its header.
fn read_prediction(path: &Path) -> Result<PairLabeling, Failure> {
    let text = read(path)?;
    let y = match io::header_kind(&text) {
        Some("pairs") => io::read_pairs(&text),
        _ => io::read_partition(&text).map(|p: Partition| p.to_labeling()),
    };
    context(y, path)
}

fn eval(a: EvalArgs) -> Result<(), Failure> {
    let truth = context(io::read_partition(&read(&a.truth)?), &a.truth)?;
    let pred = read_prediction(&a.pred)?;
    if truth.len() != pred.n() {
        return Err(Failure::Data(anyhow!(
            "size mismatch: truth has n={} but pred has n={}",
            truth.len(),
            pred.n()
        )));
    }
    let groups = match &a.groups {
        Some(p) => {
            let g = context(io::read_groups(&read(p)?), p)?;
            if g.len() != truth.len() {
                return Err(Failure::Data(anyhow!(
                    "size mismatch: truth has n={} but groups has n={}",
                    truth.len(),
                    g.len()
                )));
            }
            Some(g)
        }
        None => None,
    };
    let r = report::evaluate(&truth, &pred, groups.as_ref(), None)?;
    if let Some(path) = &a.fig3 {
        let p = pred
            .to_partition()
            .context("the cluster-by-class table needs a partition as prediction")?;
        write(path, &report::report_fig3(&truth, &p)?)?;
    }
    let text = match a.report {
        ReportFormat::Json => report::to_json(&r),
        ReportFormat::Tsv => report::to_tsv(&r),
    };
    emit(a.out.as_deref(), &text)
}

fn reproduce_cmd(a: ReproduceArgs) -> Result<(), Failure> {
    let experiment = Experiment::parse(&a.experiment).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|(n, _)| *n).collect();
        usage(format!("unknown experiment {:?}; expected one of {}", a.experiment, names.join(", ")))
    })?;
    if a.seeds == 0 || a.clusters == 0 || a.cluster_size == 0 {
        return Err(usage("--seeds, --clusters and --cluster-size must be positive"));
    }
    let cfg = ReproConfig {
        experiment,
        seeds: a.seeds,
        base_seed: a.seed,
        clusters: a.clusters,
        cluster_size: a.cluster_size,
        mu: a.mu,
        sigma: a.sigma,
        train_per_class: a.train_per_class,
        threads: reproduce::threads_from_env(),
        solver: SolverConfig::default(),
    };
    NoiseModel::symmetric(cfg.mu, cfg.sigma)
        .validate()
        .map_err(|e| usage(e.to_string()))?;
    let text = reproduce::run(&cfg)?;
    emit(a.out.as_deref(), &text)
}
