//! Seeded desk-scale versions of the reference experiment tables.
//!
//! Each experiment runs one pipeline per seed, possibly in parallel, and
//! averages the per-seed reports in seed order, so output is independent of
//! the thread count.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use corrclust_core::classify::{assign_to_clusters, classification_accuracy};
use corrclust_core::learn::{pair_accuracy, score_all, train, PairDataset, TrainConfig};
use corrclust_core::solver::{solve, solve_exact, solve_gaec};
use corrclust_core::synth::{
    make_group_labels, make_planted_partition, sample_embeddings, sample_iid_logits, sample_logits, NoiseModel, PlantedSpec,
};
use corrclust_core::{CrossScores, GroupLabels, LogitMatrix, Partition, SolverConfig};
use rayon::prelude::*;

use crate::report::{evaluate, report_fig3, EvalReport, PairMetrics};

/// Noise level that puts the mean threshold Rand index of the default
/// 16 x 16 instance near 0.87.
pub const DEFAULT_SIGMA: f64 = 1.33;
pub const DEFAULT_MU: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// Thresholded logits against GAEC and GAEC + KLj.
    ThresholdVsCc,
    /// Clustering the test set alone, jointly with a labeled training
    /// subsample ("+T"), and classifying into training clusters.
    Joint,
    /// Half of the test classes never appear in training.
    Unseen,
    /// Test set mixed with unrelated noise elements.
    Noise,
    /// Train the pair scorer on embeddings, then threshold or cluster.
    Learning,
    /// Local search against exact enumeration on small instances.
    Oracle,
    /// Cluster-by-class precision and recall of one clustering.
    Fig3,
}

impl Experiment {
    pub const ALL: [(&'static str, Experiment); 7] = [
        ("threshold-vs-cc", Experiment::ThresholdVsCc),
        ("joint", Experiment::Joint),
        ("unseen", Experiment::Unseen),
        ("noise", Experiment::Noise),
        ("learning", Experiment::Learning),
        ("oracle", Experiment::Oracle),
        ("fig3", Experiment::Fig3),
    ];

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|&(_, e)| e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReproConfig {
    pub experiment: Experiment,
    pub seeds: usize,
    pub base_seed: u64,
    pub clusters: usize,
    pub cluster_size: usize,
    pub mu: f64,
    pub sigma: f64,
    /// Training elements per class for the "+T" protocols.
    pub train_per_class: usize,
    /// Upper bound on worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
    pub solver: SolverConfig,
}

impl Default for ReproConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::ThresholdVsCc,
            seeds: 20,
            base_seed: 0,
            clusters: 16,
            cluster_size: 16,
            mu: DEFAULT_MU,
            sigma: DEFAULT_SIGMA,
            train_per_class: 8,
            threads: None,
            solver: SolverConfig::default(),
        }
    }
}

/// Thread cap from `CORRCLUST_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("CORRCLUST_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&t| t > 0)
}

/// Runs the experiment and returns its TSV report.
pub fn run(cfg: &ReproConfig) -> Result<String> {
    if cfg.seeds == 0 {
        anyhow::bail!("--seeds must be at least 1");
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().context("building thread pool")?;
    pool.install(|| match cfg.experiment {
        Experiment::ThresholdVsCc => threshold_vs_cc(cfg),
        Experiment::Joint => joint(cfg),
        Experiment::Unseen => subgroups(cfg, false),
        Experiment::Noise => subgroups(cfg, true),
        Experiment::Learning => learning(cfg),
        Experiment::Oracle => oracle(cfg),
        Experiment::Fig3 => fig3(cfg),
    })
}

fn seeds(cfg: &ReproConfig) -> Vec<u64> {
    (0..cfg.seeds as u64).map(|k| cfg.base_seed.wrapping_add(k)).collect()
}

/// Per-seed reports of each method, in method order.
type Rows = Vec<(&'static str, Vec<EvalReport>)>;

fn collect(names: &[&'static str], per_seed: Vec<Vec<EvalReport>>) -> Rows {
    names
        .iter()
        .enumerate()
        .map(|(k, &name)| (name, per_seed.iter().map(|r| r[k].clone()).collect()))
        .collect()
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values.flatten() {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |x| format!("{x:.4}"))
}

const METHOD_HEADER: &str = "method\tpartition\tRI\tVI\tVI_FC\tVI_FJ\tPC\tRC\tPJ\tRJ\tCA";

fn pair_means(reports: &[&PairMetrics]) -> [Option<f64>; 5] {
    [
        mean(reports.iter().map(|m| m.ri)),
        mean(reports.iter().map(|m| m.pc)),
        mean(reports.iter().map(|m| m.rc)),
        mean(reports.iter().map(|m| m.pj)),
        mean(reports.iter().map(|m| m.rj)),
    ]
}

fn method_table(out: &mut String, rows: &Rows) {
    writeln!(out, "{METHOD_HEADER}").unwrap();
    for (name, reports) in rows {
        let partitions = reports.iter().filter(|r| r.partition).count();
        let pairs: Vec<&PairMetrics> = reports.iter().map(|r| &r.pairs).collect();
        let [ri, pc, rc, pj, rj] = pair_means(&pairs);
        writeln!(
            out,
            "{name}\t{partitions}/{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            reports.len(),
            fmt(ri),
            fmt(mean(reports.iter().map(|r| r.vi))),
            fmt(mean(reports.iter().map(|r| r.vi_fc))),
            fmt(mean(reports.iter().map(|r| r.vi_fj))),
            fmt(pc),
            fmt(rc),
            fmt(pj),
            fmt(rj),
            fmt(mean(reports.iter().map(|r| r.ca))),
        )
        .unwrap();
    }
}

fn bucket_table(out: &mut String, rows: &Rows) {
    writeln!(out, "method\tbucket\tTJ\tTC\tFC\tFJ\tRI\tPC\tRC\tPJ\tRJ").unwrap();
    for (name, reports) in rows {
        let Some(first) = reports.first() else { continue };
        for (b, bucket) in first.buckets.iter().enumerate() {
            let metrics: Vec<&PairMetrics> = reports.iter().map(|r| &r.buckets[b].metrics).collect();
            let sum = |f: fn(&PairMetrics) -> usize| metrics.iter().map(|m| f(m)).sum::<usize>();
            let [ri, pc, rc, pj, rj] = pair_means(&metrics);
            writeln!(
                out,
                "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                bucket.name,
                sum(|m| m.counts.tj),
                sum(|m| m.counts.tc),
                sum(|m| m.counts.fc),
                sum(|m| m.counts.fj),
                fmt(ri),
                fmt(pc),
                fmt(rc),
                fmt(pj),
                fmt(rj),
            )
            .unwrap();
        }
    }
}

fn preamble(cfg: &ReproConfig, name: &str) -> String {
    format!(
        "# experiment={name} seeds={} base_seed={} clusters={} cluster_size={} mu={} sigma={}\n",
        cfg.seeds, cfg.base_seed, cfg.clusters, cfg.cluster_size, cfg.mu, cfg.sigma
    )
}

fn noise(cfg: &ReproConfig) -> NoiseModel {
    NoiseModel::symmetric(cfg.mu, cfg.sigma)
}

fn threshold_vs_cc(cfg: &ReproConfig) -> Result<String> {
    let truth = make_planted_partition(&PlantedSpec::uniform(cfg.clusters, cfg.cluster_size, cfg.base_seed))?;
    let per_seed = seeds(cfg)
        .par_iter()
        .map(|&seed| -> Result<Vec<EvalReport>> {
            let m = sample_logits(&truth, &noise(cfg), seed)?;
            let preds = [
                m.threshold(),
                solve_gaec(&m).to_labeling(),
                solve(&m, &cfg.solver).to_labeling(),
            ];
            preds
                .iter()
                .map(|y| Ok(evaluate(&truth, y, None, None)?))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = preamble(cfg, "threshold-vs-cc");
    method_table(&mut out, &collect(&["threshold", "gaec", "cc"], per_seed));
    Ok(out)
}

/// Test elements `0..n_test` followed by a training subsample, with logits
/// over the union.
struct JointInstance {
    test_labels: Vec<usize>,
    test_truth: Partition,
    train_truth: Partition,
    /// Class of each training cluster id.
    train_class: Vec<usize>,
    union: LogitMatrix,
    groups: Option<GroupLabels>,
}

/// `test_classes[c]` elements of class `c` in the test set; classes below
/// `seen` also get `train_per_class` training elements.
fn joint_instance(
    cfg: &ReproConfig,
    seed: u64,
    test_classes: &[usize],
    seen: usize,
    tags: Option<&[&str]>,
) -> Result<JointInstance> {
    let test_labels: Vec<usize> = test_classes
        .iter()
        .enumerate()
        .flat_map(|(c, &size)| std::iter::repeat_n(c, size))
        .collect();
    let train_labels: Vec<usize> = (0..seen)
        .flat_map(|c| std::iter::repeat_n(c, cfg.train_per_class))
        .collect();
    let union_labels: Vec<usize> = test_labels.iter().chain(&train_labels).copied().collect();
    let union_truth = Partition::from_labels(&union_labels);
    let union = sample_logits(&union_truth, &noise(cfg), seed)?;

    let test_truth = Partition::from_labels(&test_labels);
    let train_truth = Partition::from_labels(&train_labels);
    let mut train_class = vec![0; train_truth.num_clusters()];
    for (u, &c) in train_labels.iter().enumerate() {
        train_class[train_truth.label(u)] = c;
    }
    let groups = match tags {
        Some(tags) => Some(make_group_labels(&test_truth, &class_tags(&test_truth, &test_labels, tags))?),
        None => None,
    };
    Ok(JointInstance {
        test_labels,
        test_truth,
        train_truth,
        train_class,
        union,
        groups,
    })
}

/// Tag per canonical cluster id of `truth`, from the tag of each class.
fn class_tags<'a>(truth: &Partition, labels: &[usize], tags: &[&'a str]) -> Vec<&'a str> {
    let mut out = vec![""; truth.num_clusters()];
    for (e, &c) in labels.iter().enumerate() {
        out[truth.label(e)] = tags[c];
    }
    out
}

/// Threshold, CC alone, CC on the union with the training subsample, and
/// classification into training clusters, all scored on the test set.
fn joint_methods(cfg: &ReproConfig, inst: &JointInstance) -> Result<Vec<EvalReport>> {
    let n = inst.test_truth.len();
    let test_ids: Vec<usize> = (0..n).collect();
    let train_ids: Vec<usize> = (n..inst.union.n()).collect();
    let m_test = inst.union.restrict(&test_ids);
    let m_train = inst.union.restrict(&train_ids);
    let cross = CrossScores::from_fn(n, train_ids.len(), |a, u| inst.union.get(a, n + u))?;
    let merged = m_test.merge(&m_train, &cross)?;
    let g = inst.groups.as_ref();

    let threshold = evaluate(&inst.test_truth, &m_test.threshold(), g, None)?;
    let cc = evaluate(&inst.test_truth, &solve(&m_test, &cfg.solver).to_labeling(), g, None)?;
    let joint = solve(&merged, &cfg.solver).restrict(&test_ids);
    let cc_t = evaluate(&inst.test_truth, &joint.to_labeling(), g, None)?;

    let assigned = assign_to_clusters(&cross, &inst.train_truth)?;
    let predicted: Vec<usize> = assigned.iter().map(|&k| inst.train_class[k]).collect();
    let ca = classification_accuracy(&predicted, &inst.test_labels)?;
    let induced = Partition::from_labels(&predicted).to_labeling();
    let classify = evaluate(&inst.test_truth, &induced, g, Some(ca))?;
    Ok(vec![threshold, cc, cc_t, classify])
}

const JOINT_METHODS: [&str; 4] = ["threshold", "cc", "cc+T", "classify"];

fn joint(cfg: &ReproConfig) -> Result<String> {
    let classes = vec![cfg.cluster_size; cfg.clusters];
    let per_seed = seeds(cfg)
        .par_iter()
        .map(|&seed| joint_methods(cfg, &joint_instance(cfg, seed, &classes, cfg.clusters, None)?))
        .collect::<Result<Vec<_>>>()?;
    let mut out = preamble(cfg, "joint");
    writeln!(out, "# train_per_class={}", cfg.train_per_class).unwrap();
    method_table(&mut out, &collect(&JOINT_METHODS, per_seed));
    Ok(out)
}

/// Seen classes ("B") mixed with either unseen classes ("U") or noise
/// elements ("N", one class each). Only seen classes have training data.
fn subgroups(cfg: &ReproConfig, with_noise: bool) -> Result<String> {
    let seen = cfg.clusters.div_ceil(2);
    let other = cfg.clusters - seen;
    let (classes, tags): (Vec<usize>, Vec<&str>) = if with_noise {
        let noise_elements = other * cfg.cluster_size;
        (
            std::iter::repeat_n(cfg.cluster_size, seen)
                .chain(std::iter::repeat_n(1, noise_elements))
                .collect(),
            std::iter::repeat_n("B", seen)
                .chain(std::iter::repeat_n("N", noise_elements))
                .collect(),
        )
    } else {
        (
            vec![cfg.cluster_size; cfg.clusters],
            std::iter::repeat_n("B", seen)
                .chain(std::iter::repeat_n("U", other))
                .collect(),
        )
    };
    let per_seed = seeds(cfg)
        .par_iter()
        .map(|&seed| joint_methods(cfg, &joint_instance(cfg, seed, &classes, seen, Some(&tags))?))
        .collect::<Result<Vec<_>>>()?;
    let name = if with_noise { "noise" } else { "unseen" };
    let mut out = preamble(cfg, name);
    writeln!(out, "# train_per_class={} seen_classes={seen}", cfg.train_per_class).unwrap();
    let rows = collect(&JOINT_METHODS, per_seed);
    method_table(&mut out, &rows);
    out.push('\n');
    bucket_table(&mut out, &rows);
    Ok(out)
}

fn learning(cfg: &ReproConfig) -> Result<String> {
    let per_seed = seeds(cfg)
        .par_iter()
        .map(|&seed| -> Result<(f64, Vec<EvalReport>)> {
            let sizes = vec![2 * cfg.train_per_class.max(1); cfg.clusters];
            let (features, classes) = sample_embeddings(&sizes, 8, 10.0, 1.0, seed)?;
            let train_ids: Vec<usize> = (0..features.len()).step_by(2).collect();
            let test_ids: Vec<usize> = (1..features.len()).step_by(2).collect();
            let ds = PairDataset::new(
                features.select(&train_ids),
                train_ids.iter().map(|&a| classes[a]).collect(),
            )?;
            let outcome = train(&ds, &TrainConfig { seed, ..TrainConfig::default() })?;
            let test_classes: Vec<usize> = test_ids.iter().map(|&a| classes[a]).collect();
            let truth = Partition::from_labels(&test_classes);
            let m = score_all(&outcome.params, &features.select(&test_ids))?;
            let acc = pair_accuracy(&m, &truth.to_labeling())?;
            let reports = [m.threshold(), solve(&m, &cfg.solver).to_labeling()]
                .iter()
                .map(|y| Ok(evaluate(&truth, y, None, None)?))
                .collect::<Result<Vec<_>>>()?;
            Ok((acc, reports))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = preamble(cfg, "learning");
    let acc = mean(per_seed.iter().map(|(a, _)| Some(*a)));
    writeln!(out, "# embeddings: m=8 separation=10 sigma=1; held-out pair accuracy {}", fmt(acc)).unwrap();
    let reports = per_seed.into_iter().map(|(_, r)| r).collect();
    method_table(&mut out, &collect(&["threshold", "cc"], reports));
    Ok(out)
}

fn oracle(cfg: &ReproConfig) -> Result<String> {
    let rows = seeds(cfg)
        .par_iter()
        .map(|&seed| -> Result<(usize, f64, f64, f64)> {
            let n = 4 + (seed % 5) as usize;
            let m = sample_iid_logits(n, 0.0, 2.0, seed)?;
            let value = |p: &Partition| m.objective(&p.to_labeling()).expect("sizes match");
            let exact = value(&solve_exact(&m, cfg.solver.exact_limit)?);
            Ok((n, value(&solve_gaec(&m)), value(&solve(&m, &cfg.solver)), exact))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = preamble(cfg, "oracle");
    out.push_str("seed\tn\tgaec\tcc\texact\tratio\n");
    let (mut equal, mut worst) = (0usize, f64::INFINITY);
    for (seed, &(n, gaec, cc, exact)) in seeds(cfg).iter().zip(&rows) {
        let ratio = if exact > 0.0 { cc / exact } else { 1.0 };
        worst = worst.min(ratio);
        if (cc - exact).abs() <= 1e-9 {
            equal += 1;
        }
        writeln!(out, "{seed}\t{n}\t{gaec:.6}\t{cc:.6}\t{exact:.6}\t{ratio:.6}").unwrap();
    }
    writeln!(out, "# equal {equal}/{} worst_ratio {worst:.6}", rows.len()).unwrap();
    Ok(out)
}

fn fig3(cfg: &ReproConfig) -> Result<String> {
    let truth = make_planted_partition(&PlantedSpec::uniform(cfg.clusters, cfg.cluster_size, cfg.base_seed))?;
    let m = sample_logits(&truth, &noise(cfg), cfg.base_seed)?;
    let pred = solve(&m, &cfg.solver);
    let mut out = preamble(cfg, "fig3");
    out.push_str(&report_fig3(&truth, &pred)?);
    Ok(out)
}
