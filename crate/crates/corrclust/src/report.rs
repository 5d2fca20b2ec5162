//! Evaluation reports as JSON or TSV.

use std::fmt::Write as _;

use corrclust_core::metrics::{
    contingency, cut_join_pr, match_clusters, pair_counts, rand_index, subgroup_pr, variation_of_information,
    Contingency, ClusterMatching, PairCounts,
};
use corrclust_core::{GroupLabels, PairLabeling, Partition};
use serde::{Serialize, Serializer};

fn na<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("n/a"),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |x| format!("{x:.6}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Counts {
    pub tj: usize,
    pub tc: usize,
    pub fc: usize,
    pub fj: usize,
}

impl From<PairCounts> for Counts {
    fn from(c: PairCounts) -> Self {
        Self {
            tj: c.tj,
            tc: c.tc,
            fc: c.fc,
            fj: c.fj,
        }
    }
}

/// Pair metrics of one prediction, or of one bucket of pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairMetrics {
    pub counts: Counts,
    #[serde(serialize_with = "na")]
    pub ri: Option<f64>,
    #[serde(serialize_with = "na")]
    pub pc: Option<f64>,
    #[serde(serialize_with = "na")]
    pub rc: Option<f64>,
    #[serde(serialize_with = "na")]
    pub pj: Option<f64>,
    #[serde(serialize_with = "na")]
    pub rj: Option<f64>,
}

impl PairMetrics {
    pub fn from_counts(c: PairCounts) -> Self {
        let pr = cut_join_pr(&c);
        Self {
            counts: c.into(),
            ri: rand_index(&c).ok(),
            pc: pr.pc,
            rc: pr.rc,
            pj: pr.pj,
            rj: pr.rj,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bucket {
    pub name: String,
    #[serde(flatten)]
    pub metrics: PairMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub class: usize,
    pub cluster: Option<usize>,
    pub false_positives: usize,
    pub false_negatives: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContingencyReport {
    /// `counts[k][s]`: elements of predicted cluster `k` in true class `s`.
    pub counts: Vec<Vec<usize>>,
    /// `(cluster, class)` pairs of the optimal matching.
    pub matching: Vec<(usize, usize)>,
    pub classes: Vec<ClassRow>,
    pub unmatched_clusters: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    /// Whether the prediction is a partition (consistent labeling).
    pub partition: bool,
    #[serde(flatten)]
    pub pairs: PairMetrics,
    #[serde(serialize_with = "na")]
    pub vi: Option<f64>,
    #[serde(serialize_with = "na")]
    pub vi_fc: Option<f64>,
    #[serde(serialize_with = "na")]
    pub vi_fj: Option<f64>,
    /// Exact-match accuracy when classes are given, else the matched
    /// fraction of the optimal cluster-to-class matching.
    #[serde(serialize_with = "na")]
    pub ca: Option<f64>,
    pub buckets: Vec<Bucket>,
    pub contingency: Option<ContingencyReport>,
}

/// Scores `pred` against `truth`. Partition-only metrics (VI, matching,
/// contingency) are absent when `pred` is inconsistent. `class_accuracy`
/// overrides the matched fraction as CA.
pub fn evaluate(
    truth: &Partition,
    pred: &PairLabeling,
    groups: Option<&GroupLabels>,
    class_accuracy: Option<f64>,
) -> corrclust_core::Result<EvalReport> {
    let y = truth.to_labeling();
    let counts = pair_counts(&y, pred)?;
    let buckets = match groups {
        Some(g) => subgroup_pr(&y, pred, g)?
            .into_iter()
            .map(|b| Bucket {
                name: b.name,
                metrics: PairMetrics::from_counts(b.counts),
            })
            .collect(),
        None => Vec::new(),
    };
    let mut report = EvalReport {
        n: truth.len(),
        partition: false,
        pairs: PairMetrics::from_counts(counts),
        vi: None,
        vi_fc: None,
        vi_fj: None,
        ca: class_accuracy,
        buckets,
        contingency: None,
    };
    if let Ok(p) = pred.to_partition() {
        let vi = variation_of_information(truth, &p)?;
        let c = contingency(truth, &p)?;
        let m = match_clusters(&c);
        report.partition = true;
        report.vi = Some(vi.vi);
        report.vi_fc = Some(vi.vi_fc);
        report.vi_fj = Some(vi.vi_fj);
        report.ca = class_accuracy.or(Some(m.matched_fraction));
        report.contingency = Some(ContingencyReport {
            counts: c.counts().to_vec(),
            matching: m.pairs.clone(),
            classes: m
                .classes
                .iter()
                .map(|e| ClassRow {
                    class: e.class,
                    cluster: e.cluster,
                    false_positives: e.false_positives,
                    false_negatives: e.false_negatives,
                })
                .collect(),
            unmatched_clusters: m.unmatched_clusters,
        });
    }
    Ok(report)
}

pub fn to_json(report: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

const PAIR_COLUMNS: &str = "TJ\tTC\tFC\tFJ\tRI\tPC\tRC\tPJ\tRJ";

fn pair_row(m: &PairMetrics) -> String {
    let c = m.counts;
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        c.tj,
        c.tc,
        c.fc,
        c.fj,
        cell(m.ri),
        cell(m.pc),
        cell(m.rc),
        cell(m.pj),
        cell(m.rj)
    )
}

pub fn to_tsv(report: &EvalReport) -> String {
    let mut s = String::new();
    let p = &report.pairs;
    let c = p.counts;
    s.push_str("metric\tvalue\n");
    writeln!(s, "n\t{}", report.n).unwrap();
    writeln!(s, "partition\t{}", if report.partition { "yes" } else { "no" }).unwrap();
    for (k, v) in [("TJ", c.tj), ("TC", c.tc), ("FC", c.fc), ("FJ", c.fj)] {
        writeln!(s, "{k}\t{v}").unwrap();
    }
    for (k, v) in [
        ("RI", p.ri),
        ("VI", report.vi),
        ("VI_FC", report.vi_fc),
        ("VI_FJ", report.vi_fj),
        ("PC", p.pc),
        ("RC", p.rc),
        ("PJ", p.pj),
        ("RJ", p.rj),
        ("CA", report.ca),
    ] {
        writeln!(s, "{k}\t{}", cell(v)).unwrap();
    }
    if !report.buckets.is_empty() {
        writeln!(s, "\n#buckets\nbucket\t{PAIR_COLUMNS}").unwrap();
        for b in &report.buckets {
            writeln!(s, "{}\t{}", b.name, pair_row(&b.metrics)).unwrap();
        }
    }
    if let Some(ct) = &report.contingency {
        s.push_str("\n#contingency\ncluster");
        let cols = ct.counts.first().map_or(0, Vec::len);
        for class in 0..cols {
            write!(s, "\tclass_{class}").unwrap();
        }
        s.push('\n');
        for (k, row) in ct.counts.iter().enumerate() {
            write!(s, "{k}").unwrap();
            for v in row {
                write!(s, "\t{v}").unwrap();
            }
            s.push('\n');
        }
        s.push_str("\n#classes\nclass\tcluster\tfalse_positives\tfalse_negatives\n");
        for r in &ct.classes {
            let cluster = r.cluster.map_or_else(|| "-".to_owned(), |k| k.to_string());
            writeln!(s, "{}\t{cluster}\t{}\t{}", r.class, r.false_positives, r.false_negatives).unwrap();
        }
    }
    s
}

/// Cluster-by-class matrix of `precision,recall` cells. Rows are ordered by
/// their matched class; clusters without a class come last, by cluster id.
pub fn report_fig3(truth: &Partition, pred: &Partition) -> corrclust_core::Result<String> {
    let c = contingency(truth, pred)?;
    let m = match_clusters(&c);
    Ok(fig3_table(&c, &m))
}

fn fig3_table(c: &Contingency, m: &ClusterMatching) -> String {
    let mut order: Vec<(usize, Option<usize>)> = m.pairs.iter().map(|&(k, s)| (k, Some(s))).collect();
    order.extend(m.unmatched_clusters.iter().map(|&(k, _)| (k, None)));

    let mut s = String::from("cluster\tsize\tmatched_class");
    for class in 0..c.cols() {
        write!(s, "\tclass_{class}").unwrap();
    }
    s.push('\n');
    for (k, class) in order {
        let matched = class.map_or_else(|| "-".to_owned(), |s| s.to_string());
        write!(s, "{k}\t{}\t{matched}", c.row_sums()[k]).unwrap();
        for class in 0..c.cols() {
            write!(s, "\t{:.6},{:.6}", c.precision(k, class), c.recall(k, class)).unwrap();
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_report() {
        let truth = Partition::from_labels(&[0, 0, 1, 1]);
        let pred = Partition::single_cluster(4).to_labeling();
        let r = evaluate(&truth, &pred, None, None).unwrap();
        assert_eq!(r.pairs.counts, Counts { tj: 2, tc: 0, fc: 0, fj: 4 });
        assert_eq!(r.pairs.ri, Some(1.0 / 3.0));
        assert_eq!(r.vi, Some(1.0));
        assert_eq!(r.pairs.pc, None);
        assert_eq!(r.ca, Some(0.5));
        let tsv = to_tsv(&r);
        assert!(tsv.contains("PC\tn/a\n"));
        assert!(tsv.contains("VI\t1.000000\n"));
        let json = to_json(&r);
        assert!(json.contains("\"pc\": \"n/a\""));
        assert!(json.contains("\"vi\": 1.0"));
    }

    #[test]
    fn inconsistent_prediction_has_no_partition_metrics() {
        let truth = Partition::from_labels(&[0, 0, 1]);
        let pred = PairLabeling::new(3, vec![true, false, true]).unwrap();
        let r = evaluate(&truth, &pred, None, None).unwrap();
        assert!(!r.partition);
        assert_eq!((r.vi, r.ca), (None, None));
        assert!(r.contingency.is_none());
        assert!(to_tsv(&r).contains("VI\tn/a\n"));
    }

    #[test]
    fn buckets_are_reported() {
        let truth = Partition::from_labels(&[0, 0, 1, 1]);
        let g = GroupLabels::new(&["B", "B", "U", "U"]);
        let r = evaluate(&truth, &truth.to_labeling(), Some(&g), None).unwrap();
        let names: Vec<&str> = r.buckets.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["BB", "BU", "UU"]);
        let cross = &r.buckets[1].metrics;
        assert_eq!((cross.pj, cross.rc, cross.pc), (None, Some(1.0), Some(1.0)));
    }

    fn cells(table: &str) -> Vec<Vec<(f64, f64)>> {
        table
            .lines()
            .skip(1)
            .map(|l| {
                l.split('\t')
                    .skip(3)
                    .map(|c| {
                        let (p, r) = c.split_once(',').unwrap();
                        (p.parse().unwrap(), r.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn fig3_identical_is_diagonal() {
        let p = Partition::from_labels(&[0, 1, 1, 2, 2, 2]);
        let table = report_fig3(&p, &p).unwrap();
        for (k, row) in cells(&table).iter().enumerate() {
            for (s, &(prec, rec)) in row.iter().enumerate() {
                let expected = if k == s { 1.0 } else { 0.0 };
                assert_eq!((prec, rec), (expected, expected));
            }
        }
    }

    #[test]
    fn fig3_extra_cluster_goes_last() {
        let truth = Partition::from_labels(&[0, 0, 0, 1, 1]);
        let pred = Partition::from_labels(&[0, 1, 1, 2, 2]);
        let table = report_fig3(&truth, &pred).unwrap();
        let rows: Vec<&str> = table.lines().skip(1).collect();
        assert!(rows[0].starts_with("1\t2\t0\t"));
        assert!(rows[1].starts_with("2\t2\t1\t"));
        assert!(rows[2].starts_with("0\t1\t-\t"));
        for row in cells(&table) {
            let total: f64 = row.iter().map(|c| c.0).sum();
            assert!((total - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn mismatched_sizes() {
        let truth = Partition::singletons(3);
        let pred = Partition::singletons(4);
        assert!(evaluate(&truth, &pred.to_labeling(), None, None).is_err());
        assert!(report_fig3(&truth, &pred).is_err());
    }
}
