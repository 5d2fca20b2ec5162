use std::path::Path;
use std::process::{Command, Output};

use corrclust::io;
use corrclust_core::learn::{FeatureSet, ModelParams};
use corrclust_core::{CrossScores, GroupLabels, LogitMatrix, Partition};
use proptest::prelude::*;

fn corrclust(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrclust")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = corrclust(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(corrclust(dir.path(), &["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(corrclust(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(corrclust(dir.path(), &["synth", "--sizes", "3y4", "--out-truth", "t"]).status.code(), Some(1));
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = corrclust(dir.path(), &["solve", "--logits", "nope.tsv", "--out", "p.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.tsv"));
}

#[test]
fn eval_size_mismatch_names_both_sizes() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--sizes", "2x3", "--out-truth", "a.tsv"]);
    ok(dir.path(), &["synth", "--sizes", "2x4", "--out-truth", "b.tsv"]);
    let out = corrclust(dir.path(), &["eval", "--truth", "a.tsv", "--pred", "b.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n=6") && err.contains("n=8"), "{err}");
}

#[test]
fn solve_then_eval_recovers_easy_instance() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--sizes", "4x6", "--mu", "3", "--sigma", "0.5", "--seed", "5", "--out-logits", "m.tsv", "--out-truth", "t.tsv"]);
    let solved: serde_json::Value = serde_json::from_str(&ok(dir.path(), &["solve", "--logits", "m.tsv", "--out", "p.tsv"])).unwrap();
    assert_eq!(solved["clusters"], 4);
    let report: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["eval", "--truth", "t.tsv", "--pred", "p.tsv", "--report", "json"])).unwrap();
    assert_eq!(report["ri"], 1.0);
    assert_eq!(report["vi"], 0.0);
}

#[test]
fn eval_accepts_pair_labelings_and_reports_na() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.tsv"), io::write_partition(&Partition::from_labels(&[0, 0, 1, 1]))).unwrap();
    let all_one = Partition::single_cluster(4).to_labeling();
    std::fs::write(dir.path().join("y.tsv"), io::write_pairs(&all_one)).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["eval", "--truth", "t.tsv", "--pred", "y.tsv", "--report", "json"])).unwrap();
    assert_eq!(report["pc"], "n/a");
    assert_eq!(report["rj"], 1.0);
}

#[test]
fn reproduce_prints_method_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["reproduce", "--experiment", "threshold-vs-cc", "--seeds", "2", "--clusters", "4", "--cluster-size", "5"]);
    for col in ["method", "RI", "RJ", "threshold", "cc"] {
        assert!(out.contains(col), "missing {col} in\n{out}");
    }
}

#[test]
fn synth_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--sizes", "3,4,5", "--seed", "9", "--out-logits", "a.tsv"]);
    ok(dir.path(), &["synth", "--sizes", "3,4,5", "--seed", "9", "--out-logits", "b.tsv"]);
    ok(dir.path(), &["synth", "--sizes", "3,4,5", "--seed", "10", "--out-logits", "c.tsv"]);
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.tsv"), read("b.tsv"));
    assert_ne!(read("a.tsv"), read("c.tsv"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e300..1e300f64, -10.0..10.0f64, Just(0.0), Just(-0.0), Just(f64::MIN_POSITIVE)]
}

proptest! {
    #[test]
    fn logits_roundtrip(n in 0usize..12, seed in any::<u64>(), vals in prop::collection::vec(finite(), 66)) {
        let f: Vec<f64> = vals.iter().cycle().skip((seed % 7) as usize).take(n * n.saturating_sub(1) / 2).copied().collect();
        let m = LogitMatrix::new(n, f).unwrap();
        let back = io::read_logits(&io::write_logits(&m)).unwrap();
        prop_assert_eq!(back.n(), m.n());
        prop_assert!(back.as_slice().iter().zip(m.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn partition_and_pairs_roundtrip(labels in prop::collection::vec(0usize..5, 0..15)) {
        let p = Partition::from_labels(&labels);
        prop_assert_eq!(&io::read_partition(&io::write_partition(&p)).unwrap(), &p);
        let y = p.to_labeling();
        prop_assert_eq!(io::read_pairs(&io::write_pairs(&y)).unwrap(), y);
    }

    #[test]
    fn cross_features_model_roundtrip(rows in 0usize..5, cols in 1usize..5, vals in prop::collection::vec(finite(), 25)) {
        let c = CrossScores::new(rows, cols, vals[..rows * cols].to_vec()).unwrap();
        let back = io::read_cross(&io::write_cross(&c)).unwrap();
        prop_assert_eq!(io::write_cross(&back), io::write_cross(&c));
        let fs = FeatureSet::new(cols, rows.max(1), vals[..cols * rows.max(1)].to_vec()).unwrap();
        let back = io::read_features(&io::write_features(&fs)).unwrap();
        prop_assert_eq!(io::write_features(&back), io::write_features(&fs));
        let model = ModelParams { theta: vals[..2 * cols + 1].to_vec(), tau: 5.0 };
        prop_assert_eq!(io::read_model(&io::write_model(&model)).unwrap(), model);
    }

    #[test]
    fn classes_and_groups_roundtrip(classes in prop::collection::vec(0usize..1000, 0..20)) {
        prop_assert_eq!(io::read_classes(&io::write_classes(&classes)).unwrap(), classes.clone());
        let tags: Vec<String> = classes.iter().map(|c| format!("g{}", c % 3)).collect();
        let g = GroupLabels::new(&tags);
        prop_assert_eq!(io::write_groups(&io::read_groups(&io::write_groups(&g)).unwrap()), io::write_groups(&g));
    }
}
