//! Tab-separated text formats for every artifact the CLI reads or writes.
//!
//! Files with a fixed element count start with a `#kind key=value ...`
//! header. Floats are written with 17 significant digits, which round-trips
//! every `f64` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use corrclust_core::learn::{FeatureSet, ModelParams};
use corrclust_core::{pair_count, pair_index, CrossScores, GroupLabels, LogitMatrix, PairLabeling, Partition};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("duplicate pair ({0}, {1})")]
    DuplicatePair(usize, usize),
    #[error("line {line}: non-finite value {text:?}")]
    NonFinite { line: usize, text: String },
    #[error("missing entry for element {0}")]
    MissingElement(usize),
    #[error("duplicate entry for element {0}")]
    DuplicateElement(usize),
    #[error(transparent)]
    Core(#[from] corrclust_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Kind of a headed file, from its first line.
pub fn header_kind(text: &str) -> Option<&str> {
    let first = text.lines().next()?.trim();
    let rest = first.strip_prefix('#')?;
    rest.split_whitespace().next()
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn body(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn header(text: &str, kind: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let first = text.lines().next().unwrap_or("");
    let mut words = first.split_whitespace();
    if words.next() != Some(&*format!("#{kind}")) {
        return Err(parse_err(1, format!("expected header \"#{kind} ...\"")));
    }
    let fields: BTreeMap<&str, &str> = words.filter_map(|w| w.split_once('=')).collect();
    keys.iter()
        .map(|k| {
            fields
                .get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(1, format!("header needs {k}=<integer>")))
        })
        .collect()
}

fn fields<const N: usize>(line: usize, text: &str) -> Result<[&str; N]> {
    let parts: Vec<&str> = text.split('\t').collect();
    parts
        .try_into()
        .map_err(|p: Vec<&str>| parse_err(line, format!("expected {N} tab-separated fields, found {}", p.len())))
}

fn index(line: usize, s: &str, n: usize) -> Result<usize> {
    let v: usize = s
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad index {s:?}")))?;
    if v >= n {
        return Err(parse_err(line, format!("index {v} out of range for n={n}")));
    }
    Ok(v)
}

fn real(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad number {s:?}")))?;
    if !v.is_finite() {
        return Err(FormatError::NonFinite {
            line,
            text: s.trim().to_owned(),
        });
    }
    Ok(v)
}

/// Reads `i<TAB>j<TAB>value` lines into dense pair storage.
fn read_pair_values<T: Copy>(
    text: &str,
    n: usize,
    mut parse: impl FnMut(usize, &str) -> Result<T>,
) -> Result<Vec<T>> {
    let mut values: Vec<Option<T>> = vec![None; pair_count(n)];
    for (line, l) in body(text) {
        let [i, j, v] = fields::<3>(line, l)?;
        let (i, j) = (index(line, i, n)?, index(line, j, n)?);
        if i == j {
            return Err(parse_err(line, format!("pair ({i}, {j}) is not a pair")));
        }
        let slot = &mut values[pair_index(n, i, j)];
        if slot.is_some() {
            return Err(FormatError::DuplicatePair(i.min(j), i.max(j)));
        }
        *slot = Some(parse(line, v)?);
    }
    let mut out = Vec::with_capacity(values.len());
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            out.push(values[k].ok_or(FormatError::MissingPair(i, j))?);
            k += 1;
        }
    }
    Ok(out)
}

/// Reads one `element<TAB>value` line per element `0..n`, in any order.
fn read_element_map(text: &str, n: Option<usize>) -> Result<Vec<&str>> {
    let mut entries: BTreeMap<usize, &str> = BTreeMap::new();
    for (line, l) in body(text) {
        let [e, v] = fields::<2>(line, l)?;
        let e = index(line, e, n.unwrap_or(usize::MAX))?;
        if entries.insert(e, v.trim()).is_some() {
            return Err(FormatError::DuplicateElement(e));
        }
    }
    let n = n.unwrap_or(entries.len());
    (0..n)
        .map(|e| entries.get(&e).copied().ok_or(FormatError::MissingElement(e)))
        .collect()
}

pub fn write_partition(p: &Partition) -> String {
    let mut s = format!("#partition n={}\n", p.len());
    for (e, &c) in p.labels().iter().enumerate() {
        writeln!(s, "{e}\t{c}").unwrap();
    }
    s
}

/// Cluster ids may be arbitrary integers; they are canonicalized.
pub fn read_partition(text: &str) -> Result<Partition> {
    let [n] = header(text, "partition", &["n"])?[..] else { unreachable!() };
    let labels: Vec<u64> = read_element_map(text, Some(n))?
        .iter()
        .map(|v| v.parse().map_err(|_| parse_err(0, format!("bad cluster id {v:?}"))))
        .collect::<Result<_>>()?;
    Ok(Partition::from_labels(&labels))
}

pub fn write_pairs(y: &PairLabeling) -> String {
    let n = y.n();
    let mut s = format!("#pairs n={n}\n");
    for i in 0..n {
        for j in i + 1..n {
            writeln!(s, "{i}\t{j}\t{}", u8::from(y.get(i, j))).unwrap();
        }
    }
    s
}

pub fn read_pairs(text: &str) -> Result<PairLabeling> {
    let [n] = header(text, "pairs", &["n"])?[..] else { unreachable!() };
    let y = read_pair_values(text, n, |line, v| match v.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(parse_err(line, format!("expected 0 or 1, found {other:?}"))),
    })?;
    Ok(PairLabeling::new(n, y)?)
}

pub fn write_logits(m: &LogitMatrix) -> String {
    let n = m.n();
    let mut s = String::with_capacity(32 * pair_count(n) + 32);
    writeln!(s, "#logits n={n}").unwrap();
    for i in 0..n {
        for j in i + 1..n {
            writeln!(s, "{i}\t{j}\t{}", fmt_f64(m.get(i, j))).unwrap();
        }
    }
    s
}

pub fn read_logits(text: &str) -> Result<LogitMatrix> {
    let [n] = header(text, "logits", &["n"])?[..] else { unreachable!() };
    Ok(LogitMatrix::new(n, read_pair_values(text, n, real)?)?)
}

pub fn write_cross(c: &CrossScores) -> String {
    let mut s = format!("#cross rows={} cols={}\n", c.rows(), c.cols());
    for a in 0..c.rows() {
        for (u, &f) in c.row(a).iter().enumerate() {
            writeln!(s, "{a}\t{u}\t{}", fmt_f64(f)).unwrap();
        }
    }
    s
}

pub fn read_cross(text: &str) -> Result<CrossScores> {
    let [rows, cols] = header(text, "cross", &["rows", "cols"])?[..] else { unreachable!() };
    let mut values: Vec<Option<f64>> = vec![None; rows * cols];
    for (line, l) in body(text) {
        let [a, u, v] = fields::<3>(line, l)?;
        let (a, u) = (index(line, a, rows)?, index(line, u, cols)?);
        let slot = &mut values[a * cols + u];
        if slot.is_some() {
            return Err(FormatError::DuplicatePair(a, u));
        }
        *slot = Some(real(line, v)?);
    }
    let f = values
        .iter()
        .enumerate()
        .map(|(k, v)| v.ok_or(FormatError::MissingPair(k / cols, k % cols)))
        .collect::<Result<_>>()?;
    Ok(CrossScores::new(rows, cols, f)?)
}

pub fn write_features(fs: &FeatureSet) -> String {
    let mut s = format!("#features n={} m={}\n", fs.len(), fs.dim());
    for a in 0..fs.len() {
        s.push_str(&a.to_string());
        for &x in fs.row(a) {
            s.push('\t');
            s.push_str(&fmt_f64(x));
        }
        s.push('\n');
    }
    s
}

pub fn read_features(text: &str) -> Result<FeatureSet> {
    let [n, m] = header(text, "features", &["n", "m"])?[..] else { unreachable!() };
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    for (line, l) in body(text) {
        let mut parts = l.split('\t');
        let a = index(line, parts.next().unwrap_or(""), n)?;
        let row: Vec<f64> = parts.map(|v| real(line, v)).collect::<Result<_>>()?;
        if row.len() != m {
            return Err(parse_err(line, format!("expected {m} values, found {}", row.len())));
        }
        if rows[a].replace(row).is_some() {
            return Err(FormatError::DuplicateElement(a));
        }
    }
    let mut data = Vec::with_capacity(n * m);
    for (a, row) in rows.into_iter().enumerate() {
        data.extend(row.ok_or(FormatError::MissingElement(a))?);
    }
    Ok(FeatureSet::new(n, m, data)?)
}

/// `element<TAB>class` lines, no header. Used for class labels and for
/// classifier assignments.
pub fn write_classes(classes: &[usize]) -> String {
    let mut s = String::new();
    for (e, c) in classes.iter().enumerate() {
        writeln!(s, "{e}\t{c}").unwrap();
    }
    s
}

pub fn read_classes(text: &str) -> Result<Vec<usize>> {
    read_element_map(text, None)?
        .iter()
        .map(|v| v.parse().map_err(|_| parse_err(0, format!("bad class id {v:?}"))))
        .collect()
}

/// `element<TAB>tag` lines, no header.
pub fn write_groups(g: &GroupLabels) -> String {
    let mut s = String::new();
    for e in 0..g.len() {
        writeln!(s, "{e}\t{}", g.tag(e)).unwrap();
    }
    s
}

pub fn read_groups(text: &str) -> Result<GroupLabels> {
    Ok(GroupLabels::new(&read_element_map(text, None)?))
}

/// Header `#model m=<dim> tau=<bound>`, then the `2m` weights and the bias,
/// one per line.
pub fn write_model(p: &ModelParams) -> String {
    let mut s = format!("#model m={} tau={}\n", p.dim(), fmt_f64(p.tau));
    for &t in &p.theta {
        writeln!(s, "{}", fmt_f64(t)).unwrap();
    }
    s
}

pub fn read_model(text: &str) -> Result<ModelParams> {
    let first = text.lines().next().unwrap_or("");
    let mut words = first.split_whitespace();
    if words.next() != Some("#model") {
        return Err(parse_err(1, "expected header \"#model m=<dim> tau=<bound>\""));
    }
    let fields: BTreeMap<&str, &str> = words.filter_map(|w| w.split_once('=')).collect();
    let m: usize = fields
        .get("m")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(1, "header needs m=<integer>"))?;
    let tau = real(1, fields.get("tau").ok_or_else(|| parse_err(1, "header needs tau=<number>"))?)?;
    let theta: Vec<f64> = body(text).map(|(line, l)| real(line, l)).collect::<Result<_>>()?;
    if theta.len() != 2 * m + 1 {
        return Err(parse_err(0, format!("expected {} parameters, found {}", 2 * m + 1, theta.len())));
    }
    Ok(ModelParams { theta, tau })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_roundtrip_and_relabeling() {
        let p = Partition::from_labels(&[0, 1, 0, 2]);
        assert_eq!(read_partition(&write_partition(&p)).unwrap(), p);
        let text = "#partition n=3\n2\t70\n0\t9\n1\t70\n";
        assert_eq!(read_partition(text).unwrap(), Partition::from_labels(&[0, 1, 1]));
    }

    #[test]
    fn partition_errors() {
        assert!(matches!(read_partition("#partition n=2\n0\t0\n"), Err(FormatError::MissingElement(1))));
        assert!(matches!(
            read_partition("#partition n=2\n0\t0\n0\t1\n1\t0\n"),
            Err(FormatError::DuplicateElement(0))
        ));
        assert!(matches!(read_partition("0\t0\n"), Err(FormatError::Parse { line: 1, .. })));
        assert!(matches!(read_partition("#partition n=1\n3\t0\n"), Err(FormatError::Parse { line: 2, .. })));
    }

    #[test]
    fn logits_roundtrip_is_bit_exact() {
        let values = [0.1, -1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -2.5e-7, 17.0];
        let m = LogitMatrix::new(4, values.to_vec()).unwrap();
        let back = read_logits(&write_logits(&m)).unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn logits_errors() {
        let missing = "#logits n=3\n0\t1\t1.0\n1\t2\t1.0\n";
        assert!(matches!(read_logits(missing), Err(FormatError::MissingPair(0, 2))));
        let dup = "#logits n=2\n0\t1\t1.0\n1\t0\t2.0\n";
        assert!(matches!(read_logits(dup), Err(FormatError::DuplicatePair(0, 1))));
        let inf = "#logits n=2\n0\t1\tinf\n";
        assert!(matches!(read_logits(inf), Err(FormatError::NonFinite { line: 2, .. })));
        let nan = "#logits n=2\n0\t1\tNaN\n";
        assert!(matches!(read_logits(nan), Err(FormatError::NonFinite { .. })));
        let junk = "#logits n=2\n0\t1\tabc\n";
        assert!(matches!(read_logits(junk), Err(FormatError::Parse { line: 2, .. })));
    }

    #[test]
    fn pairs_roundtrip() {
        let y = PairLabeling::new(3, vec![true, false, true]).unwrap();
        assert_eq!(read_pairs(&write_pairs(&y)).unwrap(), y);
        assert!(read_pairs("#pairs n=2\n0\t1\t2\n").is_err());
    }

    #[test]
    fn cross_roundtrip() {
        let c = CrossScores::new(2, 3, vec![1.0, -2.0, 0.5, 0.25, 3.0, -0.125]).unwrap();
        assert_eq!(read_cross(&write_cross(&c)).unwrap(), c);
        assert!(matches!(read_cross("#cross rows=1 cols=2\n0\t0\t1.0\n"), Err(FormatError::MissingPair(0, 1))));
    }

    #[test]
    fn features_roundtrip() {
        let fs = FeatureSet::new(2, 3, vec![0.5, -1.0, 2.0, 1e-3, 0.0, 7.25]).unwrap();
        assert_eq!(read_features(&write_features(&fs)).unwrap(), fs);
        assert!(read_features("#features n=1 m=2\n0\t1.0\n").is_err());
    }

    #[test]
    fn classes_and_groups_roundtrip() {
        let classes = vec![3, 0, 0, 2];
        assert_eq!(read_classes(&write_classes(&classes)).unwrap(), classes);
        let g = GroupLabels::new(&["B", "U", "B"]);
        assert_eq!(read_groups(&write_groups(&g)).unwrap(), g);
        assert!(matches!(read_classes("0\t1\n2\t1\n"), Err(FormatError::MissingElement(1))));
    }

    #[test]
    fn model_roundtrip() {
        let p = ModelParams {
            theta: vec![0.1, -0.2, 0.3],
            tau: 1e6,
        };
        assert_eq!(read_model(&write_model(&p)).unwrap(), p);
        assert!(read_model("#model m=2 tau=1\n0.1\n").is_err());
    }

    #[test]
    fn header_kinds() {
        assert_eq!(header_kind("#pairs n=3\n"), Some("pairs"));
        assert_eq!(header_kind("#partition n=3\n"), Some("partition"));
        assert_eq!(header_kind("0\t1\n"), None);
    }
}
