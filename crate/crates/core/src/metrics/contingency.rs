use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Partition, Result};

/// Overlap counts between predicted clusters (rows) and true classes
/// (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contingency {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    total: usize,
}

impl Contingency {
    pub fn new(truth: &Partition, pred: &Partition) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::SizeMismatch {
                expected: truth.len(),
                found: pred.len(),
            });
        }
        let mut counts = vec![vec![0; truth.num_clusters()]; pred.num_clusters()];
        for e in 0..truth.len() {
            counts[pred.label(e)][truth.label(e)] += 1;
        }
        Ok(Self::from_counts(counts))
    }

    /// Wraps a raw table; every row must have the same length.
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Self {
        let cols = counts.first().map_or(0, Vec::len);
        assert!(counts.iter().all(|r| r.len() == cols), "ragged contingency table");
        let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<usize> = (0..cols).map(|s| counts.iter().map(|r| r[s]).sum()).collect();
        let total = row_sums.iter().sum();
        Self {
            counts,
            row_sums,
            col_sums,
            total,
        }
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_sums.len()
    }

    /// Predicted cluster sizes.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// True class sizes.
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Share of cluster `k` that belongs to class `s`.
    pub fn precision(&self, k: usize, s: usize) -> f64 {
        self.counts[k][s] as f64 / self.row_sums[k] as f64
    }

    /// Share of class `s` that lands in cluster `k`.
    pub fn recall(&self, k: usize, s: usize) -> f64 {
        self.counts[k][s] as f64 / self.col_sums[s] as f64
    }
}

pub fn contingency(truth: &Partition, pred: &Partition) -> Result<Contingency> {
    Contingency::new(truth, pred)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassErrors {
    pub class: usize,
    pub cluster: Option<usize>,
    /// Members of the matched cluster outside this class.
    pub false_positives: usize,
    /// Members of this class outside the matched cluster.
    pub false_negatives: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterMatching {
    /// `(cluster, class)` pairs, sorted by class.
    pub pairs: Vec<(usize, usize)>,
    pub matched_total: usize,
    pub matched_fraction: f64,
    /// Per class, in class order.
    pub classes: Vec<ClassErrors>,
    /// `(cluster, size)` of clusters without a class.
    pub unmatched_clusters: Vec<(usize, usize)>,
}

impl ClusterMatching {
    pub fn class_of_cluster(&self, cluster: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == cluster).map(|p| p.1)
    }
}

/// Maximum-weight one-to-one matching of clusters to classes.
///
/// Assignments with zero overlap are dropped, so a class whose best
/// available cluster shares no element stays unmatched.
pub fn match_clusters(c: &Contingency) -> ClusterMatching {
    let weights: Vec<Vec<i64>> = c
        .counts()
        .iter()
        .map(|r| r.iter().map(|&x| x as i64).collect())
        .collect();
    let assignment = max_weight_assignment(&weights);
    let mut pairs: Vec<(usize, usize)> = assignment
        .iter()
        .enumerate()
        .filter_map(|(k, s)| s.map(|s| (k, s)))
        .filter(|&(k, s)| c.counts()[k][s] > 0)
        .collect();
    pairs.sort_by_key(|p| p.1);

    let matched_total: usize = pairs.iter().map(|&(k, s)| c.counts()[k][s]).sum();
    let classes = (0..c.cols())
        .map(|s| match pairs.iter().find(|p| p.1 == s) {
            Some(&(k, _)) => ClassErrors {
                class: s,
                cluster: Some(k),
                false_positives: c.row_sums()[k] - c.counts()[k][s],
                false_negatives: c.col_sums()[s] - c.counts()[k][s],
            },
            None => ClassErrors {
                class: s,
                cluster: None,
                false_positives: 0,
                false_negatives: c.col_sums()[s],
            },
        })
        .collect();
    let unmatched_clusters = (0..c.rows())
        .filter(|k| !pairs.iter().any(|p| p.0 == *k))
        .map(|k| (k, c.row_sums()[k]))
        .collect();
    let matched_fraction = if c.total() == 0 {
        0.0
    } else {
        matched_total as f64 / c.total() as f64
    };
    ClusterMatching {
        pairs,
        matched_total,
        matched_fraction,
        classes,
        unmatched_clusters,
    }
}

/// Maximum-weight assignment of rows to columns on a rectangular matrix.
/// Every row of the smaller side is assigned; returns the column per row.
///
/// Shortest augmenting paths with vertex potentials (Hungarian method),
/// `O(r^2 c)` for `r <= c`.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    if rows > cols {
        let transposed: Vec<Vec<i64>> = (0..cols).map(|s| (0..rows).map(|k| weights[k][s]).collect()).collect();
        let by_col = max_weight_assignment(&transposed);
        let mut out = vec![None; rows];
        for (s, k) in by_col.into_iter().enumerate() {
            if let Some(k) = k {
                out[k] = Some(s);
            }
        }
        return out;
    }

    // Minimize negated weights. Index 0 is a sentinel; rows and columns are
    // 1-based below.
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; rows + 1];
    let mut v = vec![0i64; cols + 1];
    let mut row_of = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![INF; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![None; rows];
    for j in 1..=cols {
        if row_of[j] != 0 {
            out[row_of[j] - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_partitions_are_diagonal() {
        let p = Partition::from_labels(&[0, 1, 1, 2, 2, 2]);
        let c = Contingency::new(&p, &p).unwrap();
        assert_eq!(c.counts(), &[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        for k in 0..3 {
            assert_eq!(c.precision(k, k), 1.0);
            assert_eq!(c.recall(k, k), 1.0);
        }
    }

    #[test]
    fn one_cluster_against_two_classes() {
        let truth = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let c = Contingency::new(&truth, &Partition::single_cluster(6)).unwrap();
        assert_eq!(c.counts(), &[vec![3, 3]]);
        assert_eq!(c.precision(0, 0), 0.5);
        assert_eq!(c.precision(0, 1), 0.5);
        assert_eq!(c.row_sums(), &[6]);
    }

    #[test]
    fn row_sums_are_cluster_sizes() {
        let truth = Partition::from_labels(&[0, 0, 1, 1, 2, 2, 2]);
        let pred = Partition::from_labels(&[0, 1, 1, 1, 2, 2, 0]);
        let c = Contingency::new(&truth, &pred).unwrap();
        assert_eq!(c.row_sums(), pred.cluster_sizes().as_slice());
        assert_eq!(c.col_sums(), truth.cluster_sizes().as_slice());
        assert_eq!(c.total(), 7);
    }

    #[test]
    fn identity_matching() {
        let m = match_clusters(&Contingency::from_counts(vec![vec![5, 0], vec![0, 5]]));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.matched_fraction, 1.0);
        assert!(m.unmatched_clusters.is_empty());
    }

    #[test]
    fn best_total_wins() {
        let m = match_clusters(&Contingency::from_counts(vec![vec![3, 1], vec![0, 6]]));
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.matched_total, 9);
        assert_eq!(m.matched_fraction, 9.0 / 10.0);
        assert_eq!(m.classes[0].false_positives, 1);
        assert_eq!(m.classes[1].false_negatives, 1);
    }

    #[test]
    fn surplus_clusters_stay_unmatched() {
        let m = match_clusters(&Contingency::from_counts(vec![vec![4, 0], vec![1, 0], vec![0, 3], vec![0, 2]]));
        assert_eq!(m.pairs, vec![(0, 0), (2, 1)]);
        assert_eq!(m.unmatched_clusters, vec![(1, 1), (3, 2)]);
        assert_eq!(m.classes[0].false_negatives, 1);
        assert_eq!(m.classes[1].false_negatives, 2);
    }

    #[test]
    fn zero_overlap_is_not_a_match() {
        let m = match_clusters(&Contingency::from_counts(vec![vec![3, 0, 0]]));
        assert_eq!(m.pairs, vec![(0, 0)]);
        assert_eq!(m.classes[1].cluster, None);
        assert_eq!(m.classes[2].false_negatives, 0);
    }

    #[test]
    fn assignment_beats_greedy() {
        // Greedy on row maxima takes 8 then 1; optimum is 7 + 6.
        let w = vec![vec![8, 7], vec![6, 1]];
        assert_eq!(max_weight_assignment(&w), vec![Some(1), Some(0)]);
    }
}
