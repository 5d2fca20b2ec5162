//! Partitions of `0..n` and their pair labelings.
//!
//! A [`Partition`] is stored in canonical form: every element carries a
//! cluster id, and cluster ids are assigned in order of each cluster's
//! smallest member. Two partitions are therefore equal up to cluster order
//! exactly when their label vectors are equal.
//!
//! A [`PairLabeling`] assigns 0 or 1 to every unordered pair `{i, j}`. Pairs
//! are stored densely in row-major upper-triangular order, see [`pair_index`].

use alloc::vec;
use alloc::vec::Vec;

use crate::union_find::UnionFind;
use crate::{Error, Result};

/// Number of unordered pairs of `n` elements.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// Dense index of the pair `{i, j}` among the `n(n-1)/2` pairs, ordered
/// `(0,1), (0,2), .., (0,n-1), (1,2), ..`.
///
/// Argument order does not matter. Panics in debug builds if `i == j`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Iterator over all pairs `(i, j)`, `i < j`, in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl Partition {
    /// Builds a partition from arbitrary per-element labels. Elements with
    /// equal labels share a cluster; labels are renumbered canonically.
    pub fn from_labels<L: Copy + Eq + Ord>(labels: &[L]) -> Self {
        let mut seen: alloc::collections::BTreeMap<L, usize> = Default::default();
        let mut canonical = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = seen.len();
            canonical.push(*seen.entry(l).or_insert(next));
        }
        Self {
            num_clusters: seen.len(),
            labels: canonical,
        }
    }

    /// Builds a partition of `0..n` from explicit clusters.
    pub fn from_clusters<C: AsRef<[usize]>>(n: usize, clusters: &[C]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (k, cluster) in clusters.iter().enumerate() {
            let cluster = cluster.as_ref();
            if cluster.is_empty() {
                return Err(Error::InvalidPartition("empty cluster"));
            }
            for &e in cluster {
                if e >= n {
                    return Err(Error::InvalidPartition("element id out of range"));
                }
                if labels[e] != usize::MAX {
                    return Err(Error::InvalidPartition("clusters overlap"));
                }
                labels[e] = k;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::InvalidPartition("clusters do not cover all elements"));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            num_clusters: n,
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            num_clusters: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    /// Cluster id of element `e`.
    #[inline]
    pub fn label(&self, e: usize) -> usize {
        self.labels[e]
    }

    /// Canonical cluster id of every element.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// Clusters as sorted member lists, ordered by smallest member.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters];
        for (e, &l) in self.labels.iter().enumerate() {
            out[l].push(e);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// The partition induced on `ids` (renumbered `0..ids.len()`).
    pub fn restrict(&self, ids: &[usize]) -> Self {
        let labels: Vec<usize> = ids.iter().map(|&e| self.labels[e]).collect();
        Self::from_labels(&labels)
    }

    /// Pair labeling with `y_ij = 1` iff `i` and `j` share a cluster.
    pub fn to_labeling(&self) -> PairLabeling {
        let n = self.len();
        let mut y = Vec::with_capacity(pair_count(n));
        for (i, j) in pairs(n) {
            y.push(self.labels[i] == self.labels[j]);
        }
        PairLabeling { n, y }
    }
}

/// Join (`true`) or cut (`false`) decision for every unordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairLabeling {
    n: usize,
    y: Vec<bool>,
}

impl PairLabeling {
    pub fn new(n: usize, y: Vec<bool>) -> Result<Self> {
        if y.len() != pair_count(n) {
            return Err(Error::SizeMismatch {
                expected: pair_count(n),
                found: y.len(),
            });
        }
        Ok(Self { n, y })
    }

    pub fn all_cuts(n: usize) -> Self {
        Self {
            n,
            y: vec![false; pair_count(n)],
        }
    }

    pub fn all_joins(n: usize) -> Self {
        Self {
            n,
            y: vec![true; pair_count(n)],
        }
    }

    /// Element count.
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.y[pair_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, join: bool) {
        let k = pair_index(self.n, i, j);
        self.y[k] = join;
    }

    /// Decisions in storage order, see [`pair_index`].
    pub fn as_slice(&self) -> &[bool] {
        &self.y
    }

    pub fn num_joins(&self) -> usize {
        self.y.iter().filter(|&&b| b).count()
    }

    /// Whether the labeling satisfies `y_ab + y_bc - 1 <= y_ac` for all
    /// distinct `a, b, c`, i.e. describes some partition.
    pub fn is_consistent(&self) -> bool {
        self.to_partition().is_ok()
    }

    /// The unique partition whose labeling equals `self`.
    ///
    /// Clusters are the connected components of the join pairs; every pair
    /// is then checked against the components, and the first violation is
    /// reported as a witness triple.
    pub fn to_partition(&self) -> Result<Partition> {
        let n = self.n;
        let mut uf = UnionFind::new(n);
        for ((i, j), &join) in pairs(n).zip(&self.y) {
            if join {
                uf.union(i, j);
            }
        }
        let roots: Vec<usize> = (0..n).map(|e| uf.find(e)).collect();
        let partition = Partition::from_labels(&roots);
        for ((i, j), &join) in pairs(n).zip(&self.y) {
            if !join && partition.same_cluster(i, j) {
                let b = self.witness(i, j, &partition);
                return Err(Error::InconsistentLabeling { a: i, b, c: j });
            }
        }
        Ok(partition)
    }

    // A cut pair inside a join component is always bridged by some path of
    // joins; if no single intermediate element joins both ends, report the
    // first element on a join path from `i`.
    fn witness(&self, i: usize, j: usize, partition: &Partition) -> usize {
        (0..self.n)
            .filter(|&b| b != i && b != j && partition.same_cluster(i, b))
            .find(|&b| self.get(i, b) && self.get(b, j))
            .or_else(|| (0..self.n).find(|&b| b != i && b != j && self.get(i, b)))
            .unwrap_or(i)
    }
}
