//! Dense pairwise logit instances.
//!
//! All logits are base 2: a score `f` means `P(join) = 1 / (1 + 2^-f)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::partition::{pair_count, pair_index, pairs, PairLabeling};
use crate::{Error, Result};

/// `1 / (1 + 2^-f)`.
pub fn logit_to_prob(f: f64) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::NonFinite(f));
    }
    Ok(sigmoid2(f))
}

/// `log2(p / (1 - p))`, the inverse of [`logit_to_prob`].
pub fn prob_to_logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(p));
    }
    // log2(p) - log2(1-p), with log1p keeping precision for p near 0.
    Ok((libm::log(p) - libm::log1p(-p)) / core::f64::consts::LN_2)
}

#[inline]
pub(crate) fn sigmoid2(f: f64) -> f64 {
    if f >= 0.0 {
        1.0 / (1.0 + libm::exp2(-f))
    } else {
        let e = libm::exp2(f);
        e / (1.0 + e)
    }
}

/// `log2(1 + 2^f)` without overflow for large `|f|`.
#[inline]
pub(crate) fn softplus2(f: f64) -> f64 {
    f.max(0.0) + libm::log1p(libm::exp2(-f.abs())) / core::f64::consts::LN_2
}

/// Finite base-2 logit for every unordered pair of `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitMatrix {
    n: usize,
    f: Vec<f64>,
}

impl LogitMatrix {
    /// Wraps values given in [`pair_index`] order.
    pub fn new(n: usize, f: Vec<f64>) -> Result<Self> {
        if f.len() != pair_count(n) {
            return Err(Error::SizeMismatch {
                expected: pair_count(n),
                found: f.len(),
            });
        }
        if let Some(&bad) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { n, f })
    }

    /// Builds the matrix by evaluating `score(i, j)` for every `i < j`.
    pub fn from_fn(n: usize, mut score: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let f = pairs(n).map(|(i, j)| score(i, j)).collect();
        Self::new(n, f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.f[pair_index(self.n, i, j)]
    }

    /// Values in storage order.
    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }

    /// Sub-instance on `ids`, renumbered `0..ids.len()` in the given order.
    pub fn restrict(&self, ids: &[usize]) -> Self {
        let k = ids.len();
        let f = pairs(k).map(|(a, b)| self.get(ids[a], ids[b])).collect();
        Self { n: k, f }
    }

    /// `sum_{i<j} f_ij * y_ij`.
    pub fn objective(&self, y: &PairLabeling) -> Result<f64> {
        if y.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: y.n(),
            });
        }
        Ok(self
            .f
            .iter()
            .zip(y.as_slice())
            .filter(|(_, &join)| join)
            .map(|(f, _)| f)
            .sum())
    }

    /// Base-2 log-likelihood of `y` under independent pairwise logistic
    /// factors. Differs from [`objective`](Self::objective) by the constant
    /// `-sum log2(1 + 2^f)`, so both share their maximizers.
    pub fn log2_likelihood(&self, y: &PairLabeling) -> Result<f64> {
        let normalizer: f64 = self.f.iter().map(|&f| softplus2(f)).sum();
        Ok(self.objective(y)? - normalizer)
    }

    /// Independent per-pair decision `y_ij = [f_ij >= 0]`. May violate
    /// transitivity.
    pub fn threshold(&self) -> PairLabeling {
        let n = self.n;
        PairLabeling::new(n, self.f.iter().map(|&f| f >= 0.0).collect())
            .expect("length matches by construction")
    }

    /// Joint instance over `self` followed by `other` (ids offset by
    /// `self.n()`), with `cross[i][j]` scoring `(i, n1 + j)`.
    pub fn merge(&self, other: &LogitMatrix, cross: &CrossScores) -> Result<Self> {
        if cross.rows() != self.n || cross.cols() != other.n {
            return Err(Error::IncompleteCross {
                rows: self.n,
                cols: other.n,
                len: cross.rows() * cross.cols(),
            });
        }
        let (n1, n2) = (self.n, other.n);
        let n = n1 + n2;
        let mut f = Vec::with_capacity(pair_count(n));
        for (i, j) in pairs(n) {
            f.push(match (i < n1, j < n1) {
                (true, true) => self.get(i, j),
                (true, false) => cross.get(i, j - n1),
                _ => other.get(i - n1, j - n1),
            });
        }
        Ok(Self { n, f })
    }
}

/// Objective of the labeling `y` under `m`.
pub fn objective_value(m: &LogitMatrix, y: &PairLabeling) -> Result<f64> {
    m.objective(y)
}

pub fn threshold_decisions(m: &LogitMatrix) -> PairLabeling {
    m.threshold()
}

pub fn merge_instances(m1: &LogitMatrix, m2: &LogitMatrix, cross: &CrossScores) -> Result<LogitMatrix> {
    m1.merge(m2, cross)
}

/// Rectangular logits between two element sets, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossScores {
    rows: usize,
    cols: usize,
    f: Vec<f64>,
}

impl CrossScores {
    pub fn new(rows: usize, cols: usize, f: Vec<f64>) -> Result<Self> {
        if f.len() != rows * cols {
            return Err(Error::IncompleteCross {
                rows,
                cols,
                len: f.len(),
            });
        }
        if let Some(&bad) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { rows, cols, f })
    }

    pub fn from_fn(rows: usize, cols: usize, mut score: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut f = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                f.push(score(i, j));
            }
        }
        Self::new(rows, cols, f)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.f[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.f[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }
}

/// Categorical tag per element, e.g. seen / unseen / noise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLabels {
    names: Vec<String>,
    group: Vec<usize>,
}

impl GroupLabels {
    /// Interns one tag per element; group ids follow first appearance.
    pub fn new<S: AsRef<str>>(tags: &[S]) -> Self {
        let mut names: Vec<String> = Vec::new();
        let group = tags
            .iter()
            .map(|t| {
                let t = t.as_ref();
                match names.iter().position(|n| n == t) {
                    Some(g) => g,
                    None => {
                        names.push(String::from(t));
                        names.len() - 1
                    }
                }
            })
            .collect();
        Self { names, group }
    }

    pub fn len(&self) -> usize {
        self.group.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group.is_empty()
    }

    #[inline]
    pub fn group(&self, e: usize) -> usize {
        self.group[e]
    }

    pub fn name(&self, group: usize) -> &str {
        &self.names[group]
    }

    pub fn tag(&self, e: usize) -> &str {
        &self.names[self.group[e]]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}
