use alloc::string::String;
use alloc::vec::Vec;

use crate::partition::pairs;
use crate::{Error, GroupLabels, PairLabeling, Result};

/// Agreement tallies between a true and a predicted pair labeling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairCounts {
    /// Joined in both.
    pub tj: usize,
    /// Cut in both.
    pub tc: usize,
    /// Predicted cut, truly joined.
    pub fc: usize,
    /// Predicted join, truly cut.
    pub fj: usize,
}

impl PairCounts {
    pub fn total(&self) -> usize {
        self.tj + self.tc + self.fc + self.fj
    }

    #[inline]
    fn record(&mut self, truth: bool, pred: bool) {
        match (truth, pred) {
            (true, true) => self.tj += 1,
            (false, false) => self.tc += 1,
            (true, false) => self.fc += 1,
            (false, true) => self.fj += 1,
        }
    }
}

impl core::ops::Add for PairCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tj: self.tj + o.tj,
            tc: self.tc + o.tc,
            fc: self.fc + o.fc,
            fj: self.fj + o.fj,
        }
    }
}

fn check_sizes(truth: &PairLabeling, pred: &PairLabeling) -> Result<()> {
    if truth.n() != pred.n() {
        return Err(Error::SizeMismatch {
            expected: truth.n(),
            found: pred.n(),
        });
    }
    Ok(())
}

/// Tallies TJ/TC/FC/FJ. Neither labeling needs to be consistent.
pub fn pair_counts(truth: &PairLabeling, pred: &PairLabeling) -> Result<PairCounts> {
    check_sizes(truth, pred)?;
    let mut c = PairCounts::default();
    for (&t, &p) in truth.as_slice().iter().zip(pred.as_slice()) {
        c.record(t, p);
    }
    Ok(c)
}

/// Fraction of pairs on which both labelings agree.
pub fn rand_index(c: &PairCounts) -> Result<f64> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyInstance);
    }
    Ok((c.tj + c.tc) as f64 / total as f64)
}

/// Precision and recall of cuts and of joins. `None` marks a 0/0 ratio.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutJoinPr {
    pub pc: Option<f64>,
    pub rc: Option<f64>,
    pub pj: Option<f64>,
    pub rj: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn cut_join_pr(c: &PairCounts) -> CutJoinPr {
    CutJoinPr {
        pc: ratio(c.tc, c.tc + c.fc),
        rc: ratio(c.tc, c.tc + c.fj),
        pj: ratio(c.tj, c.tj + c.fj),
        rj: ratio(c.tj, c.tj + c.fc),
    }
}

/// Pair statistics restricted to pairs whose endpoints carry the groups
/// `groups.0 <= groups.1` (by group id).
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupReport {
    pub groups: (usize, usize),
    /// Group names joined in id order, e.g. `"BU"`.
    pub name: String,
    pub counts: PairCounts,
    pub pr: CutJoinPr,
}

/// Buckets pairs by the unordered pair of their endpoints' groups and
/// reports [`pair_counts`] and [`cut_join_pr`] per bucket. Buckets without
/// pairs are omitted; the rest are ordered by group ids.
pub fn subgroup_pr(truth: &PairLabeling, pred: &PairLabeling, g: &GroupLabels) -> Result<Vec<SubgroupReport>> {
    check_sizes(truth, pred)?;
    let n = truth.n();
    if g.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: g.len(),
        });
    }
    let k = g.names().len();
    let mut buckets = alloc::vec![PairCounts::default(); k * k];
    for (((i, j), &t), &p) in pairs(n).zip(truth.as_slice()).zip(pred.as_slice()) {
        let (a, b) = (g.group(i), g.group(j));
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        buckets[a * k + b].record(t, p);
    }
    let mut out = Vec::new();
    for a in 0..k {
        for b in a..k {
            let counts = buckets[a * k + b];
            if counts.total() == 0 {
                continue;
            }
            let mut name = String::from(g.name(a));
            name.push_str(g.name(b));
            out.push(SubgroupReport {
                groups: (a, b),
                name,
                counts,
                pr: cut_join_pr(&counts),
            });
        }
    }
    Ok(out)
}
