//! Classification baselines and the clusterings they induce.

use alloc::vec;
use alloc::vec::Vec;

use crate::{CrossScores, Error, PairLabeling, Partition, Result};

/// Assigns every test element (cross row) to the training cluster `U`
/// maximizing `sum_{u in U} f(a, u)`, the log-odds of joining `U` and
/// cutting every other cluster. Ties go to the lowest cluster id.
pub fn assign_to_clusters(cross: &CrossScores, train_truth: &Partition) -> Result<Vec<usize>> {
    if cross.cols() != train_truth.len() {
        return Err(Error::IncompleteCross {
            rows: cross.rows(),
            cols: train_truth.len(),
            len: cross.as_slice().len(),
        });
    }
    let k = train_truth.num_clusters();
    let mut sums = vec![0.0; k];
    let mut out = Vec::with_capacity(cross.rows());
    for a in 0..cross.rows() {
        sums.fill(0.0);
        for (u, &f) in cross.row(a).iter().enumerate() {
            sums[train_truth.label(u)] += f;
        }
        let mut best = 0;
        for (c, &s) in sums.iter().enumerate().skip(1) {
            if s > sums[best] {
                best = c;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Pair labeling of the partition grouping equal classes.
pub fn induced_pair_labeling(assignment: &[Option<usize>]) -> Result<PairLabeling> {
    let classes: Vec<usize> = assignment
        .iter()
        .enumerate()
        .map(|(e, c)| c.ok_or(Error::Unassigned(e)))
        .collect::<Result<_>>()?;
    Ok(Partition::from_labels(&classes).to_labeling())
}

/// Fraction of elements whose predicted class equals the true class.
pub fn classification_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::SizeMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}
