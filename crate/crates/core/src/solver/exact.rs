use alloc::vec;
use alloc::vec::Vec;

use super::MAX_EXACT_LIMIT;
use crate::{Error, LogitMatrix, Partition, Result};

/// Globally optimal partition by enumerating every restricted-growth string.
///
/// Strings are visited in lexicographic order and the first one reaching
/// the maximum is returned. Refuses `n > limit`; `limit` itself is capped
/// at [`MAX_EXACT_LIMIT`].
pub fn solve_exact(m: &LogitMatrix, limit: usize) -> Result<Partition> {
    let n = m.n();
    let limit = limit.min(MAX_EXACT_LIMIT);
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if n == 0 {
        return Ok(Partition::singletons(0));
    }
    let mut state = Enumeration {
        m,
        n,
        labels: vec![0; n],
        best_labels: vec![0; n],
        best: f64::NEG_INFINITY,
        gains: vec![0.0; n * n],
    };
    // Element 0 always opens block 0.
    state.descend(1, 1, 0.0);
    Ok(Partition::from_labels(&state.best_labels))
}

struct Enumeration<'a> {
    m: &'a LogitMatrix,
    n: usize,
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best: f64,
    // Row `i` holds the gain of putting element `i` into each open block.
    gains: Vec<f64>,
}

impl Enumeration<'_> {
    fn descend(&mut self, i: usize, blocks: usize, value: f64) {
        if i == self.n {
            if value > self.best {
                self.best = value;
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        let row = i * self.n;
        self.gains[row..row + blocks + 1].fill(0.0);
        for j in 0..i {
            self.gains[row + self.labels[j]] += self.m.get(i, j);
        }
        for b in 0..=blocks {
            self.labels[i] = b;
            let next = if b == blocks { blocks + 1 } else { blocks };
            self.descend(i + 1, next, value + self.gains[row + b]);
        }
    }
}
