//! Greedy additive edge contraction.
//!
//! Every cluster is represented by its smallest member. The contracted graph
//! keeps one summed weight per pair of representatives, stored in the same
//! upper-triangular layout as the input logits. Candidate contractions sit in
//! a max-heap; entries are invalidated lazily through per-cluster versions.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::partition::pair_index;
use crate::{LogitMatrix, Partition};

#[derive(Clone, Copy, Debug)]
struct Candidate {
    weight: f64,
    a: usize,
    b: usize,
    version_a: u32,
    version_b: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Heaviest first; equal weights pop the lexicographically smallest
    // (a, b) first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
            .then_with(|| (self.version_a, self.version_b).cmp(&(other.version_a, other.version_b)))
    }
}

/// Contracts the heaviest positive inter-cluster edge until none is left.
///
/// Zero-weight edges are never contracted, so the objective strictly
/// increases with every contraction and singletons are returned when no
/// logit is positive.
pub fn solve_gaec(m: &LogitMatrix) -> Partition {
    let n = m.n();
    if n < 2 {
        return Partition::singletons(n);
    }
    let mut weight = m.as_slice().to_vec();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut is_alive = vec![true; n];
    let mut version = vec![0u32; n];
    let mut owner: Vec<usize> = (0..n).collect();

    let mut heap = BinaryHeap::new();
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if weight[k] > 0.0 {
                heap.push(Candidate {
                    weight: weight[k],
                    a,
                    b,
                    version_a: 0,
                    version_b: 0,
                });
            }
            k += 1;
        }
    }

    while let Some(c) = heap.pop() {
        let (a, b) = (c.a, c.b);
        if !is_alive[a] || !is_alive[b] || version[a] != c.version_a || version[b] != c.version_b {
            continue;
        }
        // a < b, so a stays the smallest member of the merged cluster.
        is_alive[b] = false;
        owner[b] = a;
        version[a] += 1;
        alive.retain(|&x| x != b);
        for &x in &alive {
            if x == a {
                continue;
            }
            let xa = pair_index(n, a, x);
            let xb = pair_index(n, b, x);
            weight[xa] += weight[xb];
            if weight[xa] > 0.0 {
                let (lo, hi) = if a < x { (a, x) } else { (x, a) };
                heap.push(Candidate {
                    weight: weight[xa],
                    a: lo,
                    b: hi,
                    version_a: version[lo],
                    version_b: version[hi],
                });
            }
        }
    }

    let labels: Vec<usize> = (0..n)
        .map(|mut e| {
            while owner[e] != e {
                e = owner[e];
            }
            e
        })
        .collect();
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_through_positive_summed_edge() {
        // f01 = +2, f02 = -1, f12 = +2: contract {0,1}, then 2 joins at +1.
        let m = LogitMatrix::new(3, vec![2.0, -1.0, 2.0]).unwrap();
        assert_eq!(solve_gaec(&m), Partition::single_cluster(3));
    }

    #[test]
    fn negative_logits_leave_singletons() {
        let m = LogitMatrix::from_fn(5, |i, j| -1.0 - (i + j) as f64).unwrap();
        assert_eq!(solve_gaec(&m), Partition::singletons(5));
    }

    #[test]
    fn zero_weight_is_not_contracted() {
        let m = LogitMatrix::new(2, vec![0.0]).unwrap();
        assert_eq!(solve_gaec(&m), Partition::singletons(2));
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(solve_gaec(&LogitMatrix::new(1, vec![]).unwrap()), Partition::singletons(1));
        assert_eq!(solve_gaec(&LogitMatrix::new(0, vec![]).unwrap()), Partition::singletons(0));
    }

    #[test]
    fn ties_contract_smallest_pair_first() {
        // {0,1} and {2,3} tie at +1; contracting {0,1} first makes its edge
        // to 2 equal to -3 + 1 = -2, so 2 pairs with 3.
        let m = LogitMatrix::from_fn(4, |i, j| match (i, j) {
            (0, 1) | (2, 3) | (1, 2) => 1.0,
            _ => -3.0,
        })
        .unwrap();
        let p = solve_gaec(&m);
        assert_eq!(p.clusters(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn candidate_order() {
        let c = |weight, a, b| Candidate {
            weight,
            a,
            b,
            version_a: 0,
            version_b: 0,
        };
        let mut heap = BinaryHeap::from(vec![c(1.0, 2, 3), c(1.0, 0, 5), c(2.0, 4, 6), c(1.0, 0, 4)]);
        let order: Vec<(usize, usize)> = core::iter::from_fn(|| heap.pop().map(|c| (c.a, c.b))).collect();
        assert_eq!(order, vec![(4, 6), (0, 4), (0, 5), (2, 3)]);
    }
}
