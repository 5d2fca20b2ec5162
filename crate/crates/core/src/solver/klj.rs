//! Kernighan–Lin local search with joins.
//!
//! A pass visits every pair of clusters `(A, B)` and runs a two-way
//! Kernighan–Lin sequence on `A ∪ B`: repeatedly move the unlocked element
//! with the largest gain to the other side and lock it, then keep the best
//! prefix of that sequence. Joining `A` and `B` outright competes with the
//! best prefix. Afterwards every cluster runs the same sequence against a
//! new empty cluster, which covers splitting elements off into singletons.
//! When a pass finds nothing, one multi-way sequence moves elements between
//! any clusters before the search gives up. The whole search runs from the
//! given start and from the two trivial partitions; the best result wins.
//!
//! Pairs whose clusters have not changed since they were last examined are
//! skipped; such a pair cannot yield an improving move. Search stops after a
//! pass without improvement or after `max_klj_passes` passes.

use alloc::vec;
use alloc::vec::Vec;

use super::SolverConfig;
use crate::{LogitMatrix, Partition};

// Gains at or below this are rounding noise and never accepted.
const GAIN_FLOOR: f64 = 1e-9;

enum Improvement {
    Join,
    /// Positions into `A ++ B` of elements that switch sides.
    Moves(Vec<usize>),
}

struct Search<'a> {
    m: &'a LogitMatrix,
    threshold: f64,
    // Scratch buffers reused across two-way sequences.
    members: Vec<usize>,
    side: Vec<bool>,
    locked: Vec<bool>,
    sum_a: Vec<f64>,
    sum_b: Vec<f64>,
}

impl<'a> Search<'a> {
    fn two_way(&mut self, a: &[usize], b: &[usize]) -> Option<Improvement> {
        let m = self.m;
        let len = a.len() + b.len();
        self.members.clear();
        self.members.extend_from_slice(a);
        self.members.extend_from_slice(b);
        self.side.clear();
        self.side.extend((0..len).map(|k| k >= a.len()));
        self.locked.clear();
        self.locked.resize(len, false);
        self.sum_a.clear();
        self.sum_a.resize(len, 0.0);
        self.sum_b.clear();
        self.sum_b.resize(len, 0.0);

        for k in 0..len {
            for l in k + 1..len {
                let w = m.get(self.members[k], self.members[l]);
                if self.side[l] {
                    self.sum_b[k] += w;
                } else {
                    self.sum_a[k] += w;
                }
                if self.side[k] {
                    self.sum_b[l] += w;
                } else {
                    self.sum_a[l] += w;
                }
            }
        }
        let join_gain: f64 = if b.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.sum_b[..a.len()].iter().sum()
        };

        let mut sequence = Vec::with_capacity(len);
        let (mut total, mut best, mut best_len) = (0.0, 0.0, 0);
        for _ in 0..len {
            let mut pick = None;
            let mut pick_gain = f64::NEG_INFINITY;
            for k in 0..len {
                if self.locked[k] {
                    continue;
                }
                let g = if self.side[k] {
                    self.sum_a[k] - self.sum_b[k]
                } else {
                    self.sum_b[k] - self.sum_a[k]
                };
                if g > pick_gain {
                    pick_gain = g;
                    pick = Some(k);
                }
            }
            let Some(k) = pick else { break };
            let to_b = !self.side[k];
            self.side[k] = to_b;
            self.locked[k] = true;
            sequence.push(k);
            let v = self.members[k];
            for l in 0..len {
                if l == k {
                    continue;
                }
                let w = m.get(v, self.members[l]);
                if to_b {
                    self.sum_a[l] -= w;
                    self.sum_b[l] += w;
                } else {
                    self.sum_b[l] -= w;
                    self.sum_a[l] += w;
                }
            }
            total += pick_gain;
            if total > best {
                best = total;
                best_len = sequence.len();
            }
        }

        if join_gain > self.threshold && join_gain >= best {
            Some(Improvement::Join)
        } else if best > self.threshold {
            sequence.truncate(best_len);
            Some(Improvement::Moves(sequence))
        } else {
            None
        }
    }
}

/// Improves `start` by Kernighan–Lin moves, joins and splits.
///
/// The search also runs from all singletons and from one cluster, and the
/// best of the three local optima is returned, preferring `start`'s on ties.
/// The objective of the result is never below that of `start`. Moves are
/// accepted only if they gain more than `cfg.epsilon_gain` (and more than a
/// `1e-9` rounding floor).
pub fn refine_klj(m: &LogitMatrix, start: &Partition, cfg: &SolverConfig) -> Partition {
    let n = m.n();
    assert_eq!(start.len(), n, "start partition does not match instance size");
    let mut best = local_search(m, start.clusters(), cfg);
    let mut best_value = objective(m, &best);
    for alt in [Partition::singletons(n), Partition::single_cluster(n)] {
        if alt == *start {
            continue;
        }
        let p = local_search(m, alt.clusters(), cfg);
        let v = objective(m, &p);
        if v > best_value + cfg.epsilon_gain.max(GAIN_FLOOR) {
            best = p;
            best_value = v;
        }
    }
    best
}

fn objective(m: &LogitMatrix, p: &Partition) -> f64 {
    m.objective(&p.to_labeling()).expect("sizes match")
}

fn local_search(m: &LogitMatrix, mut clusters: Vec<Vec<usize>>, cfg: &SolverConfig) -> Partition {
    let n = m.n();
    let mut search = Search {
        m,
        threshold: cfg.epsilon_gain.max(GAIN_FLOOR),
        members: Vec::new(),
        side: Vec::new(),
        locked: Vec::new(),
        sum_a: Vec::new(),
        sum_b: Vec::new(),
    };

    if n == 0 {
        return Partition::from_labels::<usize>(&[]);
    }
    let mut changed_before = vec![true; clusters.len()];
    for _ in 0..cfg.max_klj_passes.max(1) {
        let mut changed = vec![false; clusters.len()];
        let mut improved = false;

        let count = clusters.len();
        for x in 0..count {
            for y in x + 1..count {
                if clusters[x].is_empty() || clusters[y].is_empty() {
                    continue;
                }
                if !(changed_before[x] || changed_before[y] || changed[x] || changed[y]) {
                    continue;
                }
                if let Some(step) = search.two_way(&clusters[x], &clusters[y]) {
                    apply(&mut clusters, x, y, step);
                    changed[x] = true;
                    changed[y] = true;
                    improved = true;
                }
            }
        }

        let mut x = 0;
        while x < clusters.len() {
            let dirty = changed.get(x).copied().unwrap_or(true) || changed_before.get(x).copied().unwrap_or(true);
            if clusters[x].len() > 1 && dirty {
                if let Some(step) = search.two_way(&clusters[x], &[]) {
                    clusters.push(Vec::new());
                    changed.push(true);
                    let y = clusters.len() - 1;
                    apply(&mut clusters, x, y, step);
                    changed[x] = true;
                    improved = true;
                }
            }
            x += 1;
        }

        if !improved {
            if !multi_way(m, &mut clusters, search.threshold) {
                break;
            }
            clusters.retain(|c| !c.is_empty());
            changed = vec![true; clusters.len()];
        }
        changed_before = changed;
    }

    let mut labels = vec![0usize; n];
    for (k, cluster) in clusters.iter().enumerate() {
        for &e in cluster {
            labels[e] = k;
        }
    }
    Partition::from_labels(&labels)
}

/// One Kernighan–Lin sequence over all clusters at once: repeatedly move the
/// unlocked element with the largest gain to its best cluster (or a fresh
/// one) and lock it, then keep the best prefix. Catches chains of moves that
/// span three or more clusters.
fn multi_way(m: &LogitMatrix, clusters: &mut Vec<Vec<usize>>, threshold: f64) -> bool {
    let n = m.n();
    clusters.retain(|c| !c.is_empty());
    let mut label = vec![0usize; n];
    for (k, c) in clusters.iter().enumerate() {
        for &e in c {
            label[e] = k;
        }
    }
    let original = label.clone();
    let mut size: Vec<usize> = clusters.iter().map(Vec::len).collect();
    // sums[c][e] = sum of f(e, u) over members u != e of cluster c.
    let mut sums: Vec<Vec<f64>> = vec![vec![0.0; n]; clusters.len()];
    for e in 0..n {
        for u in e + 1..n {
            let w = m.get(e, u);
            sums[label[u]][e] += w;
            sums[label[e]][u] += w;
        }
    }
    let mut fresh = clusters.len();
    size.push(0);
    sums.push(vec![0.0; n]);

    let mut locked = vec![false; n];
    let mut moves: Vec<(usize, usize)> = Vec::new();
    let (mut total, mut best, mut best_len) = (0.0, 0.0, 0);
    for _ in 0..n {
        let mut pick = None;
        let mut pick_gain = f64::NEG_INFINITY;
        for e in (0..n).filter(|&e| !locked[e]) {
            let from = label[e];
            let stay = sums[from][e];
            for c in 0..size.len() {
                if c == from || (size[c] == 0 && (c != fresh || size[from] == 1)) {
                    continue;
                }
                let g = sums[c][e] - stay;
                if g > pick_gain {
                    pick_gain = g;
                    pick = Some((e, c));
                }
            }
        }
        let Some((e, to)) = pick else { break };
        let from = label[e];
        for u in 0..n {
            if u != e {
                let w = m.get(e, u);
                sums[from][u] -= w;
                sums[to][u] += w;
            }
        }
        size[from] -= 1;
        size[to] += 1;
        label[e] = to;
        locked[e] = true;
        moves.push((e, to));
        if to == fresh {
            fresh = size.len();
            size.push(0);
            sums.push(vec![0.0; n]);
        }
        total += pick_gain;
        if total > best {
            best = total;
            best_len = moves.len();
        }
    }
    if best <= threshold {
        return false;
    }

    let mut label = original;
    for &(e, to) in &moves[..best_len] {
        label[e] = to;
    }
    clusters.clear();
    clusters.resize(size.len(), Vec::new());
    for (e, &c) in label.iter().enumerate() {
        clusters[c].push(e);
    }
    true
}

fn apply(clusters: &mut [Vec<usize>], x: usize, y: usize, step: Improvement) {
    match step {
        Improvement::Join => {
            let moved = core::mem::take(&mut clusters[y]);
            clusters[x].extend(moved);
        }
        Improvement::Moves(positions) => {
            let split = clusters[x].len();
            let mut flip = vec![false; split + clusters[y].len()];
            for p in positions {
                flip[p] = true;
            }
            let (mut new_x, mut new_y) = (Vec::new(), Vec::new());
            for (p, &e) in clusters[x].iter().chain(clusters[y].iter()).enumerate() {
                let in_x = (p < split) != flip[p];
                if in_x {
                    new_x.push(e);
                } else {
                    new_y.push(e);
                }
            }
            clusters[x] = new_x;
            clusters[y] = new_y;
        }
    }
}
