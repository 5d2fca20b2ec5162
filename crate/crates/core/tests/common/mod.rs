#![allow(dead_code)]
//! Test-only oracles, independent of the library's algorithms.

use corrclust_core::{LogitMatrix, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Every set partition of `0..n` as a list of blocks, built by inserting
/// each element into every existing block or a new one.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for e in 0..n {
        let mut next = Vec::new();
        for blocks in &out {
            for b in 0..blocks.len() {
                let mut p: Vec<Vec<usize>> = blocks.clone();
                p[b].push(e);
                next.push(p);
            }
            let mut p = blocks.clone();
            p.push(vec![e]);
            next.push(p);
        }
        out = next;
    }
    out
}

/// Sum of logits inside blocks, computed block by block.
pub fn block_value(m: &LogitMatrix, blocks: &[Vec<usize>]) -> f64 {
    let mut v = 0.0;
    for b in blocks {
        for (x, &i) in b.iter().enumerate() {
            for &j in &b[x + 1..] {
                v += m.get(i, j);
            }
        }
    }
    v
}

pub fn brute_force_optimum(m: &LogitMatrix) -> f64 {
    all_partitions(m.n())
        .iter()
        .map(|p| block_value(m, p))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn value(m: &LogitMatrix, p: &Partition) -> f64 {
    m.objective(&p.to_labeling()).unwrap()
}

pub fn normal_instance(n: usize, sigma: f64, seed: u64) -> LogitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, sigma).unwrap();
    LogitMatrix::from_fn(n, |_, _| d.sample(&mut rng)).unwrap()
}

pub fn random_labels(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}
