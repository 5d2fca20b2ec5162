//! Correlation clustering of pairwise logistic scores.
//!
//! Elements `0..n` are scored pairwise by a base-2 logit `f`, where
//! `P(join) = 1 / (1 + 2^-f)`. The maximally probable consistent pair
//! labeling is a partition maximizing the summed logits of joined pairs.
//! This crate holds the pure algorithms: partitions and pair labelings,
//! dense logit instances, GAEC + KLj local search with an exact enumeration
//! oracle, evaluation metrics, a linear pairwise scorer trained with AdamW,
//! synthetic generators and classification baselines.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the CLI
//! live in the `corrclust` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
mod error;
pub mod instance;
pub mod learn;
pub mod metrics;
pub mod partition;
pub mod solver;
pub mod synth;
mod union_find;

pub use error::{Error, Result};
pub use instance::{CrossScores, GroupLabels, LogitMatrix};
pub use partition::{pair_count, pair_index, PairLabeling, Partition};
pub use solver::SolverConfig;
