//! Comparison of predicted pair labelings and partitions with the truth.

mod contingency;
mod pairs;
mod vi;

pub use contingency::{contingency, match_clusters, max_weight_assignment, ClassErrors, ClusterMatching, Contingency};
pub use pairs::{cut_join_pr, pair_counts, rand_index, subgroup_pr, CutJoinPr, PairCounts, SubgroupReport};
pub use vi::{entropy, variation_of_information, ViReport};
