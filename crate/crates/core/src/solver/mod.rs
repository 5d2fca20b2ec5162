//! Correlation clustering solvers.
//!
//! All solvers maximize `sum_{i<j} f_ij y_ij` over pair labelings `y` that
//! describe a partition. [`solve`] runs greedy additive edge contraction
//! ([`solve_gaec`]) followed by Kernighan–Lin local search with joins
//! ([`refine_klj`]). [`solve_exact`] enumerates all partitions and is meant
//! as a reference for small instances.

mod exact;
mod gaec;
mod klj;

pub use exact::solve_exact;
pub use gaec::solve_gaec;
pub use klj::refine_klj;

use crate::{Error, LogitMatrix, Partition, Result};

/// Hard ceiling for exact enumeration; Bell(16) is about 1.0e10.
pub const MAX_EXACT_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Upper bound on KLj passes over all cluster pairs.
    pub max_klj_passes: usize,
    /// Largest `n` accepted by [`solve_exact`] through this config.
    pub exact_limit: usize,
    /// Local-search moves must improve the objective by more than this.
    pub epsilon_gain: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_klj_passes: 100,
            exact_limit: 14,
            epsilon_gain: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_klj_passes == 0 {
            return Err(Error::InvalidConfig("max_klj_passes must be at least 1"));
        }
        if self.exact_limit > MAX_EXACT_LIMIT {
            return Err(Error::InvalidConfig("exact_limit must be at most 16"));
        }
        if !(self.epsilon_gain >= 0.0 && self.epsilon_gain.is_finite()) {
            return Err(Error::InvalidConfig("epsilon_gain must be finite and non-negative"));
        }
        Ok(())
    }
}

/// GAEC followed by KLj refinement.
pub fn solve(m: &LogitMatrix, cfg: &SolverConfig) -> Partition {
    refine_klj(m, &solve_gaec(m), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn default_config_is_valid() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn config_bounds() {
        let bad = [
            SolverConfig {
                max_klj_passes: 0,
                ..Default::default()
            },
            SolverConfig {
                exact_limit: 17,
                ..Default::default()
            },
            SolverConfig {
                epsilon_gain: -1.0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn all_positive_gives_one_cluster() {
        let m = LogitMatrix::from_fn(6, |i, j| 0.5 + (i * j) as f64 * 0.1).unwrap();
        assert_eq!(solve(&m, &SolverConfig::default()), Partition::single_cluster(6));
    }

    #[test]
    fn two_blocks_of_two() {
        // +1 inside {0,1} and {2,3}, -2 across.
        let m = LogitMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 1.0 } else { -2.0 }).unwrap();
        let p = solve(&m, &SolverConfig::default());
        assert_eq!(p.clusters(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(m.objective(&p.to_labeling()).unwrap(), 2.0);
    }
}
