use super::contingency::Contingency;
use crate::{Partition, Result};

/// Variation of information and its two conditional entropies, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViReport {
    pub vi: f64,
    /// `H(pred | truth)`: information lost to false cuts.
    pub vi_fc: f64,
    /// `H(truth | pred)`: information lost to false joins.
    pub vi_fj: f64,
}

/// `VI(truth, pred) = H(truth | pred) + H(pred | truth)` over the joint
/// distribution `p(u, v) = |u ∩ v| / n`, with `0 log 0 = 0`.
pub fn variation_of_information(truth: &Partition, pred: &Partition) -> Result<ViReport> {
    let c = Contingency::new(truth, pred)?;
    let n = c.total() as f64;
    let (mut vi_fj, mut vi_fc) = (0.0, 0.0);
    for (k, row) in c.counts().iter().enumerate() {
        for (s, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let joint = count as f64 / n;
            vi_fj -= joint * libm::log2(count as f64 / c.row_sums()[k] as f64);
            vi_fc -= joint * libm::log2(count as f64 / c.col_sums()[s] as f64);
        }
    }
    // Clamp -0.0 and rounding noise below zero.
    let (vi_fc, vi_fj) = (vi_fc.max(0.0), vi_fj.max(0.0));
    Ok(ViReport {
        vi: vi_fc + vi_fj,
        vi_fc,
        vi_fj,
    })
}

/// Shannon entropy of the cluster-size distribution, in bits.
pub fn entropy(p: &Partition) -> f64 {
    let n = p.len() as f64;
    let h: f64 = p
        .cluster_sizes()
        .iter()
        .map(|&s| {
            let q = s as f64 / n;
            -q * libm::log2(q)
        })
        .sum();
    h.max(0.0)
}
