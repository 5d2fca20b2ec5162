//! Pairwise logistic learning.
//!
//! The scorer is linear over symmetric pair features,
//! `f(a, b) = w · [|x_a - x_b|, x_a ⊙ x_b] + bias`, and is fitted by
//! minimizing the mean base-2 logistic loss `-y f + log2(1 + 2^f)` over
//! balanced mini-batches with AdamW. After every step each parameter is
//! projected onto the box `[-tau, tau]`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{sigmoid2, softplus2};
use crate::partition::pairs;
use crate::{CrossScores, Error, LogitMatrix, PairLabeling, Partition, Result};

/// One feature vector of length `dim` per element, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureSet {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * dim {
            return Err(Error::SizeMismatch {
                expected: n * dim,
                found: data.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { n, dim, data })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), dim, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.dim..(a + 1) * self.dim]
    }

    /// Features of `ids`, in that order.
    pub fn select(&self, ids: &[usize]) -> Self {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for &a in ids {
            data.extend_from_slice(self.row(a));
        }
        Self {
            n: ids.len(),
            dim: self.dim,
            data,
        }
    }
}

/// Features with per-element class labels; pairs sharing a class are joins.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDataset {
    features: FeatureSet,
    classes: Vec<usize>,
}

impl PairDataset {
    pub fn new(features: FeatureSet, classes: Vec<usize>) -> Result<Self> {
        if classes.len() != features.len() {
            return Err(Error::SizeMismatch {
                expected: features.len(),
                found: classes.len(),
            });
        }
        Ok(Self { features, classes })
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// `y_ab = 1` iff `a` and `b` carry the same class.
    pub fn labeling(&self) -> PairLabeling {
        Partition::from_labels(&self.classes).to_labeling()
    }
}

/// Scorer parameters: `2 * dim` weights followed by the bias.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    pub tau: f64,
}

impl ModelParams {
    pub fn zeros(dim: usize, tau: f64) -> Self {
        Self {
            theta: vec![0.0; 2 * dim + 1],
            tau,
        }
    }

    /// Input feature dimension `m`.
    pub fn dim(&self) -> usize {
        (self.theta.len() - 1) / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.theta[..self.theta.len() - 1]
    }

    pub fn bias(&self) -> f64 {
        self.theta[self.theta.len() - 1]
    }

    /// Whether every coordinate lies in `[-tau, tau]`, the support of the
    /// uniform prior.
    pub fn in_box(&self) -> bool {
        self.theta.iter().all(|t| t.abs() <= self.tau)
    }

    fn project(&mut self) {
        let tau = self.tau;
        for t in &mut self.theta {
            *t = t.clamp(-tau, tau);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub weight_decay: f64,
    pub tau: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            batch_size: 64,
            iterations: 20_000,
            seed: 0,
            weight_decay: 0.01,
            tau: 1e6,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.batch_size % 2 != 0 {
            return Err(Error::InvalidConfig("batch_size must be positive and even"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive"));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::InvalidConfig("weight_decay must be non-negative"));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidConfig("tau must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("AdamW moments need beta in [0, 1) and eps > 0"));
        }
        Ok(())
    }
}

/// `[|x_a - x_b|, x_a ⊙ x_b]`, symmetric in its arguments.
pub fn pair_features(xa: &[f64], xb: &[f64]) -> Result<Vec<f64>> {
    if xa.len() != xb.len() {
        return Err(Error::DimensionMismatch {
            expected: xa.len(),
            found: xb.len(),
        });
    }
    let mut phi = Vec::with_capacity(2 * xa.len());
    phi.extend(xa.iter().zip(xb).map(|(a, b)| (a - b).abs()));
    phi.extend(xa.iter().zip(xb).map(|(a, b)| a * b));
    Ok(phi)
}

#[inline]
fn score_unchecked(theta: &[f64], xa: &[f64], xb: &[f64]) -> f64 {
    let m = xa.len();
    let mut f = theta[2 * m];
    for k in 0..m {
        f += theta[k] * (xa[k] - xb[k]).abs() + theta[m + k] * (xa[k] * xb[k]);
    }
    f
}

/// Logit of the pair `(x_a, x_b)`.
pub fn score(params: &ModelParams, xa: &[f64], xb: &[f64]) -> Result<f64> {
    let m = params.dim();
    for x in [xa, xb] {
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: x.len(),
            });
        }
    }
    Ok(score_unchecked(&params.theta, xa, xb))
}

fn check_dim(params: &ModelParams, features: &FeatureSet) -> Result<()> {
    if features.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: features.dim(),
        });
    }
    Ok(())
}

/// All-pairs logits of `features`.
pub fn score_all(params: &ModelParams, features: &FeatureSet) -> Result<LogitMatrix> {
    check_dim(params, features)?;
    LogitMatrix::from_fn(features.len(), |a, b| {
        score_unchecked(&params.theta, features.row(a), features.row(b))
    })
}

/// Logits between every row element and every column element.
pub fn score_cross(params: &ModelParams, rows: &FeatureSet, cols: &FeatureSet) -> Result<CrossScores> {
    check_dim(params, rows)?;
    check_dim(params, cols)?;
    CrossScores::from_fn(rows.len(), cols.len(), |a, b| {
        score_unchecked(&params.theta, rows.row(a), cols.row(b))
    })
}

/// `-y f + log2(1 + 2^f)`, the negative base-2 log-likelihood of `y`.
pub fn pair_loss(f: f64, join: bool) -> f64 {
    // For y = 1 the loss simplifies to log2(1 + 2^-f).
    if join {
        softplus2(-f)
    } else {
        softplus2(f)
    }
}

/// One labeled pair of a mini-batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairSample {
    pub a: usize,
    pub b: usize,
    pub join: bool,
}

/// Mean [`pair_loss`] over `batch`.
pub fn batch_loss(params: &ModelParams, features: &FeatureSet, batch: &[PairSample]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(params, features)?;
    let sum: f64 = batch
        .iter()
        .map(|s| pair_loss(score_unchecked(&params.theta, features.row(s.a), features.row(s.b)), s.join))
        .sum();
    Ok(sum / batch.len() as f64)
}

/// Gradient of [`batch_loss`] with respect to `theta`. The derivative of a
/// pair's loss in its logit is `P(join) - y`.
pub fn gradient(params: &ModelParams, features: &FeatureSet, batch: &[PairSample]) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.theta.len()];
    loss_and_gradient(params, features, batch, &mut grad)?;
    Ok(grad)
}

fn loss_and_gradient(params: &ModelParams, features: &FeatureSet, batch: &[PairSample], grad: &mut [f64]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(params, features)?;
    let m = params.dim();
    let scale = 1.0 / batch.len() as f64;
    grad.fill(0.0);
    let mut loss = 0.0;
    for s in batch {
        let (xa, xb) = (features.row(s.a), features.row(s.b));
        let f = score_unchecked(&params.theta, xa, xb);
        loss += pair_loss(f, s.join);
        let y = if s.join { 1.0 } else { 0.0 };
        let d = (sigmoid2(f) - y) * scale;
        for k in 0..m {
            grad[k] += d * (xa[k] - xb[k]).abs();
            grad[m + k] += d * xa[k] * xb[k];
        }
        grad[2 * m] += d;
    }
    Ok(loss * scale)
}

/// Endless stream of balanced mini-batches: each holds `batch_size / 2`
/// join pairs and `batch_size / 2` cut pairs, drawn uniformly with
/// replacement by a ChaCha8 generator seeded with `seed`.
#[derive(Clone, Debug)]
pub struct BalancedBatches {
    joins: Vec<(usize, usize)>,
    cuts: Vec<(usize, usize)>,
    half: usize,
    rng: ChaCha8Rng,
}

impl Iterator for BalancedBatches {
    type Item = Vec<PairSample>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut batch = Vec::with_capacity(2 * self.half);
        for _ in 0..self.half {
            let (a, b) = self.joins[self.rng.random_range(0..self.joins.len())];
            batch.push(PairSample { a, b, join: true });
        }
        for _ in 0..self.half {
            let (a, b) = self.cuts[self.rng.random_range(0..self.cuts.len())];
            batch.push(PairSample { a, b, join: false });
        }
        Some(batch)
    }
}

pub fn balanced_batches(ds: &PairDataset, batch_size: usize, seed: u64) -> Result<BalancedBatches> {
    if batch_size == 0 || batch_size % 2 != 0 {
        return Err(Error::InvalidConfig("batch_size must be positive and even"));
    }
    let (mut joins, mut cuts) = (Vec::new(), Vec::new());
    for (a, b) in pairs(ds.features.len()) {
        if ds.classes[a] == ds.classes[b] {
            joins.push((a, b));
        } else {
            cuts.push((a, b));
        }
    }
    let half = batch_size / 2;
    if joins.len() < half || cuts.len() < half {
        return Err(Error::InsufficientPairs {
            joins: joins.len(),
            cuts: cuts.len(),
            needed: half,
        });
    }
    Ok(BalancedBatches {
        joins,
        cuts,
        half,
        rng: ChaCha8Rng::seed_from_u64(seed),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Mini-batch loss before each step.
    pub losses: Vec<f64>,
}

/// AdamW with decoupled weight decay, followed by projection onto
/// `[-tau, tau]` after every step. Parameters start at zero.
pub fn train(ds: &PairDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let batches = balanced_batches(ds, cfg.batch_size, cfg.seed)?;
    let features = ds.features();
    let mut params = ModelParams::zeros(features.dim(), cfg.tau);
    let len = params.theta.len();
    let (mut m1, mut m2, mut grad) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut pow1, mut pow2) = (1.0, 1.0);
    let mut losses = Vec::with_capacity(cfg.iterations);

    for batch in batches.take(cfg.iterations) {
        losses.push(loss_and_gradient(&params, features, &batch, &mut grad)?);
        pow1 *= cfg.beta1;
        pow2 *= cfg.beta2;
        for k in 0..len {
            m1[k] = cfg.beta1 * m1[k] + (1.0 - cfg.beta1) * grad[k];
            m2[k] = cfg.beta2 * m2[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
            let m_hat = m1[k] / (1.0 - pow1);
            let v_hat = m2[k] / (1.0 - pow2);
            let t = &mut params.theta[k];
            *t -= cfg.learning_rate * (m_hat / (libm::sqrt(v_hat) + cfg.eps) + cfg.weight_decay * *t);
        }
        params.project();
    }
    Ok(TrainOutcome { params, losses })
}

/// Fraction of pairs whose thresholded logit (`f >= 0`) matches `truth`.
pub fn pair_accuracy(m: &LogitMatrix, truth: &PairLabeling) -> Result<f64> {
    if m.n() != truth.n() {
        return Err(Error::SizeMismatch {
            expected: truth.n(),
            found: m.n(),
        });
    }
    if m.n() < 2 {
        return Err(Error::EmptyInstance);
    }
    let hits = m
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .filter(|(&f, &y)| (f >= 0.0) == y)
        .count();
    Ok(hits as f64 / truth.as_slice().len() as f64)
}
