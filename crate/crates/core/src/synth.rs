//! Seeded synthetic instances: planted partitions, noisy logits and
//! Gaussian class embeddings.
//!
//! Every generator draws from a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`; normal variates use the ziggurat
//! sampler of `rand_distr`. Outputs are a pure function of inputs and seed.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::learn::FeatureSet;
use crate::{Error, GroupLabels, LogitMatrix, Partition, Result};

/// Gaussian logits: joins ~ N(+mu_join, sigma), cuts ~ N(-mu_cut, sigma).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub mu_join: f64,
    pub mu_cut: f64,
    pub sigma: f64,
}

impl NoiseModel {
    pub fn symmetric(mu: f64, sigma: f64) -> Self {
        Self {
            mu_join: mu,
            mu_cut: mu,
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_join > 0.0 && self.mu_join.is_finite() && self.mu_cut > 0.0 && self.mu_cut.is_finite()) {
            return Err(Error::InvalidConfig("mu_join and mu_cut must be positive"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig("sigma must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedSpec {
    pub cluster_sizes: Vec<usize>,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn uniform(clusters: usize, size: usize, seed: u64) -> Self {
        Self {
            cluster_sizes: vec![size; clusters],
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }
}

/// Contiguous blocks of ids with the requested sizes.
pub fn make_planted_partition(spec: &PlantedSpec) -> Result<Partition> {
    if spec.cluster_sizes.is_empty() {
        return Err(Error::EmptySpec);
    }
    if spec.cluster_sizes.contains(&0) {
        return Err(Error::InvalidPartition("empty cluster"));
    }
    let labels: Vec<usize> = spec
        .cluster_sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| core::iter::repeat_n(k, s))
        .collect();
    Ok(Partition::from_labels(&labels))
}

/// One independent Gaussian logit per pair, drawn in pair storage order.
pub fn sample_logits(truth: &Partition, nm: &NoiseModel, seed: u64) -> Result<LogitMatrix> {
    nm.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let join = Normal::new(nm.mu_join, nm.sigma).map_err(|_| Error::InvalidConfig("sigma"))?;
    let cut = Normal::new(-nm.mu_cut, nm.sigma).map_err(|_| Error::InvalidConfig("sigma"))?;
    LogitMatrix::from_fn(truth.len(), |i, j| {
        if truth.same_cluster(i, j) {
            join.sample(&mut rng)
        } else {
            cut.sample(&mut rng)
        }
    })
}

/// Logits drawn i.i.d. from `N(mean, sigma)`, in pair storage order, with no
/// planted structure.
pub fn sample_iid_logits(n: usize, mean: f64, sigma: f64, seed: u64) -> Result<LogitMatrix> {
    if !mean.is_finite() {
        return Err(Error::InvalidConfig("mean must be finite"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig("sigma must be finite and non-negative"));
    }
    let d = Normal::new(mean, sigma).map_err(|_| Error::InvalidConfig("sigma"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LogitMatrix::from_fn(n, |_, _| d.sample(&mut rng))
}

/// Gaussian clusters in `R^m`, one per entry of `class_sizes`, with class
/// centers at pairwise distance at least `separation`.
///
/// With at most `m` classes, center `k` is `separation / sqrt(2) * e_k`, so
/// all centers are exactly `separation` apart. Otherwise centers are random
/// directions on a sphere whose radius grows until rejection sampling finds
/// a well-separated set. Elements are ordered class by class; each gets
/// isotropic noise of standard deviation `sigma`.
pub fn sample_embeddings(
    class_sizes: &[usize],
    m: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
) -> Result<(FeatureSet, Vec<usize>)> {
    if m == 0 {
        return Err(Error::InvalidConfig("embedding dimension must be at least 1"));
    }
    if !(separation >= 0.0 && separation.is_finite() && sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig("separation and sigma must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = class_sizes.len();
    let centers = if k <= m {
        let scale = separation / core::f64::consts::SQRT_2;
        (0..k)
            .map(|c| {
                let mut v = vec![0.0; m];
                v[c] = scale;
                v
            })
            .collect()
    } else {
        random_centers(k, m, separation, &mut rng)
    };

    let noise = Normal::new(0.0, sigma).map_err(|_| Error::InvalidConfig("sigma"))?;
    let n: usize = class_sizes.iter().sum();
    let mut data = Vec::with_capacity(n * m);
    let mut classes = Vec::with_capacity(n);
    for (c, &size) in class_sizes.iter().enumerate() {
        for _ in 0..size {
            data.extend(centers[c].iter().map(|&x| x + noise.sample(&mut rng)));
            classes.push(c);
        }
    }
    Ok((FeatureSet::new(n, m, data)?, classes))
}

fn random_centers(k: usize, m: usize, separation: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut radius = separation.max(f64::MIN_POSITIVE);
    loop {
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut misses = 0;
        while centers.len() < k && misses < 1000 {
            let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut *rng)).collect();
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if norm == 0.0 {
                continue;
            }
            v.iter_mut().for_each(|x| *x *= radius / norm);
            let far = centers.iter().all(|c| {
                let d2: f64 = c.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 >= separation * separation
            });
            if far {
                centers.push(v);
            } else {
                misses += 1;
            }
        }
        if centers.len() == k {
            return centers;
        }
        radius *= 1.5;
    }
}

/// Tags every element with the group of its true class; `group_of_class[c]`
/// names the group of class `c`.
pub fn make_group_labels<S: AsRef<str>>(partition: &Partition, group_of_class: &[S]) -> Result<GroupLabels> {
    if let Some(c) = (0..partition.num_clusters()).find(|&c| c >= group_of_class.len()) {
        return Err(Error::UnmappedClass(c));
    }
    let tags: Vec<&str> = partition
        .labels()
        .iter()
        .map(|&c| group_of_class[c].as_ref())
        .collect();
    Ok(GroupLabels::new(&tags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::pairs;

    #[test]
    fn planted_blocks() {
        let p = make_planted_partition(&PlantedSpec { cluster_sizes: vec![2, 2], seed: 0 }).unwrap();
        assert_eq!(p.clusters(), vec![vec![0, 1], vec![2, 3]]);
        let p = make_planted_partition(&PlantedSpec { cluster_sizes: vec![1; 5], seed: 0 }).unwrap();
        assert_eq!(p, Partition::singletons(5));
        let p = make_planted_partition(&PlantedSpec { cluster_sizes: vec![3, 1], seed: 0 }).unwrap();
        assert_eq!(p.clusters(), vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(make_planted_partition(&PlantedSpec { cluster_sizes: vec![], seed: 0 }), Err(Error::EmptySpec));
    }

    #[test]
    fn noiseless_logits_are_exact() {
        let truth = make_planted_partition(&PlantedSpec::uniform(3, 4, 0)).unwrap();
        let m = sample_logits(&truth, &NoiseModel::symmetric(2.0, 0.0), 5).unwrap();
        for (i, j) in pairs(truth.len()) {
            let expected = if truth.same_cluster(i, j) { 2.0 } else { -2.0 };
            assert_eq!(m.get(i, j), expected);
        }
        assert_eq!(m.threshold(), truth.to_labeling());
    }

    #[test]
    fn logits_are_seeded() {
        let truth = make_planted_partition(&PlantedSpec::uniform(3, 5, 0)).unwrap();
        let nm = NoiseModel::symmetric(1.5, 2.0);
        assert_eq!(sample_logits(&truth, &nm, 7).unwrap(), sample_logits(&truth, &nm, 7).unwrap());
        assert_ne!(sample_logits(&truth, &nm, 7).unwrap(), sample_logits(&truth, &nm, 8).unwrap());
    }

    #[test]
    fn iid_logits_are_seeded_and_unstructured() {
        let a = sample_iid_logits(6, 0.0, 2.0, 3).unwrap();
        assert_eq!(a, sample_iid_logits(6, 0.0, 2.0, 3).unwrap());
        assert!(a.as_slice().iter().any(|&f| f > 0.0) && a.as_slice().iter().any(|&f| f < 0.0));
        assert_eq!(sample_iid_logits(3, 1.5, 0.0, 0).unwrap().as_slice(), &[1.5; 3]);
        assert!(sample_iid_logits(3, 0.0, -1.0, 0).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::symmetric(0.0, 1.0).validate().is_err());
        assert!(NoiseModel::symmetric(1.0, -1.0).validate().is_err());
    }

    #[test]
    fn noiseless_embeddings_collapse_per_class() {
        let (fs, classes) = sample_embeddings(&[3, 2, 4], 4, 5.0, 0.0, 1).unwrap();
        assert_eq!(classes, vec![0, 0, 0, 1, 1, 2, 2, 2, 2]);
        for a in 0..fs.len() {
            for b in 0..fs.len() {
                assert_eq!(classes[a] == classes[b], fs.row(a) == fs.row(b));
            }
        }
    }

    #[test]
    fn centers_are_separated() {
        for (k, m) in [(4, 8), (12, 3)] {
            let sizes = vec![1; k];
            let (fs, _) = sample_embeddings(&sizes, m, 6.0, 0.0, 3).unwrap();
            for (a, b) in pairs(k) {
                let d2: f64 = fs.row(a).iter().zip(fs.row(b)).map(|(x, y)| (x - y) * (x - y)).sum();
                assert!(libm::sqrt(d2) >= 6.0 - 1e-9, "{k} classes in R^{m}: {}", libm::sqrt(d2));
            }
        }
    }

    #[test]
    fn embeddings_are_seeded() {
        let a = sample_embeddings(&[5, 5], 3, 4.0, 1.0, 11).unwrap();
        let b = sample_embeddings(&[5, 5], 3, 4.0, 1.0, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn group_labels_follow_classes() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 1]);
        let g = make_group_labels(&p, &["B", "B"]).unwrap();
        assert_eq!(g.names().len(), 1);
        let g = make_group_labels(&p, &["B", "U"]).unwrap();
        assert_eq!((g.tag(0), g.tag(4)), ("B", "U"));
        assert_eq!(make_group_labels(&p, &["B"]), Err(Error::UnmappedClass(1)));
    }
}
