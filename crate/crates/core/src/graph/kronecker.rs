//! Kronecker (RMAT-style) synthetic graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Csr, Graph, Split};
use crate::seed;
use crate::{Error, Result};

/// Kronecker initiator; each recursion level picks a quadrant with
/// probability proportional to its entry.
pub const INITIATOR: [[f64; 2]; 2] = [[0.9, 0.5], [0.5, 0.1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Labels drawn independently of the structure.
    Random,
    /// Labels from a random linear score of `x_v + mean_{u ~ v} x_u`, so
    /// they are learnable from one round of aggregation.
    Planted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KroneckerConfig {
    pub scale: u32,
    pub avg_degree: f64,
    pub seed: u64,
    pub feat_dim: usize,
    pub num_classes: usize,
    pub labels: LabelMode,
    pub multilabel: bool,
    pub train_fraction: f64,
    pub val_fraction: f64,
}

impl Default for KroneckerConfig {
    fn default() -> Self {
        KroneckerConfig {
            scale: 10,
            avg_degree: 16.0,
            seed: 0,
            feat_dim: 32,
            num_classes: 4,
            labels: LabelMode::Random,
            multilabel: false,
            train_fraction: 0.8,
            val_fraction: 0.1,
        }
    }
}

/// Kronecker graph with default attributes (32 random features, 4 random
/// classes, 80/10/10 split).
pub fn kronecker_generate(scale: u32, avg_degree: f64, seed: u64) -> Result<Graph> {
    KroneckerConfig {
        scale,
        avg_degree,
        seed,
        ..KroneckerConfig::default()
    }
    .generate()
}

impl KroneckerConfig {
    pub fn generate(&self) -> Result<Graph> {
        if self.scale == 0 || self.scale > 31 {
            return Err(Error::Config(format!("scale must be in 1..=31, got {}", self.scale)));
        }
        if !(self.avg_degree >= 0.0) {
            return Err(Error::Config("average degree must be non-negative".into()));
        }
        if self.num_classes == 0 {
            return Err(Error::Config("need at least one class".into()));
        }
        if !(0.0..=1.0).contains(&(self.train_fraction + self.val_fraction))
            || self.train_fraction < 0.0
            || self.val_fraction < 0.0
        {
            return Err(Error::Config("split fractions must lie in [0, 1]".into()));
        }
        let csr = self.structure();
        let n = csr.num_rows();
        let mut rng = seed::rng_from(self.seed, 1);
        let features: Vec<f32> = (0..n * self.feat_dim)
            .map(|_| rng.random_range(-1.0f32..1.0))
            .collect();
        let labels = match self.labels {
            LabelMode::Random => self.random_labels(n, &mut rng),
            LabelMode::Planted => self.planted_labels(&csr, &features, &mut rng),
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let n_train = (self.train_fraction * n as f64).round() as usize;
        let n_val = ((self.val_fraction * n as f64).round() as usize).min(n - n_train);
        let mut split = vec![Split::Test; n];
        for (rank, &v) in order.iter().enumerate() {
            if rank < n_train {
                split[v] = Split::Train;
            } else if rank < n_train + n_val {
                split[v] = Split::Val;
            }
        }
        Graph::new(
            csr,
            self.feat_dim,
            features,
            self.num_classes,
            labels,
            split,
            self.multilabel,
        )
    }

    /// RMAT edge placement until the target number of distinct undirected
    /// edges is reached, then symmetrized.
    fn structure(&self) -> Csr {
        let n = 1usize << self.scale;
        let total: f64 = INITIATOR.iter().flatten().sum();
        let a = INITIATOR[0][0] / total;
        let ab = a + INITIATOR[0][1] / total;
        let abc = ab + INITIATOR[1][0] / total;

        let max_edges = n * (n - 1) / 2;
        let target = ((self.avg_degree * n as f64 / 2.0).round() as usize).min(max_edges);
        let max_draws = target.saturating_mul(64).max(1024);

        let mut rng = seed::rng_from(self.seed, 0);
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(target);
        let mut edges = Vec::with_capacity(target * 2);
        let mut draws = 0usize;
        while seen.len() < target && draws < max_draws {
            draws += 1;
            let (mut u, mut v) = (0u32, 0u32);
            for _ in 0..self.scale {
                let r: f64 = rng.random();
                let (bu, bv) = if r < a {
                    (0, 0)
                } else if r < ab {
                    (0, 1)
                } else if r < abc {
                    (1, 0)
                } else {
                    (1, 1)
                };
                u = (u << 1) | bu;
                v = (v << 1) | bv;
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                edges.push(key);
                edges.push((key.1, key.0));
            }
        }
        if seen.len() < target {
            log::warn!(
                "kronecker: placed {} of {target} edges after {draws} draws",
                seen.len()
            );
        }
        Csr::from_edges(n, &edges)
    }

    fn random_labels(&self, n: usize, rng: &mut seed::Rng) -> Vec<u8> {
        let c = self.num_classes;
        let mut labels = vec![0u8; n * c];
        for v in 0..n {
            if self.multilabel {
                for k in 0..c {
                    labels[v * c + k] = rng.random_bool(0.5) as u8;
                }
            } else {
                labels[v * c + rng.random_range(0..c)] = 1;
            }
        }
        labels
    }

    fn planted_labels(&self, csr: &Csr, features: &[f32], rng: &mut seed::Rng) -> Vec<u8> {
        let (n, f, c) = (csr.num_rows(), self.feat_dim, self.num_classes);
        let proj: Vec<f64> = (0..f * c).map(|_| StandardNormal.sample(rng)).collect();
        let mut scores = vec![0.0f64; n * c];
        let mut h = vec![0.0f64; f];
        for v in 0..n {
            h.iter_mut()
                .zip(&features[v * f..(v + 1) * f])
                .for_each(|(h, &x)| *h = x as f64);
            let deg = csr.degree(v);
            if deg > 0 {
                for &u in csr.row(v) {
                    let xu = &features[u as usize * f..(u as usize + 1) * f];
                    for (h, &x) in h.iter_mut().zip(xu) {
                        *h += x as f64 / deg as f64;
                    }
                }
            }
            for k in 0..c {
                scores[v * c + k] = (0..f).map(|j| h[j] * proj[j * c + k]).sum();
            }
        }
        let mut labels = vec![0u8; n * c];
        if self.multilabel {
            for k in 0..c {
                let mut col: Vec<f64> = (0..n).map(|v| scores[v * c + k]).collect();
                col.sort_by(f64::total_cmp);
                let median = col[n / 2];
                for v in 0..n {
                    labels[v * c + k] = (scores[v * c + k] >= median) as u8;
                }
            }
        } else {
            for v in 0..n {
                let row = &scores[v * c..(v + 1) * c];
                let best = (0..c).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap();
                labels[v * c + best] = 1;
            }
        }
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_is_power_of_two() {
        let g = kronecker_generate(10, 16.0, 1).unwrap();
        assert_eq!(g.num_nodes(), 1024);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = kronecker_generate(9, 8.0, 5).unwrap();
        let b = kronecker_generate(9, 8.0, 5).unwrap();
        let c = kronecker_generate(9, 8.0, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.indices(), c.indices());
    }

    #[test]
    fn average_degree_statistics() {
        for seed in 0..5 {
            let g = kronecker_generate(14, 16.0, seed).unwrap();
            let d = g.average_degree();
            assert!((12.0..=20.0).contains(&d), "seed {seed}: {d}");
        }
    }

    #[test]
    fn tiny_scale_saturates_gracefully() {
        let g = kronecker_generate(1, 16.0, 0).unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn planted_labels_are_one_hot() {
        let g = KroneckerConfig {
            scale: 8,
            labels: LabelMode::Planted,
            ..Default::default()
        }
        .generate()
        .unwrap();
        for v in 0..g.num_nodes() {
            assert_eq!(g.label_row(v).iter().map(|&l| l as usize).sum::<usize>(), 1);
        }
    }
}
