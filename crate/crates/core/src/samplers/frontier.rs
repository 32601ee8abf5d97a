use std::collections::HashSet;

use log::warn;
use rand::seq::index;
use rand::Rng;

use super::dashboard::init_dashboard;
use super::SamplerConfig;
use crate::graph::Graph;
use crate::{Error, Result};

/// Counters collected during one frontier sampling run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct FrontierStats {
    pub pops: u64,
    pub probes: u64,
    pub cleanups: u64,
    pub capacity: usize,
}

impl FrontierStats {
    /// Fraction of probes that landed on a non-null pin.
    pub fn acceptance_rate(&self) -> f64 {
        if self.probes == 0 {
            0.0
        } else {
            self.pops as f64 / self.probes as f64
        }
    }

    pub fn merge(&mut self, other: &FrontierStats) {
        self.pops += other.pops;
        self.probes += other.probes;
        self.cleanups += other.cleanups;
        self.capacity = self.capacity.max(other.capacity);
    }
}

/// Iterations allowed per budget node before giving up on reaching `n`.
const MAX_STEPS_PER_NODE: usize = 50;

pub fn frontier_sample<R: Rng + ?Sized>(g: &Graph, cfg: &SamplerConfig, rng: &mut R) -> Result<Vec<u32>> {
    frontier_sample_with_stats(g, cfg, rng).map(|(nodes, _)| nodes)
}

/// Dashboard frontier sampling. Returns the sorted node set and counters.
///
/// The frontier starts as `m` distinct uniform nodes, all of which belong to
/// the sample. Each step pops a node by degree, replaces it with a uniform
/// neighbor and adds that neighbor to the sample, until `n` distinct nodes
/// are collected.
pub fn frontier_sample_with_stats<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<(Vec<u32>, FrontierStats)> {
    let (m, n) = (cfg.m, cfg.n);
    let nv = g.num_nodes();
    if m > nv {
        return Err(Error::Sampler(format!("frontier size {m} exceeds {nv} nodes")));
    }
    if n > nv {
        return Err(Error::Sampler(format!("node budget {n} exceeds {nv} nodes")));
    }
    if m == 0 || m > n {
        return Err(Error::Config(format!("need 0 < m <= n, got m={m}, n={n}")));
    }
    let frontier: Vec<u32> = index::sample(rng, nv, m).into_iter().map(|v| v as u32).collect();
    let mut sampled: HashSet<u32> = frontier.iter().copied().collect();
    let mut db = init_dashboard(g, &frontier, cfg.eta)?;
    let mut stats = FrontierStats {
        capacity: db.capacity(),
        ..FrontierStats::default()
    };
    if db.live_pins() == 0 && n > m {
        warn!("frontier holds only isolated nodes; returning {} nodes", sampled.len());
        return Ok((sorted(sampled), stats));
    }
    let max_steps = MAX_STEPS_PER_NODE * n;
    let mut steps = 0;
    while sampled.len() < n {
        if steps == max_steps {
            warn!(
                "frontier sampler stopped after {steps} steps with {} of {n} nodes",
                sampled.len()
            );
            break;
        }
        steps += 1;
        let (v_pop, tile) = db.pop_frontier(rng)?;
        stats.pops += 1;
        let nbrs = g.neighbors(v_pop as usize);
        let v_new = nbrs[rng.random_range(0..nbrs.len())];
        if db.needs_cleanup(g.degree(v_new as usize)) {
            db = db.cleanup();
            stats.cleanups += 1;
        }
        db.add_to_frontier(g, v_new, tile);
        sampled.insert(v_new);
    }
    stats.probes = db.probes();
    Ok((sorted(sampled), stats))
}

fn sorted(set: HashSet<u32>) -> Vec<u32> {
    let mut v: Vec<u32> = set.into_iter().collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::SamplerKind;
    use crate::seed;

    fn cycle(n: u32) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_undirected_edges(n as usize, &edges).unwrap()
    }

    fn cfg(m: usize, n: usize) -> SamplerConfig {
        SamplerConfig {
            kind: SamplerKind::Frontier,
            m,
            n,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn n_equal_m_returns_initial_frontier() {
        let g = cycle(50);
        let (nodes, stats) = frontier_sample_with_stats(&g, &cfg(7, 7), &mut seed::rng(4)).unwrap();
        assert_eq!(nodes.len(), 7);
        assert_eq!(stats.pops, 0);
    }

    #[test]
    fn cycle_is_fully_covered() {
        let g = cycle(10);
        for s in 0..20 {
            let nodes = frontier_sample(&g, &cfg(2, 10), &mut seed::rng(s)).unwrap();
            assert_eq!(nodes, (0..10).collect::<Vec<u32>>());
        }
    }

    #[test]
    fn oversized_frontier_is_an_error() {
        let g = cycle(10);
        assert!(frontier_sample(&g, &cfg(11, 11), &mut seed::rng(0)).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let g = cycle(200);
        let a = frontier_sample(&g, &cfg(10, 80), &mut seed::rng(9)).unwrap();
        let b = frontier_sample(&g, &cfg(10, 80), &mut seed::rng(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 80);
    }
}
