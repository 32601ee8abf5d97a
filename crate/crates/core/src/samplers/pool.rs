use std::collections::VecDeque;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::{FrontierStats, NormCoeffs, Sampler};
use crate::graph::{induce_subgraph, NormAdj, Subgraph};
use crate::{seed, Result};

/// Everything one worker needs to turn a seed into a ready subgraph:
/// sample, clip, induce (which also transposes), and optionally rescale.
#[derive(Clone, Debug)]
pub struct Pipeline<'g> {
    pub sampler: Sampler<'g>,
    pub adj: &'g NormAdj,
    pub coeffs: Option<&'g NormCoeffs>,
}

impl<'g> Pipeline<'g> {
    pub fn produce(&self, seed: u64) -> Result<(Subgraph, FrontierStats)> {
        let mut rng = seed::rng(seed);
        let (nodes, stats) = self.sampler.sample_clipped(&mut rng)?;
        let g = self.sampler.graph();
        let mut sub = induce_subgraph(g, self.adj, &nodes)?;
        if let Some(c) = self.coeffs {
            c.apply(g, &mut sub)?;
        }
        Ok((sub, stats))
    }
}

/// FIFO of ready subgraphs.
#[derive(Clone, Debug, Default)]
pub struct SubgraphPool {
    queue: VecDeque<Subgraph>,
}

impl SubgraphPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn push(&mut self, sub: Subgraph) {
        self.queue.push_back(sub);
    }

    pub fn pop(&mut self) -> Option<Subgraph> {
        self.queue.pop_front()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subgraph> {
        self.queue.iter()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FillStats {
    pub subgraphs: usize,
    pub frontier: FrontierStats,
    pub wall: Duration,
}

/// Runs one worker per seed and appends the results to `pool` in seed order,
/// whatever order the workers finish in.
pub fn fill_pool(pipeline: &Pipeline<'_>, seeds: &[u64], pool: &mut SubgraphPool) -> Result<FillStats> {
    let start = Instant::now();
    let mut slots: Vec<Option<Result<(Subgraph, FrontierStats)>>> = (0..seeds.len()).map(|_| None).collect();
    if seeds.len() == 1 {
        slots[0] = Some(pipeline.produce(seeds[0]));
    } else {
        let (tx, rx) = mpsc::channel();
        thread::scope(|s| {
            for (i, &sd) in seeds.iter().enumerate() {
                let tx = tx.clone();
                s.spawn(move || {
                    // the receiver outlives the scope, so send cannot fail
                    let _ = tx.send((i, pipeline.produce(sd)));
                });
            }
            drop(tx);
            for (i, res) in rx {
                slots[i] = Some(res);
            }
        });
    }
    let mut stats = FillStats::default();
    for slot in slots {
        let (sub, fs) = slot.expect("every worker reports")?;
        stats.frontier.merge(&fs);
        stats.subgraphs += 1;
        pool.push(sub);
    }
    stats.wall = start.elapsed();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{kronecker_generate, normalize_adjacency, NormMode};
    use crate::samplers::SamplerConfig;

    #[test]
    fn single_worker_fills_one() {
        let g = kronecker_generate(8, 8.0, 2).unwrap();
        let adj = normalize_adjacency(&g, NormMode::Row);
        let cfg = SamplerConfig {
            m: 20,
            n: 64,
            ..SamplerConfig::default()
        };
        let p = Pipeline {
            sampler: Sampler::new(&g, &cfg).unwrap(),
            adj: &adj,
            coeffs: None,
        };
        let mut pool = SubgraphPool::new();
        let st = fill_pool(&p, &[11], &mut pool).unwrap();
        assert_eq!(pool.len(), 1);
        assert_eq!(st.subgraphs, 1);
        assert_eq!(pool.pop().unwrap().num_nodes() % 16, 0);
        assert!(pool.pop().is_none());
    }

    #[test]
    fn parallel_fill_is_deterministic_and_ordered() {
        let g = kronecker_generate(9, 8.0, 3).unwrap();
        let adj = normalize_adjacency(&g, NormMode::Sym);
        let cfg = SamplerConfig {
            m: 30,
            n: 100,
            ..SamplerConfig::default()
        };
        let p = Pipeline {
            sampler: Sampler::new(&g, &cfg).unwrap(),
            adj: &adj,
            coeffs: None,
        };
        let seeds = [1, 2, 3, 4];
        let mut a = SubgraphPool::new();
        let mut b = SubgraphPool::new();
        fill_pool(&p, &seeds, &mut a).unwrap();
        fill_pool(&p, &seeds, &mut b).unwrap();
        let na: Vec<_> = a.iter().map(|s| s.nodes.clone()).collect();
        let nb: Vec<_> = b.iter().map(|s| s.nodes.clone()).collect();
        assert_eq!(na, nb);
        let seq: Vec<_> = seeds.iter().map(|&s| p.produce(s).unwrap().0.nodes).collect();
        assert_eq!(na, seq);
    }
}
