use std::thread;

use super::Sampler;
use crate::graph::{Graph, Subgraph};
use crate::{seed, Error, Result};

/// Sampling-frequency based bias correction.
///
/// Counts use add-one smoothing so that nodes and edges never drawn during
/// estimation keep finite, positive coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCoeffs {
    /// `(C_e + 1) / (C_v + 1)` for every CSR entry `e` of row `v`.
    pub alpha: Vec<f64>,
    /// `(N + 1) / (C_v + 1)` per node.
    pub lambda: Vec<f64>,
    pub node_counts: Vec<u32>,
    pub edge_counts: Vec<u32>,
    pub num_estimation_subgraphs: usize,
}

/// Samples `num_subgraphs` subgraphs and counts node and edge appearances.
/// Subgraph `i` uses seed `derive(base_seed, i)`, so the result does not
/// depend on `workers`.
pub fn estimate_norm_coeffs(
    sampler: &Sampler<'_>,
    num_subgraphs: usize,
    base_seed: u64,
    workers: usize,
) -> Result<NormCoeffs> {
    if num_subgraphs == 0 {
        return Err(Error::Config("norm estimation needs at least one subgraph".into()));
    }
    let g = sampler.graph();
    let workers = workers.clamp(1, num_subgraphs);
    let chunk = num_subgraphs.div_ceil(workers);
    let partials: Vec<Result<(Vec<u32>, Vec<u32>)>> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk)..((w + 1) * chunk).min(num_subgraphs);
                s.spawn(move || {
                    let mut cv = vec![0u32; g.num_nodes()];
                    let mut ce = vec![0u32; g.num_edges()];
                    for i in range {
                        let mut rng = seed::rng_from(base_seed, i as u64);
                        let (nodes, _) = sampler.sample_clipped(&mut rng)?;
                        count_into(g, &nodes, &mut cv, &mut ce);
                    }
                    Ok((cv, ce))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("estimation worker panicked")).collect()
    });
    let mut node_counts = vec![0u32; g.num_nodes()];
    let mut edge_counts = vec![0u32; g.num_edges()];
    for part in partials {
        let (cv, ce) = part?;
        node_counts.iter_mut().zip(cv).for_each(|(a, b)| *a += b);
        edge_counts.iter_mut().zip(ce).for_each(|(a, b)| *a += b);
    }
    Ok(NormCoeffs::from_counts(g, node_counts, edge_counts, num_subgraphs))
}

/// Adds one appearance for every node of the sorted set `nodes` and every
/// graph edge with both endpoints inside it.
fn count_into(g: &Graph, nodes: &[u32], cv: &mut [u32], ce: &mut [u32]) {
    for &v in nodes {
        cv[v as usize] += 1;
        let range = g.csr().row_range(v as usize);
        for (e, w) in range.clone().zip(g.neighbors(v as usize)) {
            if nodes.binary_search(w).is_ok() {
                ce[e] += 1;
            }
        }
    }
}

impl NormCoeffs {
    pub fn from_counts(g: &Graph, node_counts: Vec<u32>, edge_counts: Vec<u32>, num_subgraphs: usize) -> NormCoeffs {
        let mut alpha = vec![0.0; g.num_edges()];
        for v in 0..g.num_nodes() {
            let cv = node_counts[v] as f64 + 1.0;
            for e in g.csr().row_range(v) {
                alpha[e] = (edge_counts[e] as f64 + 1.0) / cv;
            }
        }
        let lambda = node_counts
            .iter()
            .map(|&c| (num_subgraphs as f64 + 1.0) / (c as f64 + 1.0))
            .collect();
        NormCoeffs {
            alpha,
            lambda,
            node_counts,
            edge_counts,
            num_estimation_subgraphs: num_subgraphs,
        }
    }

    /// Divides each non-diagonal forward coefficient of `sub` by the alpha of
    /// its parent edge. Self-loop entries are left alone.
    pub fn apply(&self, g: &Graph, sub: &mut Subgraph) -> Result<()> {
        let mut data = sub.data_fwd.clone();
        for i in 0..sub.num_nodes() {
            let pv = sub.nodes[i] as usize;
            for e in sub.csr.row_range(i) {
                let pu = sub.nodes[sub.csr.indices[e] as usize];
                if pu as usize == pv {
                    continue;
                }
                let parent = g
                    .csr()
                    .find(pv, pu)
                    .ok_or_else(|| Error::InvalidGraph(format!("subgraph edge ({pv}, {pu}) not in graph")))?;
                data[e] /= self.alpha[parent];
            }
        }
        sub.set_forward_data(data)
    }

    /// Loss weights for the nodes of `sub`, in local order.
    pub fn node_weights(&self, sub: &Subgraph) -> Vec<f64> {
        sub.nodes.iter().map(|&v| self.lambda[v as usize]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{SamplerConfig, SamplerKind};

    #[test]
    fn full_graph_sampler_gives_uniform_lambda() {
        // a cycle walked far enough always covers every node
        let n = 6u32;
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_undirected_edges(n as usize, &edges).unwrap();
        let cfg = SamplerConfig {
            kind: SamplerKind::Frontier,
            m: 2,
            n: 6,
            clip_multiple: 1,
            ..SamplerConfig::default()
        };
        let s = Sampler::new(&g, &cfg).unwrap();
        let c = estimate_norm_coeffs(&s, 10, 3, 2).unwrap();
        assert!(c.node_counts.iter().all(|&x| x == 10));
        assert!(c.lambda.iter().all(|&l| (l - 1.0).abs() < 1e-12));
        assert!(c.alpha.iter().all(|&a| (a - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_subgraphs_is_an_error() {
        let g = Graph::from_undirected_edges(2, &[(0, 1)]).unwrap();
        let cfg = SamplerConfig {
            kind: SamplerKind::Edge,
            b: 1,
            ..SamplerConfig::default()
        };
        let s = Sampler::new(&g, &cfg).unwrap();
        assert!(estimate_norm_coeffs(&s, 0, 0, 1).is_err());
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let g = crate::graph::kronecker_generate(7, 6.0, 1).unwrap();
        let cfg = SamplerConfig {
            kind: SamplerKind::Rw,
            r: 10,
            h: 2,
            clip_multiple: 1,
            ..SamplerConfig::default()
        };
        let s = Sampler::new(&g, &cfg).unwrap();
        let a = estimate_norm_coeffs(&s, 9, 5, 1).unwrap();
        let b = estimate_norm_coeffs(&s, 9, 5, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.alpha.iter().chain(&a.lambda).all(|&x| x > 0.0));
    }
}
