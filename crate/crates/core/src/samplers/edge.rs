use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;

use crate::graph::Graph;
use crate::{Error, Result};

/// Alias table over undirected edges with `P(u, v) ∝ 1/deg(u) + 1/deg(v)`.
#[derive(Clone, Debug)]
pub struct EdgeTable {
    edges: Vec<(u32, u32)>,
    weights: Vec<f64>,
    alias: Option<WeightedAliasIndex<f64>>,
}

impl EdgeTable {
    pub fn new(g: &Graph) -> Result<EdgeTable> {
        let mut edges = Vec::with_capacity(g.num_edges() / 2);
        let mut weights = Vec::with_capacity(g.num_edges() / 2);
        for u in 0..g.num_nodes() {
            for &v in g.neighbors(u) {
                if (v as usize) > u {
                    edges.push((u as u32, v));
                    weights.push(1.0 / g.degree(u) as f64 + 1.0 / g.degree(v as usize) as f64);
                }
            }
        }
        let alias = if edges.is_empty() {
            None
        } else {
            Some(
                WeightedAliasIndex::new(weights.clone())
                    .map_err(|e| Error::Sampler(format!("alias table: {e}")))?,
            )
        };
        Ok(EdgeTable { edges, weights, alias })
    }

    /// Undirected edges with `u < v`, in CSR order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Normalized selection probability of each edge.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    /// Draws `b` edge indices with replacement.
    pub fn draw<R: Rng + ?Sized>(&self, b: usize, rng: &mut R) -> Result<Vec<usize>> {
        let alias = self
            .alias
            .as_ref()
            .ok_or_else(|| Error::Sampler("graph has no edges to sample".into()))?;
        Ok((0..b).map(|_| alias.sample(rng)).collect())
    }

    /// Sorted, deduplicated endpoints of `b` drawn edges.
    pub fn sample_nodes<R: Rng + ?Sized>(&self, b: usize, rng: &mut R) -> Result<Vec<u32>> {
        let mut nodes = Vec::with_capacity(2 * b);
        for e in self.draw(b, rng)? {
            let (u, v) = self.edges[e];
            nodes.push(u);
            nodes.push(v);
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }
}

/// Builds a fresh alias table and draws `b` edges. Prefer a shared
/// [`EdgeTable`] when sampling repeatedly.
pub fn edge_sample<R: Rng + ?Sized>(g: &Graph, b: usize, rng: &mut R) -> Result<Vec<u32>> {
    EdgeTable::new(g)?.sample_nodes(b, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn path_weights() {
        let g = Graph::from_undirected_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = EdgeTable::new(&g).unwrap();
        assert_eq!(t.edges(), &[(0, 1), (1, 2), (2, 3)]);
        let p = t.probabilities();
        for (a, b) in p.iter().zip([0.375, 0.25, 0.375]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn large_budget_covers_non_isolated_nodes() {
        let g = Graph::from_undirected_edges(6, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let nodes = edge_sample(&g, 200, &mut seed::rng(0)).unwrap();
        assert_eq!(nodes, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn edgeless_graph_is_an_error() {
        let g = Graph::from_undirected_edges(3, &[]).unwrap();
        assert!(edge_sample(&g, 1, &mut seed::rng(0)).is_err());
    }
}
