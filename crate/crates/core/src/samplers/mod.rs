//! Graph samplers producing minibatch subgraphs.

mod clip;
mod dashboard;
mod edge;
mod frontier;
mod norm_coeffs;
mod pool;
mod rw;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use clip::clip_nodes;
pub use dashboard::{dashboard_capacity, init_dashboard, Dashboard, Tile, TileRef, NULL_PIN};
pub use edge::{edge_sample, EdgeTable};
pub use frontier::{frontier_sample, frontier_sample_with_stats, FrontierStats};
pub use norm_coeffs::{estimate_norm_coeffs, NormCoeffs};
pub use pool::{fill_pool, FillStats, Pipeline, SubgraphPool};
pub use rw::rw_sample;

use crate::graph::Graph;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Frontier,
    Edge,
    Rw,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frontier" => Ok(SamplerKind::Frontier),
            "edge" => Ok(SamplerKind::Edge),
            "rw" => Ok(SamplerKind::Rw),
            other => Err(Error::Config(format!("unknown sampler '{other}' (frontier, edge, rw)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    /// Frontier size.
    pub m: usize,
    /// Node budget.
    pub n: usize,
    /// Dashboard enlargement factor.
    pub eta: f64,
    /// Edge budget.
    pub b: usize,
    /// Random walk roots.
    pub r: usize,
    /// Random walk length.
    pub h: usize,
    pub clip_multiple: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: SamplerKind::Frontier,
            m: 1000,
            n: 8000,
            eta: 2.0,
            b: 4000,
            r: 2000,
            h: 2,
            clip_multiple: 16,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clip_multiple == 0 {
            return Err(Error::Config("clip_multiple must be at least 1".into()));
        }
        match self.kind {
            SamplerKind::Frontier => {
                if self.m == 0 || self.m > self.n {
                    return Err(Error::Config(format!(
                        "frontier size must satisfy 0 < m <= n, got m={}, n={}",
                        self.m, self.n
                    )));
                }
                if !(self.eta > 1.0) {
                    return Err(Error::Config(format!("eta must exceed 1, got {}", self.eta)));
                }
            }
            SamplerKind::Edge if self.b == 0 => {
                return Err(Error::Config("edge budget b must be at least 1".into()));
            }
            SamplerKind::Rw if self.r == 0 => {
                return Err(Error::Config("random walk roots r must be at least 1".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Nominal subgraph size before deduplication and clipping.
    pub fn node_budget(&self) -> usize {
        match self.kind {
            SamplerKind::Frontier => self.n,
            SamplerKind::Edge => 2 * self.b,
            SamplerKind::Rw => self.r * (self.h + 1),
        }
    }
}

/// A sampler bound to one graph, holding any precomputed tables.
/// Shared read-only between workers.
#[derive(Clone, Debug)]
pub struct Sampler<'g> {
    graph: &'g Graph,
    cfg: SamplerConfig,
    edges: Option<EdgeTable>,
}

impl<'g> Sampler<'g> {
    pub fn new(graph: &'g Graph, cfg: &SamplerConfig) -> Result<Sampler<'g>> {
        cfg.validate()?;
        let edges = match cfg.kind {
            SamplerKind::Edge => Some(EdgeTable::new(graph)?),
            _ => None,
        };
        Ok(Sampler {
            graph,
            cfg: cfg.clone(),
            edges,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Sorted node set before clipping, plus frontier counters when applicable.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u32>, FrontierStats)> {
        let c = &self.cfg;
        match c.kind {
            SamplerKind::Frontier => frontier_sample_with_stats(self.graph, c, rng),
            SamplerKind::Edge => {
                let table = self.edges.as_ref().expect("edge table built in Sampler::new");
                Ok((table.sample_nodes(c.b, rng)?, FrontierStats::default()))
            }
            SamplerKind::Rw => Ok((rw_sample(self.graph, c.r, c.h, rng)?, FrontierStats::default())),
        }
    }

    /// Sample followed by clipping to `clip_multiple`.
    pub fn sample_clipped<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u32>, FrontierStats)> {
        let (nodes, stats) = self.sample(rng)?;
        Ok((clip_nodes(&nodes, self.cfg.clip_multiple, rng), stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_budgets() {
        let mut c = SamplerConfig::default();
        assert_eq!(c.node_budget(), 8000);
        c.kind = SamplerKind::Edge;
        assert_eq!(c.node_budget(), 8000);
        c.kind = SamplerKind::Rw;
        assert_eq!(c.node_budget(), 6000);
    }

    #[test]
    fn validation() {
        let mut c = SamplerConfig::default();
        assert!(c.validate().is_ok());
        c.m = 9000;
        assert!(c.validate().is_err());
        c.m = 10;
        c.eta = 1.0;
        assert!(c.validate().is_err());
        c.eta = 2.0;
        c.clip_multiple = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<SamplerConfig>(r#"{"kind":"edge","bogus":1}"#).is_err());
        let c: SamplerConfig = serde_json::from_str(r#"{"kind":"rw","h":4}"#).unwrap();
        assert_eq!(c.h, 4);
        assert_eq!(c.m, 1000);
    }
}
