use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use sgnn::graph::{load_graph, normalize_adjacency, NormMode};
use sgnn::samplers::{fill_pool, Pipeline, Sampler, SamplerConfig, SamplerKind, SubgraphPool};
use sgnn::seed::derive;

use crate::train::{set, SamplerArgs};
use crate::{print_json, Outcome};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Dataset directory.
    #[arg(long)]
    dataset: PathBuf,
    /// Samplers to run, comma separated [default: frontier,edge,rw].
    #[arg(long, value_delimiter = ',')]
    samplers: Option<Vec<SamplerKind>>,
    /// Largest number of parallel samplers; every p in 1..=p_inter is timed.
    #[arg(long, default_value_t = 4)]
    p_inter: usize,
    /// Subgraphs produced per timed fill.
    #[arg(long, default_value_t = 16)]
    subgraphs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Serialize)]
struct BenchRun {
    sampler: SamplerKind,
    p_inter: usize,
    subgraphs: usize,
    wall_ms: f64,
    speedup: f64,
    mean_subgraph_nodes: f64,
    pops: u64,
    probes: u64,
    cleanups: u64,
    /// Frontier sampler only.
    probe_acceptance_rate: Option<f64>,
    cleanups_per_subgraph: Option<f64>,
    predicted_cleanups: Option<u64>,
}

#[derive(Serialize)]
struct BenchReport {
    dataset: PathBuf,
    num_nodes: usize,
    num_edges: usize,
    config: SamplerConfig,
    runs: Vec<BenchRun>,
}

/// Cleanups one frontier subgraph should need: the Dashboard starts with the
/// frontier's `m` tiles in an `eta * m`-tile budget, each step adds one tile.
pub fn predicted_cleanups(cfg: &SamplerConfig) -> u64 {
    let added = cfg.n.saturating_sub(cfg.m) as f64;
    let room = (cfg.eta - 1.0) * cfg.m as f64;
    (added / room).ceil() as u64
}

pub fn run(a: BenchArgs) -> Result<Outcome> {
    let g = load_graph(&a.dataset).with_context(|| format!("loading dataset {}", a.dataset.display()))?;
    anyhow::ensure!(a.p_inter >= 1, "--p-inter must be at least 1");
    anyhow::ensure!(a.subgraphs >= 1, "--subgraphs must be at least 1");
    let mut base = SamplerConfig::default();
    a.sampler.apply(&mut base);
    let adj = normalize_adjacency(&g, NormMode::Row);
    let kinds = a
        .samplers
        .clone()
        .unwrap_or_else(|| vec![SamplerKind::Frontier, SamplerKind::Edge, SamplerKind::Rw]);
    let mut runs = Vec::new();
    for kind in kinds {
        let mut cfg = base.clone();
        set(&mut cfg.kind, Some(kind));
        let sampler = Sampler::new(&g, &cfg)?;
        let pipeline = Pipeline {
            sampler,
            adj: &adj,
            coeffs: None,
        };
        let mut baseline_ms = None;
        for p in 1..=a.p_inter {
            let seeds: Vec<u64> = (0..a.subgraphs as u64).map(|i| derive(a.seed, i)).collect();
            let mut total = sgnn::samplers::FrontierStats::default();
            let mut nodes = 0usize;
            let mut wall_ms = 0.0;
            for chunk in seeds.chunks(p) {
                let mut pool = SubgraphPool::new();
                let stats = fill_pool(&pipeline, chunk, &mut pool)?;
                wall_ms += stats.wall.as_secs_f64() * 1e3;
                total.merge(&stats.frontier);
                nodes += pool.iter().map(|s| s.nodes.len()).sum::<usize>();
            }
            let base_ms = *baseline_ms.get_or_insert(wall_ms);
            let frontier = kind == SamplerKind::Frontier;
            runs.push(BenchRun {
                sampler: kind,
                p_inter: p,
                subgraphs: a.subgraphs,
                wall_ms,
                speedup: if wall_ms > 0.0 { base_ms / wall_ms } else { 1.0 },
                mean_subgraph_nodes: nodes as f64 / a.subgraphs as f64,
                pops: total.pops,
                probes: total.probes,
                cleanups: total.cleanups,
                probe_acceptance_rate: frontier.then(|| total.acceptance_rate()),
                cleanups_per_subgraph: frontier.then(|| total.cleanups as f64 / a.subgraphs as f64),
                predicted_cleanups: frontier.then(|| predicted_cleanups(&cfg)),
            });
        }
    }
    print_json(&BenchReport {
        dataset: a.dataset,
        num_nodes: g.num_nodes(),
        num_edges: g.num_edges(),
        config: base,
        runs,
    })?;
    Ok(Outcome::Success)
}
