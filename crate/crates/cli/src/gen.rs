use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use sgnn::graph::{write_graph, KroneckerConfig, LabelMode};

use crate::{print_json, Outcome};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// log2 of the node count.
    #[arg(long)]
    scale: u32,
    /// Target average degree.
    #[arg(long, default_value_t = 16.0)]
    degree: f64,
    #[arg(long, value_parser = parse_labels, default_value = "planted")]
    labels: LabelMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    feat_dim: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long)]
    multilabel: bool,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// Overwrite an existing directory.
    #[arg(long)]
    force: bool,
}

fn parse_labels(s: &str) -> Result<LabelMode, String> {
    match s {
        "random" => Ok(LabelMode::Random),
        "planted" => Ok(LabelMode::Planted),
        other => Err(format!("unknown label mode '{other}' (random, planted)")),
    }
}

#[derive(Serialize)]
struct GenSummary {
    out: PathBuf,
    num_nodes: usize,
    num_edges: usize,
    feat_dim: usize,
    num_classes: usize,
    multilabel: bool,
    seed: u64,
}

pub fn run(a: GenArgs) -> Result<Outcome> {
    let cfg = KroneckerConfig {
        scale: a.scale,
        avg_degree: a.degree,
        seed: a.seed,
        feat_dim: a.feat_dim,
        num_classes: a.classes,
        labels: a.labels,
        multilabel: a.multilabel,
        ..KroneckerConfig::default()
    };
    let g = cfg.generate().context("generating graph")?;
    write_graph(&g, &a.out, a.force).with_context(|| format!("writing dataset to {}", a.out.display()))?;
    log::info!("wrote {} nodes, {} edge entries to {}", g.num_nodes(), g.num_edges(), a.out.display());
    print_json(&GenSummary {
        out: a.out,
        num_nodes: g.num_nodes(),
        num_edges: g.num_edges(),
        feat_dim: g.feat_dim(),
        num_classes: g.num_classes(),
        multilabel: g.multilabel(),
        seed: a.seed,
    })?;
    Ok(Outcome::Success)
}
