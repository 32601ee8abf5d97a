use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::Value;
use sgnn::graph::load_graph;
use sgnn::model::{save_checkpoint, Arch};
use sgnn::samplers::{SamplerConfig, SamplerKind};
use sgnn::trainer::{train, OptimizerConfig, TrainConfig};

use crate::Outcome;

/// Sampler flags shared by `train` and `sample-bench`. Each maps to one key
/// of the `sampler` config object.
#[derive(Args, Debug, Default)]
pub struct SamplerArgs {
    /// sampler.kind: frontier, edge or rw.
    #[arg(long = "sampler")]
    kind: Option<SamplerKind>,
    /// sampler.n: node budget of the frontier sampler.
    #[arg(long = "budget")]
    n: Option<usize>,
    /// sampler.m: frontier size.
    #[arg(long = "frontier-size")]
    m: Option<usize>,
    /// sampler.eta: Dashboard enlargement factor.
    #[arg(long)]
    eta: Option<f64>,
    /// sampler.b: edges drawn by the edge sampler.
    #[arg(long = "edge-budget")]
    b: Option<usize>,
    /// sampler.r: random walk roots.
    #[arg(long = "roots")]
    r: Option<usize>,
    /// sampler.h: random walk length.
    #[arg(long = "walk-length")]
    h: Option<usize>,
    /// sampler.clip_multiple: subgraph sizes are rounded down to this.
    #[arg(long)]
    clip_multiple: Option<usize>,
}

impl SamplerArgs {
    pub fn apply(&self, c: &mut SamplerConfig) {
        set(&mut c.kind, self.kind);
        set(&mut c.n, self.n);
        set(&mut c.m, self.m);
        set(&mut c.eta, self.eta);
        set(&mut c.b, self.b);
        set(&mut c.r, self.r);
        set(&mut c.h, self.h);
        set(&mut c.clip_multiple, self.clip_multiple);
    }
}

pub fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// JSON run config: training keys plus `dataset` and `out`. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset directory.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output directory for the checkpoint and reports [default: run].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace existing outputs in the output directory.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    arch: Option<Arch>,
    #[arg(long)]
    layers: Option<usize>,
    /// Per-layer branch widths, comma separated; one value applies to all layers.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    mixhop_k: Option<usize>,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Samplers per pool refill.
    #[arg(long)]
    p_inter: Option<usize>,
    /// Kernel worker threads [default: $SGNN_WORKERS, else the config file, else 1].
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// sgd or adam.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cache_bytes: Option<usize>,
    /// Estimate and apply aggregator and loss normalization.
    #[arg(long)]
    use_norm_coeffs: bool,
    #[arg(long)]
    norm_estimation_subgraphs: Option<usize>,
    #[arg(long)]
    dry_run: bool,
    #[arg(long)]
    background_refill: bool,
}

/// A run config file: every [`TrainConfig`] key plus `dataset` and `out`.
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub train: TrainConfig,
    /// Whether the file set `workers` itself.
    pub workers_set: bool,
}

pub const WORKERS_ENV: &str = "SGNN_WORKERS";

/// Default worker count from the environment, if set.
pub fn env_workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{WORKERS_ENV}={v:?} is not a worker count")),
        Err(_) => Ok(None),
    }
}

pub fn read_run_config(path: &Path) -> Result<RunConfig> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))?;
    let Some(obj) = value.as_object_mut() else {
        bail!("config {} must hold a JSON object", path.display());
    };
    let mut take_path = |key: &str| -> Result<Option<PathBuf>> {
        match obj.remove(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(other) => bail!("config key '{key}' must be a string, got {other}"),
        }
    };
    let dataset = take_path("dataset")?;
    let out = take_path("out")?;
    let workers_set = obj.contains_key("workers");
    let train = serde_json::from_value(value).with_context(|| format!("invalid config {}", path.display()))?;
    Ok(RunConfig {
        dataset,
        out,
        train,
        workers_set,
    })
}

fn parse_optimizer(s: &str) -> Result<OptimizerConfig> {
    match s {
        "sgd" => Ok(OptimizerConfig::Sgd),
        "adam" => Ok(OptimizerConfig::default()),
        other => bail!("unknown optimizer '{other}' (sgd, adam)"),
    }
}

impl TrainArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut rc = match &self.config {
            Some(p) => read_run_config(p)?,
            None => RunConfig {
                dataset: None,
                out: None,
                train: TrainConfig::default(),
                workers_set: false,
            },
        };
        if self.dataset.is_some() {
            rc.dataset.clone_from(&self.dataset);
        }
        if self.out.is_some() {
            rc.out.clone_from(&self.out);
        }
        let c = &mut rc.train;
        set(&mut c.arch, self.arch);
        set(&mut c.layers, self.layers);
        set(&mut c.hidden, self.hidden.clone());
        set(&mut c.mixhop_k, self.mixhop_k);
        self.sampler.apply(&mut c.sampler);
        set(&mut c.p_inter, self.p_inter);
        if self.workers.is_some() {
            set(&mut c.workers, self.workers);
        } else if !rc.workers_set {
            set(&mut c.workers, env_workers()?);
        }
        set(&mut c.epochs, self.epochs);
        set(&mut c.lr, self.lr);
        if let Some(o) = &self.optimizer {
            c.optimizer = parse_optimizer(o)?;
        }
        set(&mut c.seed, self.seed);
        set(&mut c.cache_bytes, self.cache_bytes);
        c.use_norm_coeffs |= self.use_norm_coeffs;
        set(&mut c.norm_estimation_subgraphs, self.norm_estimation_subgraphs);
        c.dry_run |= self.dry_run;
        c.background_refill |= self.background_refill;
        Ok(rc)
    }
}

const OUTPUTS: [&str; 4] = ["report.json", "report.txt", "config.json", "checkpoint"];

pub fn run(a: TrainArgs) -> Result<Outcome> {
    let rc = a.resolve()?;
    let Some(dataset) = rc.dataset else {
        bail!("no dataset given (use --dataset or the config key 'dataset')");
    };
    let out = rc.out.unwrap_or_else(|| PathBuf::from("run"));
    let cfg = rc.train;
    cfg.validate()?;
    if !a.force {
        if let Some(existing) = OUTPUTS.iter().map(|f| out.join(f)).find(|p| p.exists()) {
            bail!("{} already exists (use --force to overwrite)", existing.display());
        }
    }
    let g = load_graph(&dataset).with_context(|| format!("loading dataset {}", dataset.display()))?;
    log::info!(
        "loaded {}: {} nodes, {} edge entries, {} features, {} classes",
        dataset.display(),
        g.num_nodes(),
        g.num_edges(),
        g.feat_dim(),
        g.num_classes()
    );
    let outcome = train(&g, &cfg)?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    save_checkpoint(out.join("checkpoint"), &outcome.spec, &outcome.params)?;
    let write = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let p = out.join(name);
        fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))
    };
    write("report.json", serde_json::to_vec_pretty(&outcome.report)?)?;
    write("report.txt", outcome.report.to_table().into_bytes())?;
    write("config.json", serde_json::to_vec_pretty(&cfg)?)?;
    print!("{}", outcome.report.to_table());
    log::info!("wrote checkpoint and reports to {}", out.display());
    Ok(Outcome::Success)
}
