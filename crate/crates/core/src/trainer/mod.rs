//! Minibatch training over sampled subgraphs and full-graph evaluation.

mod counts;
mod metrics;
mod optim;
mod report;

use std::thread;
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::{Deserialize, Serialize};

pub use counts::{layer_sample_counts, CountMode};
pub use metrics::{f1_micro, predict, Confusion};
pub use optim::{Optimizer, OptimizerConfig};
pub use report::{EpochRecord, Timings, TrainReport};

use crate::graph::{normalize_adjacency, Graph, Split};
use crate::kernels::{DenseMatrix, KernelCtx, DEFAULT_CACHE_BYTES};
use crate::model::{backward, forward, loss_ce, AdjView, Arch, FullAdj, ModelSpec, Params};
use crate::samplers::{estimate_norm_coeffs, fill_pool, FillStats, Pipeline, Sampler, SamplerConfig, SubgraphPool};
use crate::{seed, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub arch: Arch,
    pub layers: usize,
    /// Per-layer branch widths; a single value applies to every layer.
    pub hidden: Vec<usize>,
    pub mixhop_k: usize,
    pub sampler: SamplerConfig,
    /// Samplers run per pool refill.
    pub p_inter: usize,
    /// Kernel threads.
    pub workers: usize,
    pub epochs: usize,
    pub lr: f64,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub cache_bytes: usize,
    pub use_norm_coeffs: bool,
    pub norm_estimation_subgraphs: usize,
    /// Set up everything but run no iterations.
    pub dry_run: bool,
    /// Refill the pool on a background thread while the last subgraph of
    /// the current pool trains.
    pub background_refill: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            arch: Arch::Sage,
            layers: 2,
            hidden: vec![64],
            mixhop_k: 2,
            sampler: SamplerConfig::default(),
            p_inter: 1,
            workers: 1,
            epochs: 10,
            lr: 0.01,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            cache_bytes: DEFAULT_CACHE_BYTES,
            use_norm_coeffs: false,
            norm_estimation_subgraphs: 50,
            dry_run: false,
            background_refill: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if self.epochs == 0 && !self.dry_run {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.hidden.len() != 1 && self.hidden.len() != self.layers {
            return Err(Error::Config(format!(
                "hidden lists {} widths for {} layers",
                self.hidden.len(),
                self.layers
            )));
        }
        if self.p_inter == 0 || self.workers == 0 {
            return Err(Error::Config("p_inter and workers must be at least 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.lr)));
        }
        if self.use_norm_coeffs && self.norm_estimation_subgraphs == 0 {
            return Err(Error::Config("norm_estimation_subgraphs must be at least 1".into()));
        }
        self.sampler.validate()
    }

    pub fn hidden_dims(&self) -> Vec<usize> {
        if self.hidden.len() == 1 {
            vec![self.hidden[0]; self.layers]
        } else {
            self.hidden.clone()
        }
    }

    pub fn model_spec(&self, g: &Graph) -> ModelSpec {
        ModelSpec {
            arch: self.arch,
            in_dim: g.feat_dim(),
            hidden: self.hidden_dims(),
            num_classes: g.num_classes(),
            multilabel: g.multilabel(),
            mixhop_k: self.mixhop_k,
        }
    }
}

/// `ceil(|V_train| / budget)` with the sampler's nominal node budget.
pub fn iterations_per_epoch(train_nodes: usize, sampler: &SamplerConfig) -> usize {
    train_nodes.div_ceil(sampler.node_budget().max(1)).max(1)
}

/// Feature rows of `nodes` (all nodes when `None`) as an f64 matrix.
pub fn feature_matrix(g: &Graph, nodes: Option<&[u32]>) -> DenseMatrix {
    let f = g.feat_dim();
    match nodes {
        Some(ns) => DenseMatrix::from_fn(ns.len(), f, |i, j| f64::from(g.feature_row(ns[i] as usize)[j])),
        None => DenseMatrix::from_fn(g.num_nodes(), f, |i, j| f64::from(g.feature_row(i)[j])),
    }
}

pub fn label_matrix(g: &Graph, nodes: &[u32]) -> DenseMatrix {
    DenseMatrix::from_fn(nodes.len(), g.num_classes(), |i, j| f64::from(g.label_row(nodes[i] as usize)[j]))
}

/// Full-graph inference state reused across evaluations.
pub struct Evaluator {
    adj: FullAdj,
    x: DenseMatrix,
}

impl Evaluator {
    pub fn new(g: &Graph, arch: Arch) -> Result<Self> {
        Ok(Evaluator {
            adj: FullAdj::new(g, arch.norm_mode())?,
            x: feature_matrix(g, None),
        })
    }

    pub fn adj(&self) -> AdjView<'_> {
        self.adj.view()
    }

    /// Binary predictions for every node.
    pub fn predict(&self, ctx: &KernelCtx, params: &Params, multilabel: bool) -> Result<Vec<Vec<bool>>> {
        let fp = forward(ctx, &self.adj.view(), &self.x, params, multilabel)?;
        Ok(predict(fp.prob(), multilabel))
    }
}

/// Micro F1 of `predictions` restricted to `split`.
pub fn split_f1(g: &Graph, predictions: &[Vec<bool>], split: Split) -> Result<f64> {
    let nodes = g.nodes_in(split);
    if nodes.is_empty() {
        return Err(Error::Config(format!("{split:?} split is empty")));
    }
    let pred: Vec<Vec<bool>> = nodes.iter().map(|&v| predictions[v as usize].clone()).collect();
    Ok(f1_micro(&pred, nodes.iter().map(|&v| g.label_row(v as usize))))
}

/// Full-graph forward pass, scored on `split`.
pub fn evaluate(g: &Graph, params: &Params, split: Split) -> Result<f64> {
    let arch = params
        .layers
        .first()
        .map(|l| l.arch())
        .ok_or_else(|| Error::Config("model has no layers".into()))?;
    let ev = Evaluator::new(g, arch)?;
    let pred = ev.predict(&KernelCtx::default(), params, g.multilabel())?;
    split_f1(g, &pred, split)
}

pub struct TrainOutcome {
    pub spec: ModelSpec,
    pub params: Params,
    pub report: TrainReport,
}

/// Seed of the sampler run `index` of refill `round`.
fn fill_seeds(base: u64, round: u64, p_inter: usize) -> Vec<u64> {
    (0..p_inter as u64).map(|i| seed::derive(base, round * p_inter as u64 + i)).collect()
}

pub fn train(g: &Graph, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if g.feat_dim() == 0 {
        return Err(Error::Config("graph has no node features".into()));
    }
    let train_nodes = g.count_in(Split::Train);
    if train_nodes == 0 {
        return Err(Error::Config("training split is empty".into()));
    }
    let spec = cfg.model_spec(g);
    let mut params = Params::init(&spec, seed::derive(cfg.seed, 1))?;
    let ipe = iterations_per_epoch(train_nodes, &cfg.sampler);
    let mut report = TrainReport::new(cfg, &spec, train_nodes, ipe);
    if cfg.dry_run {
        return Ok(TrainOutcome { spec, params, report });
    }

    let adj = normalize_adjacency(g, cfg.arch.norm_mode());
    let sampler = Sampler::new(g, &cfg.sampler)?;
    let coeffs = if cfg.use_norm_coeffs {
        let t = Instant::now();
        let c = estimate_norm_coeffs(&sampler, cfg.norm_estimation_subgraphs, seed::derive(cfg.seed, 2), cfg.p_inter)?;
        info!("estimated normalization coefficients in {:.1?}", t.elapsed());
        Some(c)
    } else {
        None
    };
    let pipeline = Pipeline {
        sampler,
        adj: &adj,
        coeffs: coeffs.as_ref(),
    };
    let ctx = KernelCtx::new(cfg.workers, cfg.cache_bytes);
    let evaluator = Evaluator::new(g, cfg.arch)?;
    let mut optimizer = Optimizer::new(cfg.optimizer, cfg.lr);
    let sample_base = seed::derive(cfg.seed, 3);
    let train_mask: Vec<bool> = g.split().iter().map(|&s| s == Split::Train).collect();

    thread::scope(|scope| -> Result<()> {
        let mut pool = SubgraphPool::new();
        let mut round = 0u64;
        let mut pending: Option<thread::ScopedJoinHandle<'_, Result<(SubgraphPool, FillStats)>>> = None;
        let pipeline = &pipeline;
        for epoch in 0..cfg.epochs {
            let epoch_start = Instant::now();
            let mut rec = EpochRecord::new(epoch);
            for _ in 0..ipe {
                let it_start = Instant::now();
                let mut sample_time = Duration::ZERO;
                if pool.is_empty() {
                    let t = Instant::now();
                    let stats = match pending.take() {
                        Some(handle) => {
                            let (next, stats) = handle.join().expect("refill thread panicked")?;
                            pool = next;
                            stats
                        }
                        None => {
                            let seeds = fill_seeds(sample_base, round, cfg.p_inter);
                            round += 1;
                            fill_pool(pipeline, &seeds, &mut pool)?
                        }
                    };
                    sample_time = t.elapsed();
                    report.frontier.merge(&stats.frontier);
                }
                let sub = pool.pop().expect("pool was just filled");
                if cfg.background_refill && pool.is_empty() {
                    let seeds = fill_seeds(sample_base, round, cfg.p_inter);
                    round += 1;
                    pending = Some(scope.spawn(move || {
                        let mut next = SubgraphPool::new();
                        let stats = fill_pool(pipeline, &seeds, &mut next)?;
                        Ok((next, stats))
                    }));
                }

                let x = feature_matrix(g, Some(&sub.nodes));
                let y = label_matrix(g, &sub.nodes);
                let weights: Vec<f64> = sub
                    .nodes
                    .iter()
                    .map(|&v| {
                        if !train_mask[v as usize] {
                            0.0
                        } else {
                            coeffs.as_ref().map_or(1.0, |c| c.lambda[v as usize])
                        }
                    })
                    .collect();
                let view = AdjView::from_subgraph(&sub);
                let fp = forward(&ctx, &view, &x, &params, spec.multilabel)?;
                let loss = loss_ce(fp.prob(), &y, Some(&weights), spec.multilabel)?;
                if weights.iter().any(|&w| w > 0.0) {
                    let grads = backward(&ctx, &view, &params, &fp, &y, Some(&weights))?;
                    optimizer.step(&mut params, &grads)?;
                    rec.losses.push(loss);
                } else {
                    debug!("subgraph without training nodes; no update");
                }
                rec.subgraph_nodes += sub.num_nodes();
                rec.iterations += 1;
                let (agg, transform) = ctx.take_timers();
                rec.timings.add(it_start.elapsed(), sample_time, agg, transform);
            }
            let train_wall = epoch_start.elapsed();
            let eval_start = Instant::now();
            let pred = evaluator.predict(&ctx, &params, spec.multilabel)?;
            ctx.take_timers();
            rec.train_f1 = split_f1(g, &pred, Split::Train)?;
            rec.val_f1 = split_f1(g, &pred, Split::Val).ok();
            rec.eval_ms = ms(eval_start.elapsed());
            rec.wall_ms = ms(train_wall);
            rec.finish();
            info!(
                "epoch {epoch}: loss {:.4} train F1 {:.4} val F1 {} ({:.0} ms)",
                rec.loss,
                rec.train_f1,
                rec.val_f1.map_or("-".into(), |v| format!("{v:.4}")),
                rec.wall_ms
            );
            report.epochs.push(rec);
        }
        if let Some(h) = pending {
            // a refill started for an iteration that never came
            h.join().expect("refill thread panicked")?;
        }
        Ok(())
    })?;

    let pred = evaluator.predict(&ctx, &params, spec.multilabel)?;
    report.final_train_f1 = split_f1(g, &pred, Split::Train).ok();
    report.final_val_f1 = split_f1(g, &pred, Split::Val).ok();
    report.final_test_f1 = split_f1(g, &pred, Split::Test).ok();
    Ok(TrainOutcome { spec, params, report })
}

pub(crate) fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
