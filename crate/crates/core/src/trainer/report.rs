use std::fmt::Write;
use std::time::Duration;

use serde::Serialize;

use super::{ms, TrainConfig};
use crate::model::{Arch, ModelSpec};
use crate::samplers::{FrontierStats, SamplerKind};

/// Wall-time breakdown in milliseconds. `other_ms` is the part of
/// `total_ms` not spent sampling, aggregating or transforming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub sample_ms: f64,
    pub aggregate_ms: f64,
    pub transform_ms: f64,
    pub other_ms: f64,
    pub total_ms: f64,
}

impl Timings {
    pub fn add(&mut self, total: Duration, sample: Duration, aggregate: Duration, transform: Duration) {
        self.sample_ms += ms(sample);
        self.aggregate_ms += ms(aggregate);
        self.transform_ms += ms(transform);
        self.other_ms += ms(total.saturating_sub(sample + aggregate + transform));
        self.total_ms += ms(total);
    }

    pub fn parts_sum(&self) -> f64 {
        self.sample_ms + self.aggregate_ms + self.transform_ms + self.other_ms
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub iterations: usize,
    /// Mean of `losses`.
    pub loss: f64,
    /// Loss of every iteration that updated the weights.
    pub losses: Vec<f64>,
    pub train_f1: f64,
    pub val_f1: Option<f64>,
    pub timings: Timings,
    pub mean_subgraph_nodes: f64,
    pub wall_ms: f64,
    pub eval_ms: f64,
    #[serde(skip)]
    pub(crate) subgraph_nodes: usize,
}

impl EpochRecord {
    pub(crate) fn new(epoch: usize) -> Self {
        EpochRecord {
            epoch,
            iterations: 0,
            loss: 0.0,
            losses: Vec::new(),
            train_f1: 0.0,
            val_f1: None,
            timings: Timings::default(),
            mean_subgraph_nodes: 0.0,
            wall_ms: 0.0,
            eval_ms: 0.0,
            subgraph_nodes: 0,
        }
    }

    pub(crate) fn finish(&mut self) {
        if !self.losses.is_empty() {
            self.loss = self.losses.iter().sum::<f64>() / self.losses.len() as f64;
        }
        if self.iterations > 0 {
            self.mean_subgraph_nodes = self.subgraph_nodes as f64 / self.iterations as f64;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    pub arch: Arch,
    pub hidden: Vec<usize>,
    pub sampler: SamplerKind,
    pub node_budget: usize,
    pub train_nodes: usize,
    pub iterations_per_epoch: usize,
    pub seed: u64,
    pub epochs: Vec<EpochRecord>,
    pub final_train_f1: Option<f64>,
    pub final_val_f1: Option<f64>,
    pub final_test_f1: Option<f64>,
    pub frontier: FrontierStats,
}

impl TrainReport {
    pub(crate) fn new(cfg: &TrainConfig, spec: &ModelSpec, train_nodes: usize, ipe: usize) -> Self {
        TrainReport {
            arch: spec.arch,
            hidden: spec.hidden.clone(),
            sampler: cfg.sampler.kind,
            node_budget: cfg.sampler.node_budget(),
            train_nodes,
            iterations_per_epoch: ipe,
            seed: cfg.seed,
            epochs: Vec::new(),
            final_train_f1: None,
            final_val_f1: None,
            final_test_f1: None,
            frontier: FrontierStats::default(),
        }
    }

    pub fn total_iterations(&self) -> usize {
        self.epochs.iter().map(|e| e.iterations).sum()
    }

    /// Plain-text table, one row per epoch.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>5} {:>10} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "epoch", "loss", "train", "val", "sample", "aggr", "transf", "other", "total"
        );
        for e in &self.epochs {
            let t = &e.timings;
            let _ = writeln!(
                s,
                "{:>5} {:>10.5} {:>8.4} {:>8} {:>10.1} {:>10.1} {:>10.1} {:>10.1} {:>10.1}",
                e.epoch,
                e.loss,
                e.train_f1,
                e.val_f1.map_or("-".into(), |v| format!("{v:.4}")),
                t.sample_ms,
                t.aggregate_ms,
                t.transform_ms,
                t.other_ms,
                t.total_ms
            );
        }
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            s,
            "final F1: train {} val {} test {}",
            fmt(self.final_train_f1),
            fmt(self.final_val_f1),
            fmt(self.final_test_f1)
        );
        s
    }
}
