//! Central finite-difference check of the analytic gradients.

use rand::Rng;
use serde::Serialize;

use super::{backward, forward, Arch, FullAdj, ModelSpec, Params};
use crate::graph::Graph;
use crate::kernels::{DenseMatrix, KernelCtx};
use crate::model::loss_ce;
use crate::{seed, Result};

pub const FD_STEP: f64 = 1e-5;
pub const REL_TOLERANCE: f64 = 1e-4;
/// Denominator floor so that near-zero gradients are compared absolutely.
pub const ABS_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GradcheckCase {
    pub arch: Arch,
    pub layers: usize,
    pub nodes: usize,
    pub multilabel: bool,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct GradcheckOptions {
    pub step: f64,
    pub tolerance: f64,
    /// Flips the sign of the head gradient before comparing.
    pub inject_fault: bool,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        GradcheckOptions {
            step: FD_STEP,
            tolerance: REL_TOLERANCE,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub tensor: String,
    pub row: usize,
    pub col: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    #[serde(flatten)]
    pub case: GradcheckCase,
    pub checked: usize,
    /// Coordinates whose perturbation crossed a ReLU or clamp kink.
    pub skipped: usize,
    /// Checked coordinates with an analytic gradient above the floor.
    pub nonzero: usize,
    pub max_rel_error: f64,
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
}

pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(ABS_FLOOR)
}

/// Every architecture (or just `only`) at depths 1 to 3 with both heads.
pub fn default_cases(only: Option<Arch>) -> Vec<GradcheckCase> {
    let mut cases = Vec::new();
    for arch in Arch::ALL {
        for layers in 1..=3 {
            for multilabel in [false, true] {
                let idx = cases.len() as u64;
                cases.push(GradcheckCase {
                    arch,
                    layers,
                    nodes: 12 + (idx as usize * 7) % 19,
                    multilabel,
                    seed: seed::derive(0x6c3d, idx),
                });
            }
        }
    }
    cases.retain(|c| only.is_none_or(|a| a == c.arch));
    cases
}

struct Problem {
    adj: FullAdj,
    x: DenseMatrix,
    y: DenseMatrix,
    weights: Vec<f64>,
    multilabel: bool,
}

impl Problem {
    fn new(case: &GradcheckCase, attempt: u64) -> Result<(Problem, Params)> {
        let mut rng = seed::rng_from(case.seed, attempt);
        let n = case.nodes;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.random_bool(0.25) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_undirected_edges(n, &edges)?;
        let spec = ModelSpec {
            arch: case.arch,
            in_dim: 4,
            hidden: vec![3; case.layers],
            num_classes: 3,
            multilabel: case.multilabel,
            mixhop_k: 2,
        };
        let x = DenseMatrix::from_fn(n, spec.in_dim, |_, _| rng.random_range(-1.0..1.0));
        let mut y = DenseMatrix::zeros(n, spec.num_classes);
        for i in 0..n {
            if case.multilabel {
                for j in 0..spec.num_classes {
                    y[(i, j)] = f64::from(u8::from(rng.random_bool(0.5)));
                }
            } else {
                y[(i, rng.random_range(0..spec.num_classes))] = 1.0;
            }
        }
        let weights = (0..n)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.5..1.5) })
            .collect();
        let params = Params::init(&spec, rng.random())?;
        let adj = FullAdj::new(&g, case.arch.norm_mode())?;
        Ok((
            Problem {
                adj,
                x,
                y,
                weights,
                multilabel: case.multilabel,
            },
            params,
        ))
    }

    fn loss(&self, ctx: &KernelCtx, p: &Params) -> Result<(f64, Vec<bool>)> {
        let fp = forward(ctx, &self.adj.view(), &self.x, p, self.multilabel)?;
        let l = loss_ce(fp.prob(), &self.y, Some(&self.weights), self.multilabel)?;
        Ok((l, fp.signature()))
    }
}

/// Redraws the instance until every tensor has a nonzero gradient, so dead
/// ReLUs cannot make a case pass vacuously, and until the head logits are
/// moderate. A saturated sigmoid stores `1 - p` with only a few significant
/// digits, which the difference quotient then amplifies by `1 / step`.
fn live_problem(ctx: &KernelCtx, case: &GradcheckCase) -> Result<(Problem, Params, Params)> {
    let mut attempt = 0;
    loop {
        let (prob, params) = Problem::new(case, attempt)?;
        let adj = prob.adj.view();
        let fp = forward(ctx, &adj, &prob.x, &params, prob.multilabel)?;
        let grads = backward(ctx, &adj, &params, &fp, &prob.y, Some(&prob.weights))?;
        let live = grads
            .tensors()
            .iter()
            .all(|t| t.as_slice().iter().any(|g| g.abs() > ABS_FLOOR));
        let conditioned = fp.head.z.as_slice().iter().all(|z| z.abs() <= MAX_LOGIT);
        let live = live && conditioned;
        attempt += 1;
        if live || attempt == MAX_ATTEMPTS {
            return Ok((prob, params, grads));
        }
    }
}

const MAX_ATTEMPTS: u64 = 64;
const MAX_LOGIT: f64 = 8.0;

pub fn run_case(case: &GradcheckCase, opts: &GradcheckOptions) -> Result<CaseReport> {
    let ctx = KernelCtx::default();
    let (prob, params, mut grads) = live_problem(&ctx, case)?;
    let fp = forward(&ctx, &prob.adj.view(), &prob.x, &params, prob.multilabel)?;
    let base_sig = fp.signature();
    if opts.inject_fault {
        grads.w_mlp.scale(-1.0);
    }
    let names: Vec<String> = params.named_tensors().into_iter().map(|(n, _)| n).collect();
    let analytic: Vec<DenseMatrix> = grads.tensors().into_iter().cloned().collect();
    let mut report = CaseReport {
        case: *case,
        checked: 0,
        skipped: 0,
        nonzero: 0,
        max_rel_error: 0.0,
        passed: true,
        mismatches: Vec::new(),
    };
    let mut probe = params.clone();
    for (t, name) in names.iter().enumerate() {
        let (rows, cols) = analytic[t].shape();
        for j in 0..cols {
            for i in 0..rows {
                let orig = probe.tensors()[t][(i, j)];
                probe.tensors_mut()[t][(i, j)] = orig + opts.step;
                let (lp, sp) = prob.loss(&ctx, &probe)?;
                probe.tensors_mut()[t][(i, j)] = orig - opts.step;
                let (lm, sm) = prob.loss(&ctx, &probe)?;
                probe.tensors_mut()[t][(i, j)] = orig;
                if sp != base_sig || sm != base_sig {
                    report.skipped += 1;
                    continue;
                }
                let numeric = (lp - lm) / (2.0 * opts.step);
                let a = analytic[t][(i, j)];
                let err = rel_error(a, numeric);
                report.checked += 1;
                if a.abs() > ABS_FLOOR {
                    report.nonzero += 1;
                }
                report.max_rel_error = report.max_rel_error.max(err);
                if err >= opts.tolerance {
                    report.passed = false;
                    report.mismatches.push(Mismatch {
                        tensor: name.clone(),
                        row: i,
                        col: j,
                        analytic: a,
                        numeric,
                        rel_error: err,
                    });
                }
            }
        }
    }
    Ok(report)
}

pub fn run_suite(cases: &[GradcheckCase], opts: &GradcheckOptions) -> Result<Vec<CaseReport>> {
    cases.iter().map(|c| run_case(c, opts)).collect()
}
