mod common;

use sgnn::graph::{Graph, KroneckerConfig, LabelMode};
use sgnn::kernels::{gemm_tn, DenseMatrix};
use sgnn::model::{loss_ce, loss_grad, Arch};
use sgnn::samplers::{SamplerConfig, SamplerKind};
use sgnn::seed::rng;
use sgnn::trainer::{feature_matrix, label_matrix, train, TrainConfig, TrainReport};

fn small(multilabel: bool) -> Graph {
    KroneckerConfig {
        scale: 8,
        labels: LabelMode::Planted,
        seed: 3,
        multilabel,
        ..KroneckerConfig::default()
    }
    .generate()
    .unwrap()
}

fn config(arch: Arch, epochs: usize) -> TrainConfig {
    TrainConfig {
        arch,
        hidden: vec![16],
        epochs,
        sampler: SamplerConfig {
            kind: SamplerKind::Frontier,
            m: 20,
            n: 64,
            // a 20-node frontier can hold a hub or two on this skewed graph
            eta: 6.0,
            ..SamplerConfig::default()
        },
        seed: 5,
        ..TrainConfig::default()
    }
}

fn losses(r: &TrainReport) -> Vec<f64> {
    r.epochs.iter().flat_map(|e| e.losses.iter().copied()).collect()
}

#[test]
fn same_seed_same_losses() {
    let g = small(false);
    let cfg = config(Arch::Sage, 4);
    let a = train(&g, &cfg).unwrap();
    let b = train(&g, &cfg).unwrap();
    assert_eq!(losses(&a.report), losses(&b.report));
    assert_eq!(a.params, b.params);

    let parallel = TrainConfig {
        p_inter: 3,
        workers: 2,
        background_refill: true,
        ..cfg
    };
    let c = train(&g, &parallel).unwrap();
    let d = train(&g, &parallel).unwrap();
    assert_eq!(losses(&c.report), losses(&d.report));
    let foreground = train(
        &g,
        &TrainConfig {
            background_refill: false,
            ..parallel
        },
    )
    .unwrap();
    assert_eq!(losses(&c.report), losses(&foreground.report));
}

#[test]
fn losses_stay_finite_for_every_architecture() {
    for (arch, multilabel) in [
        (Arch::Sage, false),
        (Arch::Gcn, false),
        (Arch::Mixhop, false),
        (Arch::Gat, false),
        (Arch::Sage, true),
        (Arch::Gat, true),
    ] {
        let g = small(multilabel);
        let out = train(&g, &config(arch, 50)).unwrap();
        let l = losses(&out.report);
        assert!(l.len() >= 200, "{arch:?}: {} iterations", l.len());
        assert!(l.iter().all(|v| v.is_finite()), "{arch:?} multilabel={multilabel}");
    }
}

#[test]
fn timings_add_up() {
    let g = common::planted(4);
    let out = train(&g, &config(Arch::Gcn, 3)).unwrap();
    for e in &out.report.epochs {
        let t = &e.timings;
        assert!((t.parts_sum() - t.total_ms).abs() <= 0.1 * t.total_ms, "{t:?}");
        assert!(t.total_ms <= e.wall_ms + 1e-6);
        assert!(t.sample_ms >= 0.0 && t.aggregate_ms >= 0.0 && t.transform_ms >= 0.0 && t.other_ms >= 0.0);
    }
}

#[test]
fn norm_coeffs_keep_shapes_and_stability() {
    let g = small(false);
    let off = train(&g, &config(Arch::Sage, 5)).unwrap();
    let on = train(
        &g,
        &TrainConfig {
            use_norm_coeffs: true,
            norm_estimation_subgraphs: 20,
            ..config(Arch::Sage, 5)
        },
    )
    .unwrap();
    let shapes = |p: &sgnn::model::Params| -> Vec<(String, (usize, usize))> {
        p.named_tensors().into_iter().map(|(n, t)| (n, t.shape())).collect()
    };
    assert_eq!(shapes(&off.params), shapes(&on.params));
    assert!(losses(&on.report).iter().all(|v| v.is_finite()));
}

#[test]
fn convex_surrogate_descends_monotonically() {
    // Softmax regression on raw features: the loss is convex in W, so small
    // gradient steps can only decrease it.
    let g = small(false);
    let nodes: Vec<u32> = (0..g.num_nodes() as u32).collect();
    let x = feature_matrix(&g, None);
    let y = label_matrix(&g, &nodes);
    let mut r = rng(9);
    let mut w = DenseMatrix::from_fn(x.cols(), y.cols(), |_, _| 0.1 * rand::Rng::random_range(&mut r, -1.0..1.0));
    let softmax = |w: &DenseMatrix| {
        let z = sgnn::kernels::gemm(&x, w).unwrap();
        let mut p = z.clone();
        for i in 0..z.rows() {
            let m = (0..z.cols()).map(|j| z[(i, j)]).fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = (0..z.cols()).map(|j| (z[(i, j)] - m).exp()).sum();
            for j in 0..z.cols() {
                p[(i, j)] = (z[(i, j)] - m).exp() / s;
            }
        }
        p
    };
    let mut last = f64::INFINITY;
    for step in 0..20 {
        let p = softmax(&w);
        let loss = loss_ce(&p, &y, None, false).unwrap();
        assert!(loss < last, "step {step}: {loss} after {last}");
        last = loss;
        let mut grad = gemm_tn(&x, &loss_grad(&p, &y, None, false).unwrap()).unwrap();
        grad.scale(-0.05);
        w.add_assign(&grad).unwrap();
    }
}
