mod common;

use proptest::prelude::*;
use rand::Rng;
use sgnn::kernels::{chain_costs, chain_order, plan_partitions, ChainPattern, DenseMatrix, KernelCtx, SpMat};
use sgnn::seed::rng;

proptest! {
    #[test]
    fn plans_respect_the_cache(n in 1usize..20_000, f in 1usize..2048, p in 1usize..128, cache in 1usize..(1 << 24)) {
        let plan = plan_partitions(n, f, p, cache);
        let by_cache = (8 * n * f).div_ceil(cache);
        prop_assert!(plan.q_f >= p.max(by_cache).min(f));
        prop_assert_eq!(plan.boundaries.first(), Some(&0));
        prop_assert_eq!(plan.boundaries.last(), Some(&f));
        prop_assert!(plan.boundaries.windows(2).all(|w| w[0] < w[1]));
        if by_cache <= f {
            prop_assert!((8 * n * f) as f64 / plan.q_f as f64 <= cache as f64);
        }
        if plan.q_f * (cache / (8 * n)) >= f {
            prop_assert!(8 * n * plan.max_block_width() <= cache);
        }
    }

    #[test]
    fn chain_order_depends_on_density_times_n(
        n in 1usize..5000,
        density in 0.0f64..1.0,
        f1 in 1usize..1024,
        f2 in 1usize..1024,
    ) {
        for pattern in [ChainPattern::AW1W2, ChainPattern::W1tAW3] {
            let (a, b) = chain_costs(n, density, f1, f2, pattern);
            let order = chain_order(n, density, f1, f2, pattern);
            prop_assert_eq!(order, chain_order(2 * n, density / 2.0, f1, f2, pattern));
            let (a2, b2) = (2.0 * a, 2.0 * b);
            prop_assert_eq!(a < b, a2 < b2);
        }
    }
}

#[test]
fn chain_orders_agree_numerically() {
    let ctx = KernelCtx::new(2, 4096);
    let mut r = rng(21);
    for _ in 0..20 {
        let n = r.random_range(2..80);
        let g = common::random_graph(&mut r, n, 3 * n);
        let data: Vec<f64> = (0..g.num_edges()).map(|_| r.random_range(-1.0..1.0)).collect();
        let a = SpMat::new(g.csr(), &data).unwrap();
        let (f1, f2) = (r.random_range(1..40), r.random_range(1..40));
        let w1 = DenseMatrix::from_fn(n, f1, |_, _| r.random_range(-1.0..1.0));
        let w2 = DenseMatrix::from_fn(f1, f2, |_, _| r.random_range(-1.0..1.0));
        let left = ctx.gemm(&ctx.spmm(a, &w1).unwrap(), &w2).unwrap();
        let right = ctx.spmm(a, &ctx.gemm(&w1, &w2).unwrap()).unwrap();
        let scale = left.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(left.max_abs_diff(&right) <= 1e-8 * scale);
    }
}

