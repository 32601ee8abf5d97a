mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use sgnn::graph::{induce_subgraph, kronecker_generate, normalize_adjacency, transpose_csr_data, NormMode};
use sgnn::seed::rng;

fn graph_and_nodes(max_n: usize) -> impl Strategy<Value = (u64, usize, usize, Vec<bool>)> {
    (2..=max_n).prop_flat_map(|n| (any::<u64>(), Just(n), 0..=4 * n, proptest::collection::vec(any::<bool>(), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution((seed, n, m, keep) in graph_and_nodes(500)) {
        let mut r = rng(seed);
        let g = common::random_graph(&mut r, n, m);
        let adj = normalize_adjacency(&g, NormMode::Row);
        let nodes: Vec<u32> = (0..n as u32).filter(|&v| keep[v as usize]).collect();
        prop_assume!(!nodes.is_empty());
        let sub = induce_subgraph(&g, &adj, &nodes).unwrap();
        let twice = transpose_csr_data(&sub.csr, &sub.data_bwd).unwrap();
        prop_assert_eq!(twice, sub.data_fwd.clone());
    }

    #[test]
    fn induced_rows_are_sorted_exact_and_normalized((seed, n, m, keep) in graph_and_nodes(120)) {
        let mut r = rng(seed);
        let g = common::random_graph(&mut r, n, m);
        let adj = normalize_adjacency(&g, NormMode::Row);
        let nodes: Vec<u32> = (0..n as u32).filter(|&v| keep[v as usize]).collect();
        prop_assume!(!nodes.is_empty());
        let sub = induce_subgraph(&g, &adj, &nodes).unwrap();

        let inside: HashSet<u32> = nodes.iter().copied().collect();
        let mut expected = HashSet::new();
        for &u in &nodes {
            for &v in g.neighbors(u as usize) {
                if inside.contains(&v) {
                    expected.insert((u, v));
                }
            }
        }
        let mut got = HashSet::new();
        for i in 0..sub.num_nodes() {
            let row = sub.csr.row(i);
            prop_assert!(row.windows(2).all(|w| w[0] < w[1]));
            for &j in row {
                got.insert((sub.nodes[i], sub.nodes[j as usize]));
            }
            if !row.is_empty() {
                let sum: f64 = sub.data_fwd[sub.csr.row_range(i)].iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12, "row {} sums to {}", i, sum);
            }
        }
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn kronecker_graphs_are_valid_up_to_scale_18() {
    for scale in [1, 2, 5, 9, 13, 18] {
        let g = kronecker_generate(scale, 16.0, u64::from(scale)).unwrap();
        assert_eq!(g.num_nodes(), 1 << scale);
        g.csr().validate().unwrap();
    }
}
