#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use sgnn::graph::{Graph, KroneckerConfig, LabelMode};

pub fn star(leaves: u32) -> Graph {
    let edges: Vec<(u32, u32)> = (1..=leaves).map(|l| (0, l)).collect();
    Graph::from_undirected_edges(leaves as usize + 1, &edges).unwrap()
}

pub fn path(n: u32) -> Graph {
    let edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::from_undirected_edges(n as usize, &edges).unwrap()
}

/// Undirected simple graph with up to `edges` random edges.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, edges: usize) -> Graph {
    let mut set = BTreeSet::new();
    if n >= 2 {
        for _ in 0..edges {
            let u = rng.random_range(0..n as u32);
            let v = rng.random_range(0..n as u32);
            if u != v {
                set.insert((u.min(v), u.max(v)));
            }
        }
    }
    let list: Vec<(u32, u32)> = set.into_iter().collect();
    Graph::from_undirected_edges(n, &list).unwrap()
}

/// `d`-regular Cayley graph of `Z_2^bits` with `d` distinct random
/// generators: `v ~ v xor g`.
pub fn cayley_regular<R: Rng>(rng: &mut R, bits: u32, d: usize) -> Graph {
    let n = 1u32 << bits;
    let mut gens = BTreeSet::new();
    while gens.len() < d {
        gens.insert(rng.random_range(1..n));
    }
    let mut edges = Vec::with_capacity(n as usize * d / 2);
    for v in 0..n {
        for &g in &gens {
            let w = v ^ g;
            if v < w {
                edges.push((v, w));
            }
        }
    }
    Graph::from_undirected_edges(n as usize, &edges).unwrap()
}

/// Scale-10 Kronecker graph with planted labels.
pub fn planted(seed: u64) -> Graph {
    KroneckerConfig {
        scale: 10,
        labels: LabelMode::Planted,
        seed,
        ..KroneckerConfig::default()
    }
    .generate()
    .unwrap()
}
