use rand::Rng;

use crate::graph::Graph;
use crate::{Error, Result};

/// `r` uniform roots, each followed by an `h`-step uniform random walk.
/// A walk that reaches a node without neighbors stops there.
pub fn rw_sample<R: Rng + ?Sized>(g: &Graph, r: usize, h: usize, rng: &mut R) -> Result<Vec<u32>> {
    let nv = g.num_nodes();
    if nv == 0 || r == 0 {
        return Err(Error::Sampler(format!("need r >= 1 roots on a non-empty graph, got r={r}")));
    }
    let mut nodes = Vec::with_capacity(r * (h + 1));
    for _ in 0..r {
        let mut cur = rng.random_range(0..nv) as u32;
        nodes.push(cur);
        for _ in 0..h {
            let nbrs = g.neighbors(cur as usize);
            if nbrs.is_empty() {
                break;
            }
            cur = nbrs[rng.random_range(0..nbrs.len())];
            nodes.push(cur);
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}
