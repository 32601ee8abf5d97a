use log::warn;
use rand::seq::index;
use rand::Rng;

/// Drops uniformly chosen nodes so the count becomes a multiple of
/// `multiple`. Keeps `min(multiple, len)` nodes if flooring would empty the
/// set. Input order is preserved among the survivors.
pub fn clip_nodes<R: Rng + ?Sized>(nodes: &[u32], multiple: usize, rng: &mut R) -> Vec<u32> {
    let multiple = multiple.max(1);
    let len = nodes.len();
    let mut keep = len / multiple * multiple;
    if keep == len {
        return nodes.to_vec();
    }
    if keep == 0 {
        keep = multiple.min(len);
        warn!("clipping {len} nodes to a multiple of {multiple} would leave none; keeping {keep}");
        if keep == len {
            return nodes.to_vec();
        }
    }
    let mut picked = index::sample(rng, len, keep).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| nodes[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn floors_to_multiple() {
        let nodes: Vec<u32> = (0..1003).collect();
        let out = clip_nodes(&nodes, 16, &mut seed::rng(0));
        assert_eq!(out.len(), 992);
        assert!(out.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_multiple_and_unit_are_unchanged() {
        let nodes: Vec<u32> = (0..64).collect();
        assert_eq!(clip_nodes(&nodes, 16, &mut seed::rng(0)), nodes);
        let odd: Vec<u32> = (0..37).collect();
        assert_eq!(clip_nodes(&odd, 1, &mut seed::rng(0)), odd);
    }

    #[test]
    fn tiny_sets_are_kept() {
        let nodes: Vec<u32> = (0..5).collect();
        assert_eq!(clip_nodes(&nodes, 16, &mut seed::rng(0)), nodes);
    }
}
