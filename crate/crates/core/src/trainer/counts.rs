use serde::{Deserialize, Serialize};

/// How many nodes each GNN layer touches for one minibatch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CountMode {
    /// Every layer works on the same `n` sampled nodes.
    GraphSampling { layers: usize, n: usize },
    /// Upper bound for layer-wise neighbor sampling from `roots` output
    /// nodes, with `fanouts` listed from the output layer downwards.
    LayerSamplingBound { roots: usize, fanouts: Vec<usize> },
}

/// Per-layer node counts listed from the input layer to the output layer,
/// each capped at `cap` when given.
///
/// Graph sampling yields one entry per GNN layer. The layer-sampling bound
/// yields one entry per node layer, `fanouts.len() + 1` in total, where the
/// output layer holds the `roots` and layer `l` holds
/// `roots * prod(fanouts[..L-l])`.
pub fn layer_sample_counts(mode: &CountMode, cap: Option<usize>) -> Vec<usize> {
    let cap = cap.unwrap_or(usize::MAX);
    match mode {
        CountMode::GraphSampling { layers, n } => vec![(*n).min(cap); *layers],
        CountMode::LayerSamplingBound { roots, fanouts } => {
            let mut out = Vec::with_capacity(fanouts.len() + 1);
            let mut cur = *roots;
            out.push(cur.min(cap));
            for &s in fanouts {
                cur = cur.saturating_mul(s);
                out.push(cur.min(cap));
            }
            out.reverse();
            out
        }
    }
}
