use super::head::{backward_head, forward_head, loss_grad, HeadCache};
use super::layers::{backward_layer, forward_layer, LayerCache};
use super::{AdjView, Params};
use crate::kernels::{DenseMatrix, KernelCtx};
use crate::{Error, Result};

/// Caches of a full forward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardPass {
    pub layers: Vec<LayerCache>,
    pub head: HeadCache,
    pub multilabel: bool,
}

impl ForwardPass {
    pub fn prob(&self) -> &DenseMatrix {
        &self.head.prob
    }

    /// Output of the last GNN layer.
    pub fn embedding(&self) -> &DenseMatrix {
        &self.head.x
    }

    /// Which side of every nonlinearity's kink each value sits on. Two
    /// passes with equal signatures lie in the same smooth piece.
    pub fn signature(&self) -> Vec<bool> {
        let mut sig = Vec::new();
        for c in &self.layers {
            sig.extend(c.pre_activation().as_slice().iter().map(|&v| v > 0.0));
            if let Some(e) = c.scores() {
                sig.extend(e.iter().map(|&v| v > 0.0));
            }
        }
        sig.extend(self.head.z.as_slice().iter().map(|&v| v > 0.0));
        sig.extend(
            self.head
                .prob
                .as_slice()
                .iter()
                .map(|&p| !(super::PROB_EPS..=1.0 - super::PROB_EPS).contains(&p)),
        );
        sig
    }
}

pub fn forward(ctx: &KernelCtx, adj: &AdjView<'_>, x: &DenseMatrix, params: &Params, multilabel: bool) -> Result<ForwardPass> {
    let mut layers = Vec::with_capacity(params.layers.len());
    let mut cur = x.clone();
    for lp in &params.layers {
        let (y, cache) = forward_layer(ctx, adj, &cur, lp)?;
        layers.push(cache);
        cur = y;
    }
    let (_, head) = forward_head(ctx, &cur, &params.w_mlp, multilabel)?;
    Ok(ForwardPass {
        layers,
        head,
        multilabel,
    })
}

/// Gradients of the weighted cross-entropy for every parameter.
pub fn backward(
    ctx: &KernelCtx,
    adj: &AdjView<'_>,
    params: &Params,
    fp: &ForwardPass,
    y_true: &DenseMatrix,
    weights: Option<&[f64]>,
) -> Result<Params> {
    if fp.layers.len() != params.layers.len() {
        return Err(Error::shape(format!(
            "{} cached layers for {} parameter layers",
            fp.layers.len(),
            params.layers.len()
        )));
    }
    let d_logits = loss_grad(fp.prob(), y_true, weights, fp.multilabel)?;
    let (w_mlp, mut dy) = backward_head(ctx, &fp.head, &params.w_mlp, &d_logits)?;
    let mut layers = Vec::with_capacity(params.layers.len());
    for (l, (lp, cache)) in params.layers.iter().zip(&fp.layers).enumerate().rev() {
        let (grads, dx) = backward_layer(ctx, adj, lp, cache, &dy, l > 0)?;
        layers.push(grads);
        if let Some(dx) = dx {
            dy = dx;
        }
    }
    layers.reverse();
    Ok(Params { layers, w_mlp })
}
