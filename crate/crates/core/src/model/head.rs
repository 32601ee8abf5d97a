use super::layers::{relu, relu_gate};
use crate::kernels::{DenseMatrix, KernelCtx};
use crate::{Error, Result};

/// Probability clamp used inside the logarithms of the loss.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HeadCache {
    pub x: DenseMatrix,
    pub z: DenseMatrix,
    pub prob: DenseMatrix,
}

/// `y = softmax(ReLU(x w))` by row, or elementwise sigmoid when multilabel.
pub fn forward_head(ctx: &KernelCtx, x: &DenseMatrix, w_mlp: &DenseMatrix, multilabel: bool) -> Result<(DenseMatrix, HeadCache)> {
    let z = ctx.gemm(x, w_mlp)?;
    let logits = relu(&z);
    let prob = if multilabel {
        logits.map(|v| 1.0 / (1.0 + (-v).exp()))
    } else {
        softmax_rows(&logits)
    };
    Ok((
        prob.clone(),
        HeadCache {
            x: x.clone(),
            z,
            prob,
        },
    ))
}

fn softmax_rows(m: &DenseMatrix) -> DenseMatrix {
    let (n, c) = m.shape();
    let mut out = m.clone();
    for i in 0..n {
        let max = (0..c).map(|j| m[(i, j)]).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for j in 0..c {
            let e = (m[(i, j)] - max).exp();
            out[(i, j)] = e;
            sum += e;
        }
        for j in 0..c {
            out[(i, j)] /= sum;
        }
    }
    out
}

fn check(prob: &DenseMatrix, y_true: &DenseMatrix, weights: Option<&[f64]>) -> Result<()> {
    if prob.shape() != y_true.shape() {
        return Err(Error::shape(format!(
            "predictions {:?} vs labels {:?}",
            prob.shape(),
            y_true.shape()
        )));
    }
    if let Some(w) = weights {
        if w.len() != prob.rows() {
            return Err(Error::shape(format!("{} weights for {} nodes", w.len(), prob.rows())));
        }
    }
    Ok(())
}

fn clamp(p: f64) -> (f64, bool) {
    if p < PROB_EPS {
        (PROB_EPS, true)
    } else if p > 1.0 - PROB_EPS {
        (1.0 - PROB_EPS, true)
    } else {
        (p, false)
    }
}

fn weight_total(n: usize, weights: Option<&[f64]>) -> f64 {
    weights.map_or(n as f64, |w| w.iter().sum())
}

/// Weighted mean cross-entropy `sum_v w_v l_v / sum_v w_v`.
///
/// Single-label rows use categorical CE, multilabel rows the sum of binary
/// CE over classes. Without weights every node counts once. An all-zero
/// weight vector gives zero loss.
pub fn loss_ce(prob: &DenseMatrix, y_true: &DenseMatrix, weights: Option<&[f64]>, multilabel: bool) -> Result<f64> {
    check(prob, y_true, weights)?;
    let total = weight_total(prob.rows(), weights);
    if total == 0.0 {
        return Ok(0.0);
    }
    let (n, c) = prob.shape();
    let mut loss = 0.0;
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]);
        if w == 0.0 {
            continue;
        }
        let mut li = 0.0;
        for j in 0..c {
            let (p, _) = clamp(prob[(i, j)]);
            let y = y_true[(i, j)];
            li -= y * p.ln();
            if multilabel {
                li -= (1.0 - y) * (1.0 - p).ln();
            }
        }
        loss += w * li;
    }
    Ok(loss / total)
}

/// Gradient of [`loss_ce`] with respect to the head logits `ReLU(x w)`.
/// Clamped probabilities contribute no gradient.
pub fn loss_grad(prob: &DenseMatrix, y_true: &DenseMatrix, weights: Option<&[f64]>, multilabel: bool) -> Result<DenseMatrix> {
    check(prob, y_true, weights)?;
    let (n, c) = prob.shape();
    let mut g = DenseMatrix::zeros(n, c);
    let total = weight_total(n, weights);
    if total == 0.0 {
        return Ok(g);
    }
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]) / total;
        if w == 0.0 {
            continue;
        }
        if multilabel {
            for j in 0..c {
                let (p, clamped) = clamp(prob[(i, j)]);
                if !clamped {
                    g[(i, j)] = w * (p - y_true[(i, j)]);
                }
            }
        } else {
            // dl/dp_j = -y_j / p_j, pushed through the softmax Jacobian
            let dp: Vec<f64> = (0..c)
                .map(|j| {
                    let (p, clamped) = clamp(prob[(i, j)]);
                    if clamped {
                        0.0
                    } else {
                        -y_true[(i, j)] / p
                    }
                })
                .collect();
            let dot: f64 = (0..c).map(|j| prob[(i, j)] * dp[j]).sum();
            for j in 0..c {
                g[(i, j)] = w * prob[(i, j)] * (dp[j] - dot);
            }
        }
    }
    Ok(g)
}

/// Backward through the head: returns `(dw_mlp, dx)`.
pub(crate) fn backward_head(
    ctx: &KernelCtx,
    cache: &HeadCache,
    w_mlp: &DenseMatrix,
    d_logits: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let dz = relu_gate(d_logits, &cache.z)?;
    Ok((ctx.gemm_tn(&cache.x, &dz)?, ctx.gemm_nt(&dz, w_mlp)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn softmax_rows_sum_to_one() {
        let ctx = KernelCtx::default();
        let x = DenseMatrix::from_fn(5, 3, |i, j| (i as f64 - 2.0) * 0.7 + j as f64);
        let w = DenseMatrix::from_fn(3, 4, |i, j| ((i * 4 + j) as f64).sin());
        let (p, _) = forward_head(&ctx, &x, &w, false).unwrap();
        for i in 0..5 {
            assert_abs_diff_eq!((0..4).map(|j| p[(i, j)]).sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_input_gives_uniform_rows() {
        let ctx = KernelCtx::default();
        let (p, _) = forward_head(&ctx, &DenseMatrix::zeros(3, 2), &DenseMatrix::identity(2), false).unwrap();
        assert!(p.as_slice().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn uniform_prediction_costs_ln_c() {
        let c = 5;
        let prob = DenseMatrix::from_fn(4, c, |_, _| 1.0 / c as f64);
        let y = DenseMatrix::from_fn(4, c, |i, j| f64::from(u8::from(i % c == j)));
        assert_abs_diff_eq!(loss_ce(&prob, &y, None, false).unwrap(), (c as f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn perfect_prediction_is_near_zero_with_zero_gradient() {
        let y = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(loss_ce(&y, &y, None, false).unwrap() <= -(1.0 - PROB_EPS).ln() + 1e-15);
        assert!(loss_grad(&y, &y, None, false).unwrap().as_slice().iter().all(|&g| g == 0.0));
        assert!(loss_grad(&y, &y, None, true).unwrap().as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn weighted_mean_matches_naive_sum() {
        let prob = DenseMatrix::from_rows(&[vec![0.2, 0.8], vec![0.6, 0.4], vec![0.5, 0.5]]);
        let y = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        let w = [2.0, 0.0, 1.0];
        let expected = (2.0 * -(0.8f64).ln() + -(0.5f64).ln()) / 3.0;
        assert_abs_diff_eq!(loss_ce(&prob, &y, Some(&w), false).unwrap(), expected, epsilon = 1e-12);
        let expected_bce = (2.0 * -((0.8f64).ln() + (0.8f64).ln()) - 2.0 * (0.5f64).ln()) / 3.0;
        assert_abs_diff_eq!(loss_ce(&prob, &y, Some(&w), true).unwrap(), expected_bce, epsilon = 1e-12);
    }
}
