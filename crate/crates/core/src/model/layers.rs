use std::borrow::Cow;

use super::{AdjView, LayerParams};
use crate::graph::transpose_csr_data;
use crate::kernels::{chain_order, ChainOrder, ChainPattern, DenseMatrix, KernelCtx, SpMat};
use crate::{Error, Result};

/// Negative-side slope of the attention LeakyReLU.
pub const GAT_SLOPE: f64 = 0.2;

/// What a layer keeps from its forward pass for the backward pass.
#[derive(Clone, Debug, PartialEq)]
pub enum LayerCache {
    Sage {
        x: DenseMatrix,
        /// `A x`, present when the forward chain computed it.
        ax: Option<DenseMatrix>,
        z: DenseMatrix,
    },
    Gcn {
        x: DenseMatrix,
        ax: Option<DenseMatrix>,
        z: DenseMatrix,
    },
    Mixhop {
        /// `A^k x` for `k = 0..=K`.
        powers: Vec<DenseMatrix>,
        z: DenseMatrix,
    },
    Gat {
        x: DenseMatrix,
        h: DenseMatrix,
        /// Raw attention scores per CSR entry.
        e: Vec<f64>,
        att: Vec<f64>,
        z: DenseMatrix,
    },
}

impl LayerCache {
    pub fn input(&self) -> &DenseMatrix {
        match self {
            LayerCache::Sage { x, .. } | LayerCache::Gcn { x, .. } | LayerCache::Gat { x, .. } => x,
            LayerCache::Mixhop { powers, .. } => &powers[0],
        }
    }

    pub fn pre_activation(&self) -> &DenseMatrix {
        match self {
            LayerCache::Sage { z, .. }
            | LayerCache::Gcn { z, .. }
            | LayerCache::Mixhop { z, .. }
            | LayerCache::Gat { z, .. } => z,
        }
    }

    /// Attention scores when the layer is a GAT layer.
    pub fn scores(&self) -> Option<&[f64]> {
        match self {
            LayerCache::Gat { e, .. } => Some(e),
            _ => None,
        }
    }
}

pub(crate) fn relu(z: &DenseMatrix) -> DenseMatrix {
    z.map(|v| if v > 0.0 { v } else { 0.0 })
}

/// Zeroes `g` wherever the cached pre-activation is not positive.
pub(crate) fn relu_gate(g: &DenseMatrix, z: &DenseMatrix) -> Result<DenseMatrix> {
    g.zip_map(z, |g, z| if z > 0.0 { g } else { 0.0 })
}

fn leaky(e: f64) -> f64 {
    if e > 0.0 {
        e
    } else {
        GAT_SLOPE * e
    }
}

fn leaky_grad(e: f64) -> f64 {
    if e > 0.0 {
        1.0
    } else {
        GAT_SLOPE
    }
}

fn check_rows(adj: &AdjView<'_>, x: &DenseMatrix) -> Result<()> {
    if adj.n() != x.rows() {
        return Err(Error::shape(format!(
            "adjacency has {} rows, input has {}",
            adj.n(),
            x.rows()
        )));
    }
    Ok(())
}

/// `A x w` in the cheaper order. Also returns `A x` when it was formed.
fn propagate(ctx: &KernelCtx, adj: &AdjView<'_>, x: &DenseMatrix, w: &DenseMatrix) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
    if x.cols() != w.rows() {
        return Err(Error::shape(format!("input has {} columns, weight has {} rows", x.cols(), w.rows())));
    }
    match chain_order(adj.n(), adj.density(), x.cols(), w.cols(), ChainPattern::AW1W2) {
        ChainOrder::SparseFirst => {
            let ax = ctx.spmm(adj.forward(), x)?;
            Ok((ctx.gemm(&ax, w)?, Some(ax)))
        }
        ChainOrder::DenseFirst => {
            let xw = ctx.gemm(x, w)?;
            Ok((ctx.spmm(adj.forward(), &xw)?, None))
        }
    }
}

/// Gradients of `A x w` given the upstream gradient `g`: returns `(dw, dx)`.
fn propagate_backward(
    ctx: &KernelCtx,
    adj: &AdjView<'_>,
    x: &DenseMatrix,
    ax: Option<&DenseMatrix>,
    w: &DenseMatrix,
    g: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    match chain_order(adj.n(), adj.density(), g.cols(), x.cols(), ChainPattern::W1tAW3) {
        ChainOrder::SparseFirst => {
            let t = ctx.spmm(adj.transposed(), g)?;
            Ok((ctx.gemm_tn(x, &t)?, ctx.gemm_nt(&t, w)?))
        }
        ChainOrder::DenseFirst => {
            let ax = match ax {
                Some(a) => Cow::Borrowed(a),
                None => Cow::Owned(ctx.spmm(adj.forward(), x)?),
            };
            let dw = ctx.gemm_tn(&ax, g)?;
            let dx = ctx.spmm(adj.transposed(), &ctx.gemm_nt(g, w)?)?;
            Ok((dw, dx))
        }
    }
}

/// `y = ReLU(x W_s || A x W_n)`.
pub fn forward_sage(
    ctx: &KernelCtx,
    adj: &AdjView<'_>,
    x: &DenseMatrix,
    w_self: &DenseMatrix,
    w_neigh: &DenseMatrix,
) -> Result<(DenseMatrix, LayerCache)> {
    check_rows(adj, x)?;
    let s = ctx.gemm(x, w_self)?;
    let (nb, ax) = propagate(ctx, adj, x, w_neigh)?;
    let z = DenseMatrix::hcat(&[&s, &nb])?;
    Ok((relu(&z), LayerCache::Sage { x: x.clone(), ax, z }))
}

/// `y = ReLU(A x W)`.
pub fn forward_gcn(ctx: &KernelCtx, adj: &AdjView<'_>, x: &DenseMatrix, w: &DenseMatrix) -> Result<(DenseMatrix, LayerCache)> {
    check_rows(adj, x)?;
    let (z, ax) = propagate(ctx, adj, x, w)?;
    Ok((relu(&z), LayerCache::Gcn { x: x.clone(), ax, z }))
}

/// `y = ReLU(x W_0 || A x W_1 || ... || A^K x W_K)`.
pub fn forward_mixhop(ctx: &KernelCtx, adj: &AdjView<'_>, x: &DenseMatrix, w: &[DenseMatrix]) -> Result<(DenseMatrix, LayerCache)> {
    check_rows(adj, x)?;
    if w.is_empty() {
        return Err(Error::shape("mixhop layer needs at least one weight"));
    }
    let mut powers = vec![x.clone()];
    for _ in 1..w.len() {
        let next = ctx.spmm(adj.forward(), powers.last().expect("non-empty"))?;
        powers.push(next);
    }
    let parts = powers
        .iter()
        .zip(w)
        .map(|(p, wk)| ctx.gemm(p, wk))
        .collect::<Result<Vec<_>>>()?;
    let z = DenseMatrix::hcat(&parts.iter().collect::<Vec<_>>())?;
    Ok((relu(&z), LayerCache::Mixhop { powers, z }))
}

/// Single-head attention without neighbor softmax:
/// `e_uv = a_l . h_u + a_r . h_v`, `A_uv = LeakyReLU(e_uv)` over the
/// structural entries of `adj`, `y = ReLU(A x W)`.
pub fn forward_gat(
    ctx: &KernelCtx,
    adj: &AdjView<'_>,
    x: &DenseMatrix,
    w: &DenseMatrix,
    a: &DenseMatrix,
) -> Result<(DenseMatrix, LayerCache)> {
    check_rows(adj, x)?;
    let f = w.cols();
    if a.shape() != (2 * f, 1) {
        return Err(Error::shape(format!("attention vector is {:?}, expected ({}, 1)", a.shape(), 2 * f)));
    }
    let h = ctx.gemm(x, w)?;
    let (s, t) = scores(&h, a.as_slice());
    let csr = adj.csr;
    let mut e = vec![0.0; csr.nnz()];
    for u in 0..csr.num_rows() {
        for k in csr.row_range(u) {
            e[k] = s[u] + t[csr.indices[k] as usize];
        }
    }
    let att: Vec<f64> = e.iter().map(|&v| leaky(v)).collect();
    let z = ctx.spmm(SpMat { csr, data: &att }, &h)?;
    Ok((
        relu(&z),
        LayerCache::Gat {
            x: x.clone(),
            h,
            e,
            att,
            z,
        },
    ))
}

/// `(h a_l, h a_r)` as per-node vectors.
fn scores(h: &DenseMatrix, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let f = h.cols();
    let mut s = vec![0.0; h.rows()];
    let mut t = vec![0.0; h.rows()];
    for c in 0..f {
        let col = h.col(c);
        for u in 0..h.rows() {
            s[u] += col[u] * a[c];
            t[u] += col[u] * a[f + c];
        }
    }
    (s, t)
}

pub fn forward_layer(ctx: &KernelCtx, adj: &AdjView<'_>, x: &DenseMatrix, p: &LayerParams) -> Result<(DenseMatrix, LayerCache)> {
    match p {
        LayerParams::Sage { w_self, w_neigh } => forward_sage(ctx, adj, x, w_self, w_neigh),
        LayerParams::Gcn { w } => forward_gcn(ctx, adj, x, w),
        LayerParams::Mixhop { w } => forward_mixhop(ctx, adj, x, w),
        LayerParams::Gat { w, a } => forward_gat(ctx, adj, x, w, a),
    }
}

/// Backward through one layer given `dy`, the gradient w.r.t. its output.
/// Returns the parameter gradients and, if `need_dx`, the input gradient.
pub fn backward_layer(
    ctx: &KernelCtx,
    adj: &AdjView<'_>,
    p: &LayerParams,
    cache: &LayerCache,
    dy: &DenseMatrix,
    need_dx: bool,
) -> Result<(LayerParams, Option<DenseMatrix>)> {
    let dz = relu_gate(dy, cache.pre_activation())?;
    match (p, cache) {
        (LayerParams::Sage { w_self, w_neigh }, LayerCache::Sage { x, ax, .. }) => {
            let h = w_self.cols();
            let gs = dz.col_range(0, h);
            let gn = dz.col_range(h, 2 * h);
            let dw_self = ctx.gemm_tn(x, &gs)?;
            let (dw_neigh, mut dx) = propagate_backward(ctx, adj, x, ax.as_ref(), w_neigh, &gn)?;
            dx.add_assign(&ctx.gemm_nt(&gs, w_self)?)?;
            Ok((LayerParams::Sage { w_self: dw_self, w_neigh: dw_neigh }, need_dx.then_some(dx)))
        }
        (LayerParams::Gcn { w }, LayerCache::Gcn { x, ax, .. }) => {
            let (dw, dx) = propagate_backward(ctx, adj, x, ax.as_ref(), w, &dz)?;
            Ok((LayerParams::Gcn { w: dw }, need_dx.then_some(dx)))
        }
        (LayerParams::Mixhop { w }, LayerCache::Mixhop { powers, .. }) => {
            let h = w[0].cols();
            let g: Vec<DenseMatrix> = (0..w.len()).map(|k| dz.col_range(k * h, (k + 1) * h)).collect();
            let dw = powers
                .iter()
                .zip(&g)
                .map(|(p, gk)| ctx.gemm_tn(p, gk))
                .collect::<Result<Vec<_>>>()?;
            let dx = if need_dx {
                // Horner: dx = sum_k (A^T)^k g_k W_k^T
                let last = w.len() - 1;
                let mut acc = ctx.gemm_nt(&g[last], &w[last])?;
                for k in (0..last).rev() {
                    acc = ctx.spmm(adj.transposed(), &acc)?;
                    acc.add_assign(&ctx.gemm_nt(&g[k], &w[k])?)?;
                }
                Some(acc)
            } else {
                None
            };
            Ok((LayerParams::Mixhop { w: dw }, dx))
        }
        (LayerParams::Gat { w, a }, LayerCache::Gat { x, h, e, att, .. }) => {
            let csr = adj.csr;
            let f = w.cols();
            let att_t = transpose_csr_data(csr, att)?;
            let mut dh = ctx.spmm(SpMat { csr, data: &att_t }, &dz)?;
            // dL/dA_uv = dz_u . h_v
            let mut d_att = vec![0.0; csr.nnz()];
            for c in 0..f {
                let (gc, hc) = (dz.col(c), h.col(c));
                for u in 0..csr.num_rows() {
                    let gu = gc[u];
                    if gu == 0.0 {
                        continue;
                    }
                    for k in csr.row_range(u) {
                        d_att[k] += gu * hc[csr.indices[k] as usize];
                    }
                }
            }
            let n = csr.num_rows();
            let mut ds = vec![0.0; n];
            let mut dt = vec![0.0; n];
            for u in 0..n {
                for k in csr.row_range(u) {
                    let de = d_att[k] * leaky_grad(e[k]);
                    ds[u] += de;
                    dt[csr.indices[k] as usize] += de;
                }
            }
            let av = a.as_slice();
            let mut da = DenseMatrix::zeros(2 * f, 1);
            for c in 0..f {
                let hc = h.col(c);
                da[(c, 0)] = hc.iter().zip(&ds).map(|(x, y)| x * y).sum();
                da[(f + c, 0)] = hc.iter().zip(&dt).map(|(x, y)| x * y).sum();
                let col = dh.col_mut(c);
                for u in 0..n {
                    col[u] += ds[u] * av[c] + dt[u] * av[f + c];
                }
            }
            let dw = ctx.gemm_tn(x, &dh)?;
            let dx = if need_dx { Some(ctx.gemm_nt(&dh, w)?) } else { None };
            Ok((LayerParams::Gat { w: dw, a: da }, dx))
        }
        _ => Err(Error::shape(format!("cache does not belong to a {} layer", p.arch()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, NormMode};
    use crate::kernels::gemm_naive;
    use crate::model::FullAdj;
    use crate::seed;
    use rand::Rng;

    fn random_graph(n: usize, p: f64, s: u64) -> Graph {
        let mut rng = seed::rng(s);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_undirected_edges(n, &edges).unwrap()
    }

    fn random_matrix(r: usize, c: usize, s: u64) -> DenseMatrix {
        let mut rng = seed::rng(s);
        DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn naive_relu(m: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].max(0.0))
    }

    fn rel_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        let scale = b.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(a.max_abs_diff(b) <= tol * scale, "diff {}", a.max_abs_diff(b));
    }

    fn identity_adj(n: usize) -> (crate::graph::Csr, Vec<f64>) {
        let csr = crate::graph::Csr {
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
        };
        (csr, vec![1.0; n])
    }

    #[test]
    fn sage_identity_weights_duplicate_input() {
        let (csr, data) = identity_adj(1);
        let adj = AdjView::new(&csr, &data, &data).unwrap();
        let x = DenseMatrix::from_rows(&[vec![0.5, 2.0]]);
        let i = DenseMatrix::identity(2);
        let (y, _) = forward_sage(&KernelCtx::default(), &adj, &x, &i, &i).unwrap();
        assert_eq!(y, DenseMatrix::from_rows(&[vec![0.5, 2.0, 0.5, 2.0]]));
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let g = random_graph(10, 0.3, 1);
        let ctx = KernelCtx::default();
        let x = DenseMatrix::zeros(10, 3);
        let w = random_matrix(3, 2, 2);
        let row = FullAdj::new(&g, NormMode::Row).unwrap();
        let sym = FullAdj::new(&g, NormMode::Sym).unwrap();
        let (y, _) = forward_sage(&ctx, &row.view(), &x, &w, &w).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
        let (y, _) = forward_gcn(&ctx, &sym.view(), &x, &w).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sage_matches_dense_oracle() {
        let g = random_graph(50, 0.1, 3);
        let adj = FullAdj::new(&g, NormMode::Row).unwrap();
        let a = adj.view().forward().to_dense();
        let x = random_matrix(50, 7, 4);
        let (ws, wn) = (random_matrix(7, 5, 5), random_matrix(7, 5, 6));
        let (y, _) = forward_sage(&KernelCtx::default(), &adj.view(), &x, &ws, &wn).unwrap();
        let own = gemm_naive(&x, &ws).unwrap();
        let nb = gemm_naive(&gemm_naive(&a, &x).unwrap(), &wn).unwrap();
        let expected = naive_relu(&DenseMatrix::from_fn(50, 10, |i, j| if j < 5 { own[(i, j)] } else { nb[(i, j - 5)] }));
        rel_close(&y, &expected, 1e-10);
    }

    #[test]
    fn gcn_identity_pipeline_and_oracle() {
        let (csr, data) = identity_adj(4);
        let adj = AdjView::new(&csr, &data, &data).unwrap();
        let x = random_matrix(4, 3, 7).map(f64::abs);
        let (y, _) = forward_gcn(&KernelCtx::default(), &adj, &x, &DenseMatrix::identity(3)).unwrap();
        assert_eq!(y, x);

        let g = random_graph(40, 0.15, 8);
        let full = FullAdj::new(&g, NormMode::Sym).unwrap();
        let a = full.view().forward().to_dense();
        let x = random_matrix(40, 6, 9);
        for cols in [2, 12] {
            let w = random_matrix(6, cols, 10);
            let (y, _) = forward_gcn(&KernelCtx::default(), &full.view(), &x, &w).unwrap();
            let expected = naive_relu(&gemm_naive(&gemm_naive(&a, &x).unwrap(), &w).unwrap());
            rel_close(&y, &expected, 1e-10);
        }
    }

    #[test]
    fn mixhop_special_cases_and_powers() {
        let ctx = KernelCtx::default();
        let g = random_graph(30, 0.2, 11);
        let full = FullAdj::new(&g, NormMode::Sym).unwrap();
        let x = random_matrix(30, 4, 12);
        let w0 = random_matrix(4, 3, 13);
        let (y, _) = forward_mixhop(&ctx, &full.view(), &x, std::slice::from_ref(&w0)).unwrap();
        rel_close(&y, &naive_relu(&gemm_naive(&x, &w0).unwrap()), 1e-12);

        let (csr, data) = identity_adj(5);
        let id = AdjView::new(&csr, &data, &data).unwrap();
        let xp = random_matrix(5, 3, 14).map(f64::abs);
        let (y, _) = forward_mixhop(&ctx, &id, &xp, &[DenseMatrix::zeros(3, 3), DenseMatrix::identity(3)]).unwrap();
        assert_eq!(y.col_range(3, 6), xp);

        let ws = [random_matrix(4, 2, 15), random_matrix(4, 2, 16), random_matrix(4, 2, 17)];
        let (y, _) = forward_mixhop(&ctx, &full.view(), &x, &ws).unwrap();
        let a = full.view().forward().to_dense();
        let a2 = gemm_naive(&a, &a).unwrap();
        let powers = [DenseMatrix::identity(30), a, a2];
        let parts: Vec<DenseMatrix> = powers
            .iter()
            .zip(&ws)
            .map(|(p, w)| gemm_naive(&gemm_naive(p, &x).unwrap(), w).unwrap())
            .collect();
        let expected = naive_relu(&DenseMatrix::hcat(&parts.iter().collect::<Vec<_>>()).unwrap());
        rel_close(&y, &expected, 1e-9);
    }

    #[test]
    fn gat_zero_attention_vector_gives_zero() {
        let g = random_graph(12, 0.3, 18);
        let full = FullAdj::new(&g, NormMode::Sym).unwrap();
        let x = random_matrix(12, 3, 19);
        let (y, _) = forward_gat(&KernelCtx::default(), &full.view(), &x, &random_matrix(3, 4, 20), &DenseMatrix::zeros(8, 1)).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gat_single_node_closed_form() {
        let (csr, data) = identity_adj(1);
        let adj = AdjView::new(&csr, &data, &data).unwrap();
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0]]);
        let a = DenseMatrix::from_rows(&[vec![0.5], vec![0.25], vec![1.0], vec![-0.5]]);
        // a . (x || x) = 0.5 + 0.5 + 1.0 - 1.0 = 1.0
        let (y, _) = forward_gat(&KernelCtx::default(), &adj, &x, &DenseMatrix::identity(2), &a).unwrap();
        assert_eq!(y, DenseMatrix::from_rows(&[vec![1.0, 2.0]]));
    }

    #[test]
    fn gat_matches_dense_oracle() {
        let g = random_graph(30, 0.2, 21);
        let full = FullAdj::new(&g, NormMode::Sym).unwrap();
        let x = random_matrix(30, 5, 22);
        let w = random_matrix(5, 4, 23);
        let a = random_matrix(8, 1, 24);
        let (y, _) = forward_gat(&KernelCtx::default(), &full.view(), &x, &w, &a).unwrap();
        let h = gemm_naive(&x, &w).unwrap();
        let mask = full.view().forward().to_dense();
        let att = DenseMatrix::from_fn(30, 30, |u, v| {
            if mask[(u, v)] == 0.0 {
                return 0.0;
            }
            let e: f64 = (0..4).map(|c| a[(c, 0)] * h[(u, c)] + a[(4 + c, 0)] * h[(v, c)]).sum();
            if e > 0.0 {
                e
            } else {
                0.2 * e
            }
        });
        rel_close(&y, &naive_relu(&gemm_naive(&att, &h).unwrap()), 1e-9);
    }

    #[test]
    fn gradient_is_zero_where_preactivation_is_not_positive() {
        let g = random_graph(20, 0.2, 25);
        let full = FullAdj::new(&g, NormMode::Sym).unwrap();
        let ctx = KernelCtx::default();
        // negative inputs and positive weights force every pre-activation below zero
        let x = random_matrix(20, 3, 26).map(|v| -v.abs() - 0.1);
        let p = LayerParams::Gcn {
            w: random_matrix(3, 2, 27).map(|v| v.abs() + 0.1),
        };
        let (_, cache) = forward_layer(&ctx, &full.view(), &x, &p).unwrap();
        let dy = DenseMatrix::from_fn(20, 2, |_, _| 1.0);
        let (grads, dx) = backward_layer(&ctx, &full.view(), &p, &cache, &dy, true).unwrap();
        let LayerParams::Gcn { w } = grads else { unreachable!() };
        assert!(w.as_slice().iter().all(|&v| v == 0.0));
        assert!(dx.unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sage_all_positive_l1_closed_form() {
        // with every pre-activation positive, dW_s = x^T G_s and dW_n = (A x)^T G_n
        let g = random_graph(8, 0.4, 28);
        let full = FullAdj::new(&g, NormMode::Row).unwrap();
        let ctx = KernelCtx::default();
        let x = random_matrix(8, 2, 29).map(|v| v.abs() + 0.1);
        let ws = random_matrix(2, 2, 30).map(|v| v.abs() + 0.1);
        let wn = random_matrix(2, 2, 31).map(|v| v.abs() + 0.1);
        let p = LayerParams::Sage { w_self: ws.clone(), w_neigh: wn.clone() };
        let (_, cache) = forward_layer(&ctx, &full.view(), &x, &p).unwrap();
        let dy = random_matrix(8, 4, 32);
        let (grads, dx) = backward_layer(&ctx, &full.view(), &p, &cache, &dy, true).unwrap();
        let a = full.view().forward().to_dense();
        let ax = gemm_naive(&a, &x).unwrap();
        let (gs, gn) = (dy.col_range(0, 2), dy.col_range(2, 4));
        let LayerParams::Sage { w_self, w_neigh } = grads else { unreachable!() };
        rel_close(&w_self, &gemm_naive(&x.transpose(), &gs).unwrap(), 1e-12);
        // isolated nodes have a zero neighbor path and a zero gate there
        let gn_gated = DenseMatrix::from_fn(8, 2, |i, j| if cache.pre_activation()[(i, j + 2)] > 0.0 { gn[(i, j)] } else { 0.0 });
        rel_close(&w_neigh, &gemm_naive(&ax.transpose(), &gn_gated).unwrap(), 1e-12);
        let mut expected_dx = gemm_naive(&gs, &ws.transpose()).unwrap();
        expected_dx
            .add_assign(&gemm_naive(&gemm_naive(&a.transpose(), &gn_gated).unwrap(), &wn.transpose()).unwrap())
            .unwrap();
        rel_close(&dx.unwrap(), &expected_dx, 1e-12);
    }
}
