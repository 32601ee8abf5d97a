use std::sync::Barrier;

use super::DenseMatrix;
use crate::graph::Csr;
use crate::{Error, Result};

/// Borrowed square sparse matrix: shared structure plus one value array.
#[derive(Clone, Copy, Debug)]
pub struct SpMat<'a> {
    pub csr: &'a Csr,
    pub data: &'a [f64],
}

impl<'a> SpMat<'a> {
    pub fn new(csr: &'a Csr, data: &'a [f64]) -> Result<Self> {
        if data.len() != csr.nnz() {
            return Err(Error::shape(format!(
                "{} values for {} sparse entries",
                data.len(),
                csr.nnz()
            )));
        }
        Ok(SpMat { csr, data })
    }

    pub fn n(&self) -> usize {
        self.csr.num_rows()
    }

    /// Fraction of non-zero entries, `nnz / n^2`.
    pub fn density(&self) -> f64 {
        let n = self.n().max(1) as f64;
        self.csr.nnz() as f64 / (n * n)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for v in 0..n {
            for e in self.csr.row_range(v) {
                m[(v, self.csr.indices[e] as usize)] = self.data[e];
            }
        }
        m
    }
}

/// Feature-dimension partitioning of an `n x f` operand.
///
/// Rows are never split (`q_v = 1`, so `gamma_v = 1`); the `f` columns are
/// cut into `q_f` contiguous blocks whose widths differ by at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionPlan {
    pub q_v: usize,
    pub q_f: usize,
    pub boundaries: Vec<usize>,
    pub cache_bytes: usize,
    pub workers: usize,
    pub gamma_v: f64,
}

impl PartitionPlan {
    pub fn block(&self, i: usize) -> (usize, usize) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    pub fn max_block_width(&self) -> usize {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Partitions processed together in each round when `workers` threads
    /// take strided ownership: worker `j` owns `[j*s, (j+1)*s)` with
    /// `s = ceil(q_f / workers)` and handles its `r`-th partition in round `r`.
    pub fn rounds(&self, workers: usize) -> Vec<Vec<usize>> {
        let workers = workers.clamp(1, self.q_f.max(1));
        let stride = self.q_f.div_ceil(workers);
        (0..stride)
            .map(|r| {
                (0..workers)
                    .map(|j| j * stride + r)
                    .filter(|&i| i < self.q_f)
                    .collect()
            })
            .collect()
    }
}

/// `q_f = max{p, ceil(8 n f / cache_bytes)}`, clamped to `f`.
///
/// The element width in the cache estimate is 8 bytes regardless of the
/// training precision.
pub fn plan_partitions(n: usize, f: usize, p: usize, cache_bytes: usize) -> PartitionPlan {
    let (n, f, p) = (n.max(1), f.max(1), p.max(1));
    let cache_bytes = cache_bytes.max(1);
    let by_cache = (8 * n * f).div_ceil(cache_bytes);
    let q_f = p.max(by_cache).min(f);
    let (base, extra) = (f / q_f, f % q_f);
    let mut boundaries = Vec::with_capacity(q_f + 1);
    boundaries.push(0);
    for i in 0..q_f {
        let width = base + usize::from(i < extra);
        boundaries.push(boundaries[i] + width);
    }
    PartitionPlan {
        q_v: 1,
        q_f,
        boundaries,
        cache_bytes,
        workers: p,
        gamma_v: 1.0,
    }
}

fn propagate_block(adj: SpMat<'_>, x: &DenseMatrix, c0: usize, out: &mut [f64]) {
    let n = adj.n();
    for (k, ocol) in out.chunks_exact_mut(n).enumerate() {
        let xcol = x.col(c0 + k);
        for (v, o) in ocol.iter_mut().enumerate() {
            let mut acc = 0.0;
            for e in adj.csr.row_range(v) {
                acc += adj.data[e] * xcol[adj.csr.indices[e] as usize];
            }
            *o = acc;
        }
    }
}

/// Sparse x dense product over column partitions.
///
/// Each output block is written by exactly one worker. Workers advance in
/// lock-step rounds separated by a barrier; partitions of the same round are
/// `ceil(q_f / p)` apart. Every output entry is accumulated in CSR order, so
/// the result is bitwise independent of the plan and the worker count.
pub fn spmm_partitioned(
    adj: SpMat<'_>,
    x: &DenseMatrix,
    plan: &PartitionPlan,
    workers: usize,
) -> Result<DenseMatrix> {
    let n = adj.n();
    if x.rows() != n {
        return Err(Error::shape(format!(
            "spmm: adjacency is {n}x{n} but features have {} rows",
            x.rows()
        )));
    }
    let f = x.cols();
    if f == 0 || n == 0 {
        return Ok(DenseMatrix::zeros(n, f));
    }
    if plan.boundaries.first() != Some(&0) || plan.boundaries.last() != Some(&f) {
        return Err(Error::shape(format!(
            "spmm: partition plan covers {:?} columns, features have {f}",
            plan.boundaries.last()
        )));
    }

    let mut out = vec![0.0; n * f];
    let mut blocks: Vec<(usize, &mut [f64])> = Vec::with_capacity(plan.q_f);
    let mut rest = out.as_mut_slice();
    for i in 0..plan.q_f {
        let (c0, c1) = plan.block(i);
        let (head, tail) = rest.split_at_mut((c1 - c0) * n);
        blocks.push((c0, head));
        rest = tail;
    }

    let workers = workers.clamp(1, plan.q_f);
    if workers == 1 {
        for (c0, block) in blocks {
            propagate_block(adj, x, c0, block);
        }
    } else {
        let stride = plan.q_f.div_ceil(workers);
        let barrier = Barrier::new(workers);
        let mut owned: Vec<Vec<(usize, &mut [f64])>> = (0..workers).map(|_| Vec::new()).collect();
        for (i, block) in blocks.into_iter().enumerate() {
            owned[i / stride].push(block);
        }
        std::thread::scope(|s| {
            for mine in owned {
                let barrier = &barrier;
                s.spawn(move || {
                    let mut mine = mine.into_iter();
                    for _round in 0..stride {
                        if let Some((c0, block)) = mine.next() {
                            propagate_block(adj, x, c0, block);
                        }
                        barrier.wait();
                    }
                });
            }
        });
    }
    DenseMatrix::from_col_major(n, f, out)
}

/// Single-threaded, unpartitioned product with the same per-entry
/// accumulation order as [`spmm_partitioned`].
pub fn spmm_reference(adj: SpMat<'_>, x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = adj.n();
    if x.rows() != n {
        return Err(Error::shape("spmm: row mismatch"));
    }
    let mut out = DenseMatrix::zeros(n, x.cols());
    for v in 0..n {
        for c in 0..x.cols() {
            let mut acc = 0.0;
            for e in adj.csr.row_range(v) {
                acc += adj.data[e] * x[(adj.csr.indices[e] as usize, c)];
            }
            out[(v, c)] = acc;
        }
    }
    Ok(out)
}
