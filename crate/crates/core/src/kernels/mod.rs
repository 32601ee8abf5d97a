//! Numerical kernels: dense matrices, the feature-partitioned sparse x dense
//! product and matrix-chain order selection.

mod chain;
mod dense;
mod spmm;

pub use chain::{chain_costs, chain_order, ChainOrder, ChainPattern};
pub use dense::{gemm, gemm_naive, gemm_nt, gemm_tn, DenseMatrix};
pub use spmm::{plan_partitions, spmm_partitioned, spmm_reference, PartitionPlan, SpMat};

use std::cell::Cell;
use std::time::{Duration, Instant};

/// Default private cache budget in bytes.
pub const DEFAULT_CACHE_BYTES: usize = 262_144;

/// Execution settings for the kernels plus wall-time counters for the
/// aggregation (sparse) and transformation (dense) phases.
#[derive(Debug)]
pub struct KernelCtx {
    pub workers: usize,
    pub cache_bytes: usize,
    aggregate: Cell<Duration>,
    transform: Cell<Duration>,
}

impl Default for KernelCtx {
    fn default() -> Self {
        KernelCtx::new(1, DEFAULT_CACHE_BYTES)
    }
}

impl KernelCtx {
    pub fn new(workers: usize, cache_bytes: usize) -> Self {
        KernelCtx {
            workers: workers.max(1),
            cache_bytes: cache_bytes.max(1),
            aggregate: Cell::new(Duration::ZERO),
            transform: Cell::new(Duration::ZERO),
        }
    }

    /// `adj * x` with a partition plan sized for `x`.
    pub fn spmm(&self, adj: SpMat<'_>, x: &DenseMatrix) -> crate::Result<DenseMatrix> {
        let t = Instant::now();
        let plan = plan_partitions(x.rows().max(1), x.cols().max(1), self.workers, self.cache_bytes);
        let out = spmm_partitioned(adj, x, &plan, self.workers);
        self.aggregate.set(self.aggregate.get() + t.elapsed());
        out
    }

    pub fn gemm(&self, a: &DenseMatrix, b: &DenseMatrix) -> crate::Result<DenseMatrix> {
        self.timed(|| gemm(a, b))
    }

    /// `a^T * b`
    pub fn gemm_tn(&self, a: &DenseMatrix, b: &DenseMatrix) -> crate::Result<DenseMatrix> {
        self.timed(|| gemm_tn(a, b))
    }

    /// `a * b^T`
    pub fn gemm_nt(&self, a: &DenseMatrix, b: &DenseMatrix) -> crate::Result<DenseMatrix> {
        self.timed(|| gemm_nt(a, b))
    }

    fn timed<T>(&self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.transform.set(self.transform.get() + t.elapsed());
        out
    }

    /// Returns and resets `(aggregate, transform)` time.
    pub fn take_timers(&self) -> (Duration, Duration) {
        (self.aggregate.take(), self.transform.take())
    }
}
