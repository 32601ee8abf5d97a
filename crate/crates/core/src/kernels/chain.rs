use serde::{Deserialize, Serialize};

/// Evaluation order of a sparse x dense x dense chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainOrder {
    /// Sparse product first: `(A W1) W2`, or `(A W1)^T W3`.
    SparseFirst,
    /// Dense product first: `A (W1 W2)`, or `W1^T (A W3)`.
    DenseFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainPattern {
    /// `A * W1 * W2` with `W1: n x f1`, `W2: f1 x f2`.
    AW1W2,
    /// `W1^T * A * W3` with `W1: n x f1`, `W3: n x f2`.
    W1tAW3,
}

/// MAC counts `(sparse_first, dense_first)` for an `n x n` sparse matrix of
/// the given density. Both patterns share the same formulas.
pub fn chain_costs(n: usize, density: f64, f1: usize, f2: usize, _pattern: ChainPattern) -> (f64, f64) {
    let n = n as f64;
    let (f1, f2) = (f1 as f64, f2 as f64);
    let sparse = density * n * n;
    let shared = n * f1 * f2;
    (sparse * f1 + shared, sparse * f2 + shared)
}

/// Picks the cheaper order; ties go to [`ChainOrder::DenseFirst`].
pub fn chain_order(n: usize, density: f64, f1: usize, f2: usize, pattern: ChainPattern) -> ChainOrder {
    let (first, second) = chain_costs(n, density, f1, f2, pattern);
    if first < second {
        ChainOrder::SparseFirst
    } else {
        ChainOrder::DenseFirst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_input_prefers_sparse_first() {
        let o = chain_order(1000, 0.01, 256, 512, ChainPattern::AW1W2);
        assert_eq!(o, ChainOrder::SparseFirst);
    }

    #[test]
    fn wide_input_prefers_dense_first() {
        let o = chain_order(1000, 0.01, 512, 128, ChainPattern::AW1W2);
        assert_eq!(o, ChainOrder::DenseFirst);
        let o = chain_order(1000, 0.01, 512, 128, ChainPattern::W1tAW3);
        assert_eq!(o, ChainOrder::DenseFirst);
    }

    #[test]
    fn tie_goes_to_dense_first() {
        assert_eq!(chain_order(77, 0.3, 64, 64, ChainPattern::AW1W2), ChainOrder::DenseFirst);
    }
}
