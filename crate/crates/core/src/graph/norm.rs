use serde::{Deserialize, Serialize};

use super::{Csr, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// `D^-1 A`; rows of isolated nodes stay all-zero.
    Row,
    /// `(I + D)^-1/2 (I + A) (I + D)^-1/2`; self-loops are part of the structure.
    Sym,
}

/// Normalized adjacency matrix in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormAdj {
    pub mode: NormMode,
    pub csr: Csr,
    pub data: Vec<f64>,
}

pub fn normalize_adjacency(g: &Graph, mode: NormMode) -> NormAdj {
    normalize_csr(g.csr(), mode)
}

/// Normalizes a loop-free symmetric structure.
pub(crate) fn normalize_csr(csr: &Csr, mode: NormMode) -> NormAdj {
    match mode {
        NormMode::Row => {
            let mut data = vec![0.0; csr.nnz()];
            for v in 0..csr.num_rows() {
                let deg = csr.degree(v);
                if deg > 0 {
                    let w = 1.0 / deg as f64;
                    data[csr.row_range(v)].fill(w);
                }
            }
            NormAdj {
                mode,
                csr: csr.clone(),
                data,
            }
        }
        NormMode::Sym => {
            let looped = with_self_loops(csr);
            let scale: Vec<f64> = (0..csr.num_rows())
                .map(|v| 1.0 / ((1 + csr.degree(v)) as f64).sqrt())
                .collect();
            let mut data = Vec::with_capacity(looped.nnz());
            for v in 0..looped.num_rows() {
                for &u in looped.row(v) {
                    data.push(scale[v] * scale[u as usize]);
                }
            }
            NormAdj {
                mode,
                csr: looped,
                data,
            }
        }
    }
}

/// Inserts the diagonal into every row, keeping rows ascending.
pub(crate) fn with_self_loops(csr: &Csr) -> Csr {
    let n = csr.num_rows();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(csr.nnz() + n);
    indptr.push(0);
    for v in 0..n {
        let row = csr.row(v);
        let split = row.partition_point(|&w| (w as usize) < v);
        indices.extend_from_slice(&row[..split]);
        indices.push(v as u32);
        indices.extend_from_slice(&row[split..]);
        indptr.push(indices.len());
    }
    Csr { indptr, indices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn dense(adj: &NormAdj) -> Vec<Vec<f64>> {
        let n = adj.csr.num_rows();
        let mut m = vec![vec![0.0; n]; n];
        for v in 0..n {
            for e in adj.csr.row_range(v) {
                m[v][adj.csr.indices[e] as usize] = adj.data[e];
            }
        }
        m
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = seed::rng(seed);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_undirected_edges(n, &edges).unwrap()
    }

    #[test]
    fn row_mode_splits_weight_evenly() {
        let g = Graph::from_undirected_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let adj = normalize_adjacency(&g, NormMode::Row);
        assert_eq!(&adj.data[adj.csr.row_range(0)], &[0.5, 0.5]);
        assert_eq!(adj.csr, *g.csr());
    }

    #[test]
    fn sym_mode_on_single_edge() {
        let g = Graph::from_undirected_edges(2, &[(0, 1)]).unwrap();
        let adj = normalize_adjacency(&g, NormMode::Sym);
        // dense oracle: (I+D)^-1/2 (I+A) (I+D)^-1/2 with D = I, A = [[0,1],[1,0]]
        let d = [2.0f64, 2.0];
        let ia = [[1.0, 1.0], [1.0, 1.0]];
        let got = dense(&adj);
        for i in 0..2 {
            for j in 0..2 {
                let want = ia[i][j] / (d[i].sqrt() * d[j].sqrt());
                assert!((got[i][j] - want).abs() < 1e-15);
                assert!((got[i][j] - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn row_sums_are_one_on_random_graph() {
        let g = random_graph(100, 0.05, 3);
        let adj = normalize_adjacency(&g, NormMode::Row);
        for v in 0..100 {
            let s: f64 = adj.data[adj.csr.row_range(v)].iter().sum();
            if g.degree(v) > 0 {
                assert!((s - 1.0).abs() < 1e-12);
            } else {
                assert_eq!(s, 0.0);
            }
        }
    }

    #[test]
    fn sym_mode_is_symmetric_and_has_diagonal() {
        let g = random_graph(60, 0.1, 9);
        let adj = normalize_adjacency(&g, NormMode::Sym);
        let m = dense(&adj);
        for i in 0..60 {
            assert!(m[i][i] > 0.0);
            for j in 0..60 {
                assert!((m[i][j] - m[j][i]).abs() < 1e-12);
            }
        }
    }
}
