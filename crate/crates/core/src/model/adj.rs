use crate::graph::{normalize_adjacency, transpose_csr_data, Csr, Graph, NormAdj, NormMode, Subgraph};
use crate::kernels::SpMat;
use crate::{Error, Result};

/// A normalized adjacency with its transposed data array.
#[derive(Clone, Copy, Debug)]
pub struct AdjView<'a> {
    pub csr: &'a Csr,
    pub fwd: &'a [f64],
    pub bwd: &'a [f64],
}

impl<'a> AdjView<'a> {
    pub fn new(csr: &'a Csr, fwd: &'a [f64], bwd: &'a [f64]) -> Result<Self> {
        if fwd.len() != csr.nnz() || bwd.len() != csr.nnz() {
            return Err(Error::shape(format!(
                "adjacency data lengths {}/{} do not match {} entries",
                fwd.len(),
                bwd.len(),
                csr.nnz()
            )));
        }
        Ok(AdjView { csr, fwd, bwd })
    }

    pub fn from_subgraph(s: &'a Subgraph) -> Self {
        AdjView {
            csr: &s.csr,
            fwd: &s.data_fwd,
            bwd: &s.data_bwd,
        }
    }

    pub fn n(&self) -> usize {
        self.csr.num_rows()
    }

    pub fn density(&self) -> f64 {
        let n = self.n().max(1) as f64;
        self.csr.nnz() as f64 / (n * n)
    }

    pub fn forward(&self) -> SpMat<'a> {
        SpMat {
            csr: self.csr,
            data: self.fwd,
        }
    }

    pub fn transposed(&self) -> SpMat<'a> {
        SpMat {
            csr: self.csr,
            data: self.bwd,
        }
    }
}

/// Whole-graph adjacency used for evaluation.
#[derive(Clone, Debug)]
pub struct FullAdj {
    pub adj: NormAdj,
    pub bwd: Vec<f64>,
}

impl FullAdj {
    pub fn new(g: &Graph, mode: NormMode) -> Result<Self> {
        let adj = normalize_adjacency(g, mode);
        let bwd = transpose_csr_data(&adj.csr, &adj.data)?;
        Ok(FullAdj { adj, bwd })
    }

    pub fn view(&self) -> AdjView<'_> {
        AdjView {
            csr: &self.adj.csr,
            fwd: &self.adj.data,
            bwd: &self.bwd,
        }
    }
}
