use super::{Csr, Graph, NormAdj, NormMode};
use crate::{Error, Result};

/// An induced minibatch subgraph.
///
/// `csr` is local (row `i` is parent node `nodes[i]`). `data_fwd` carries the
/// normalized adjacency values and `data_bwd` the same values permuted so
/// that `(csr, data_bwd)` is the transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pub nodes: Vec<u32>,
    pub mode: NormMode,
    pub csr: Csr,
    pub data_fwd: Vec<f64>,
    pub data_bwd: Vec<f64>,
    /// Average degree of the induced graph, self-loops excluded.
    pub d_s: f64,
}

impl Subgraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of induced edge entries excluding the self-loops of sym mode.
    pub fn num_graph_edges(&self) -> usize {
        match self.mode {
            NormMode::Row => self.csr.nnz(),
            NormMode::Sym => self.csr.nnz() - self.nodes.len(),
        }
    }

    /// Replaces the forward values and recomputes the transposed array.
    pub fn set_forward_data(&mut self, data: Vec<f64>) -> Result<()> {
        if data.len() != self.csr.nnz() {
            return Err(Error::shape(format!(
                "forward data has {} values for {} entries",
                data.len(),
                self.csr.nnz()
            )));
        }
        self.data_bwd = transpose_csr_data(&self.csr, &data)?;
        self.data_fwd = data;
        Ok(())
    }
}

/// Induces the subgraph of `g` on `nodes`.
///
/// The local edge set is every entry of `adj` whose endpoints are both in
/// `nodes`. Values are normalized against the subgraph's own degrees: row
/// mode rescales the restricted rows to sum to one, sym mode recomputes
/// `(I + D_s)^-1/2 (I + A_s) (I + D_s)^-1/2`.
pub fn induce_subgraph(g: &Graph, adj: &NormAdj, nodes: &[u32]) -> Result<Subgraph> {
    if nodes.is_empty() {
        return Err(Error::Sampler("cannot induce a subgraph on zero nodes".into()));
    }
    if adj.csr.num_rows() != g.num_nodes() {
        return Err(Error::shape(format!(
            "adjacency has {} rows, graph has {} nodes",
            adj.csr.num_rows(),
            g.num_nodes()
        )));
    }
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if let Some(&bad) = nodes.last().filter(|&&v| v as usize >= g.num_nodes()) {
        return Err(Error::NodeOutOfRange {
            node: bad as u64,
            num_nodes: g.num_nodes(),
        });
    }

    let n = nodes.len();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut data = Vec::new();
    indptr.push(0);
    for &parent in &nodes {
        let range = adj.csr.row_range(parent as usize);
        for (&w, &a) in adj.csr.indices[range.clone()].iter().zip(&adj.data[range]) {
            if let Ok(local) = nodes.binary_search(&w) {
                indices.push(local as u32);
                data.push(a);
            }
        }
        indptr.push(indices.len());
    }
    let csr = Csr { indptr, indices };

    match adj.mode {
        NormMode::Row => {
            for v in 0..n {
                let row = &mut data[csr.row_range(v)];
                let sum: f64 = row.iter().sum();
                if sum > 0.0 {
                    row.iter_mut().for_each(|a| *a /= sum);
                }
            }
        }
        NormMode::Sym => {
            // every row holds its diagonal, so the loop-free degree is len - 1
            let scale: Vec<f64> = (0..n)
                .map(|v| 1.0 / (csr.degree(v) as f64).sqrt())
                .collect();
            for v in 0..n {
                for e in csr.row_range(v) {
                    data[e] = scale[v] * scale[csr.indices[e] as usize];
                }
            }
        }
    }

    let data_bwd = transpose_csr_data(&csr, &data)?;
    let loop_free = match adj.mode {
        NormMode::Row => csr.nnz(),
        NormMode::Sym => csr.nnz() - n,
    };
    Ok(Subgraph {
        nodes,
        mode: adj.mode,
        d_s: loop_free as f64 / n as f64,
        csr,
        data_fwd: data,
        data_bwd,
    })
}

/// Permutes `data` so that `(csr, result)` represents the transpose of
/// `(csr, data)`.
///
/// Requires a structurally symmetric `csr` with ascending rows. One pass
/// over the structure: reading entry `(v, u)` appends its value to the next
/// free slot of row `u`, which by the ascending order is exactly `(u, v)`.
pub fn transpose_csr_data(csr: &Csr, data: &[f64]) -> Result<Vec<f64>> {
    if data.len() != csr.nnz() {
        return Err(Error::shape(format!(
            "data has {} values for {} entries",
            data.len(),
            csr.nnz()
        )));
    }
    let n = csr.num_rows();
    let mut out = vec![f64::NAN; csr.nnz()];
    let mut next: Vec<usize> = csr.indptr[..n].to_vec();
    for v in 0..n {
        for j in csr.row_range(v) {
            let u = csr.indices[j] as usize;
            let slot = next[u];
            if slot >= csr.indptr[u + 1] || csr.indices[slot] as usize != v {
                return Err(Error::InvalidGraph(format!(
                    "structure is not symmetric at entry ({v}, {u})"
                )));
            }
            out[slot] = data[j];
            next[u] += 1;
        }
    }
    Ok(out)
}
