//! Immutable CSR graphs and the operations that derive minibatch subgraphs
//! from them.

mod io;
mod kronecker;
mod norm;
mod subgraph;

pub use io::{load_graph, write_graph, Meta};
pub use kronecker::{kronecker_generate, KroneckerConfig, LabelMode, INITIATOR};
pub use norm::{normalize_adjacency, NormAdj, NormMode};
pub use subgraph::{induce_subgraph, transpose_csr_data, Subgraph};

use crate::{Error, Result};

/// Node role in the dataset split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train = 0,
    Val = 1,
    Test = 2,
}

impl Split {
    pub fn from_u8(tag: u8) -> Option<Split> {
        match tag {
            0 => Some(Split::Train),
            1 => Some(Split::Val),
            2 => Some(Split::Test),
            _ => None,
        }
    }
}

/// Compressed sparse row structure of a square matrix.
///
/// Neighbor lists are strictly ascending.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Csr {
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
}

impl Csr {
    pub fn num_rows(&self) -> usize {
        self.indptr.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u32] {
        &self.indices[self.indptr[v]..self.indptr[v + 1]]
    }

    #[inline]
    pub fn row_range(&self, v: usize) -> std::ops::Range<usize> {
        self.indptr[v]..self.indptr[v + 1]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.indptr[v + 1] - self.indptr[v]
    }

    /// Position of entry `(u, v)` inside `indices`, if present.
    pub fn find(&self, u: usize, v: u32) -> Option<usize> {
        let start = self.indptr[u];
        self.row(u).binary_search(&v).ok().map(|k| start + k)
    }

    /// Builds a CSR from an edge list, sorting and de-duplicating rows.
    pub fn from_edges(num_nodes: usize, edges: &[(u32, u32)]) -> Csr {
        let mut counts = vec![0usize; num_nodes + 1];
        for &(u, _) in edges {
            counts[u as usize + 1] += 1;
        }
        for i in 0..num_nodes {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut indices = vec![0u32; edges.len()];
        for &(u, v) in edges {
            indices[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        let mut indptr = Vec::with_capacity(num_nodes + 1);
        let mut out = Vec::with_capacity(edges.len());
        indptr.push(0);
        for v in 0..num_nodes {
            let row = &mut indices[counts[v]..counts[v + 1]];
            row.sort_unstable();
            let mut last = None;
            for &w in row.iter() {
                if last != Some(w) {
                    out.push(w);
                    last = Some(w);
                }
            }
            indptr.push(out.len());
        }
        Csr {
            indptr,
            indices: out,
        }
    }

    /// Checks structural invariants: monotone `indptr`, in-range and strictly
    /// ascending neighbor lists, no self-loops and symmetric structure.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_rows();
        if self.indptr.first() != Some(&0) {
            return Err(Error::InvalidGraph("indptr[0] must be 0".into()));
        }
        if self.indptr[n] != self.indices.len() {
            return Err(Error::InvalidGraph(format!(
                "indptr[{n}] = {} but there are {} indices",
                self.indptr[n],
                self.indices.len()
            )));
        }
        for v in 0..n {
            if self.indptr[v] > self.indptr[v + 1] {
                return Err(Error::InvalidGraph(format!("indptr decreases at node {v}")));
            }
        }
        for v in 0..n {
            let row = self.row(v);
            for (k, &w) in row.iter().enumerate() {
                if w as usize >= n {
                    return Err(Error::NodeOutOfRange {
                        node: w as u64,
                        num_nodes: n,
                    });
                }
                if w as usize == v {
                    return Err(Error::InvalidGraph(format!("self-loop at node {v}")));
                }
                if k > 0 && row[k - 1] >= w {
                    return Err(Error::InvalidGraph(format!(
                        "neighbors of node {v} are not strictly ascending ({} then {w})",
                        row[k - 1]
                    )));
                }
            }
        }
        for v in 0..n {
            for &w in self.row(v) {
                if self.find(w as usize, v as u32).is_none() {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric adjacency: edge ({v}, {w}) present but ({w}, {v}) missing"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Undirected attributed graph in CSR form.
///
/// Features are stored row-major as 32-bit floats, labels as a row-major 0/1
/// indicator matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    csr: Csr,
    feat_dim: usize,
    features: Vec<f32>,
    num_classes: usize,
    labels: Vec<u8>,
    split: Vec<Split>,
    multilabel: bool,
}

impl Graph {
    /// Assembles a graph, checking every structural and shape invariant.
    pub fn new(
        csr: Csr,
        feat_dim: usize,
        features: Vec<f32>,
        num_classes: usize,
        labels: Vec<u8>,
        split: Vec<Split>,
        multilabel: bool,
    ) -> Result<Graph> {
        let n = csr.num_rows();
        if csr.indptr.is_empty() {
            return Err(Error::InvalidGraph("indptr must have num_nodes + 1 entries".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph("more nodes than 32-bit ids allow".into()));
        }
        csr.validate()?;
        if features.len() != n * feat_dim {
            return Err(Error::InvalidGraph(format!(
                "features hold {} values, expected {n} x {feat_dim}",
                features.len()
            )));
        }
        if labels.len() != n * num_classes {
            return Err(Error::InvalidGraph(format!(
                "labels hold {} values, expected {n} x {num_classes}",
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidGraph(format!(
                "label entry {bad} is {} (indicator must be 0 or 1)",
                labels[bad]
            )));
        }
        if split.len() != n {
            return Err(Error::InvalidGraph(format!(
                "split has {} entries, expected {n}",
                split.len()
            )));
        }
        Ok(Graph {
            csr,
            feat_dim,
            features,
            num_classes,
            labels,
            split,
            multilabel,
        })
    }

    /// Structure-only graph: no features, a single class, everything in the
    /// training split. Handy for sampler experiments.
    pub fn from_structure(csr: Csr) -> Result<Graph> {
        let n = csr.num_rows();
        Graph::new(csr, 0, Vec::new(), 1, vec![0; n], vec![Split::Train; n], false)
    }

    /// Structure-only graph from an undirected edge list; both directions are
    /// inserted.
    pub fn from_undirected_edges(num_nodes: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut both = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            both.push((u, v));
            both.push((v, u));
        }
        Graph::from_structure(Csr::from_edges(num_nodes, &both))
    }

    pub fn num_nodes(&self) -> usize {
        self.csr.num_rows()
    }

    /// Number of directed CSR entries (each undirected edge counts twice).
    pub fn num_edges(&self) -> usize {
        self.csr.nnz()
    }

    pub fn csr(&self) -> &Csr {
        &self.csr
    }

    pub fn indptr(&self) -> &[usize] {
        &self.csr.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.csr.indices
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        self.csr.row(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.csr.degree(v)
    }

    /// Average degree `|E| / |V|` with `|E|` counting CSR entries.
    pub fn average_degree(&self) -> f64 {
        if self.num_nodes() == 0 {
            0.0
        } else {
            self.num_edges() as f64 / self.num_nodes() as f64
        }
    }

    pub fn feat_dim(&self) -> usize {
        self.feat_dim
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn feature_row(&self, v: usize) -> &[f32] {
        &self.features[v * self.feat_dim..(v + 1) * self.feat_dim]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label_row(&self, v: usize) -> &[u8] {
        &self.labels[v * self.num_classes..(v + 1) * self.num_classes]
    }

    pub fn split(&self) -> &[Split] {
        &self.split
    }

    pub fn multilabel(&self) -> bool {
        self.multilabel
    }

    pub fn nodes_in(&self, split: Split) -> Vec<u32> {
        self.split
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == split)
            .map(|(v, _)| v as u32)
            .collect()
    }

    pub fn count_in(&self, split: Split) -> usize {
        self.split.iter().filter(|&&s| s == split).count()
    }
}
