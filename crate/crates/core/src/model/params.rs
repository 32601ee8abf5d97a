use rand::Rng;

use super::{Arch, ModelSpec};
use crate::kernels::DenseMatrix;
use crate::seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum LayerParams {
    Sage { w_self: DenseMatrix, w_neigh: DenseMatrix },
    Gcn { w: DenseMatrix },
    Mixhop { w: Vec<DenseMatrix> },
    /// `a` is a `2 * f_out` column; its first half scores the row node, the
    /// second half the column node.
    Gat { w: DenseMatrix, a: DenseMatrix },
}

impl LayerParams {
    pub fn arch(&self) -> Arch {
        match self {
            LayerParams::Sage { .. } => Arch::Sage,
            LayerParams::Gcn { .. } => Arch::Gcn,
            LayerParams::Mixhop { .. } => Arch::Mixhop,
            LayerParams::Gat { .. } => Arch::Gat,
        }
    }

    pub fn named_tensors(&self) -> Vec<(String, &DenseMatrix)> {
        match self {
            LayerParams::Sage { w_self, w_neigh } => vec![("w_self".into(), w_self), ("w_neigh".into(), w_neigh)],
            LayerParams::Gcn { w } => vec![("w".into(), w)],
            LayerParams::Mixhop { w } => w.iter().enumerate().map(|(k, m)| (format!("w{k}"), m)).collect(),
            LayerParams::Gat { w, a } => vec![("w".into(), w), ("a".into(), a)],
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut DenseMatrix> {
        match self {
            LayerParams::Sage { w_self, w_neigh } => vec![w_self, w_neigh],
            LayerParams::Gcn { w } => vec![w],
            LayerParams::Mixhop { w } => w.iter_mut().collect(),
            LayerParams::Gat { w, a } => vec![w, a],
        }
    }
}

/// All trainable parameters: one entry per GNN layer plus the head.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub layers: Vec<LayerParams>,
    pub w_mlp: DenseMatrix,
}

/// Glorot-uniform `rows x cols` matrix.
pub fn glorot<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-limit..=limit))
}

impl Params {
    pub fn init(spec: &ModelSpec, seed: u64) -> Result<Params> {
        spec.validate()?;
        let mut rng = seed::rng_from(seed, 0x9a7a);
        let mut layers = Vec::with_capacity(spec.num_layers());
        for l in 0..spec.num_layers() {
            let (fi, h) = (spec.layer_in(l), spec.hidden[l]);
            layers.push(match spec.arch {
                Arch::Sage => LayerParams::Sage {
                    w_self: glorot(fi, h, &mut rng),
                    w_neigh: glorot(fi, h, &mut rng),
                },
                Arch::Gcn => LayerParams::Gcn { w: glorot(fi, h, &mut rng) },
                Arch::Mixhop => LayerParams::Mixhop {
                    w: (0..=spec.mixhop_k).map(|_| glorot(fi, h, &mut rng)).collect(),
                },
                Arch::Gat => LayerParams::Gat {
                    w: glorot(fi, h, &mut rng),
                    a: glorot(2 * h, 1, &mut rng),
                },
            });
        }
        let w_mlp = glorot(spec.embedding_dim(), spec.num_classes, &mut rng);
        Ok(Params { layers, w_mlp })
    }

    pub fn zeros_like(&self) -> Params {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.fill(0.0);
        }
        z
    }

    /// Tensors in a fixed order with names like `layer0.w_self` and `mlp`.
    pub fn named_tensors(&self) -> Vec<(String, &DenseMatrix)> {
        let mut out = Vec::new();
        for (l, lp) in self.layers.iter().enumerate() {
            for (name, t) in lp.named_tensors() {
                out.push((format!("layer{l}.{name}"), t));
            }
        }
        out.push(("mlp".into(), &self.w_mlp));
        out
    }

    pub fn tensors(&self) -> Vec<&DenseMatrix> {
        self.named_tensors().into_iter().map(|(_, t)| t).collect()
    }

    /// Same order as [`Params::named_tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut DenseMatrix> {
        let mut out: Vec<&mut DenseMatrix> = Vec::new();
        for lp in &mut self.layers {
            out.extend(lp.tensors_mut());
        }
        out.push(&mut self.w_mlp);
        out
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.as_slice().len()).sum()
    }

    /// Errors unless `other` has the same tensor shapes.
    pub fn check_congruent(&self, other: &Params) -> Result<()> {
        let a = self.named_tensors();
        let b = other.named_tensors();
        if a.len() != b.len() {
            return Err(Error::shape(format!("{} tensors vs {}", a.len(), b.len())));
        }
        for ((na, ta), (nb, tb)) in a.iter().zip(&b) {
            if na != nb || ta.shape() != tb.shape() {
                return Err(Error::shape(format!(
                    "tensor {na} {:?} does not match {nb} {:?}",
                    ta.shape(),
                    tb.shape()
                )));
            }
        }
        Ok(())
    }
}
