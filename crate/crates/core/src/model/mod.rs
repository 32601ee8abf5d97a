//! GNN layers with hand-written backward passes, the classifier head and
//! the cross-entropy loss.

mod adj;
mod checkpoint;
pub mod gradcheck;
mod head;
mod layers;
mod network;
mod params;

use serde::{Deserialize, Serialize};

pub use adj::{AdjView, FullAdj};
pub use checkpoint::{load_checkpoint, save_checkpoint, Manifest, TensorEntry};
pub use head::{forward_head, loss_ce, loss_grad, HeadCache, PROB_EPS};
pub use layers::{forward_gat, forward_gcn, forward_layer, forward_mixhop, forward_sage, backward_layer, LayerCache, GAT_SLOPE};
pub use network::{backward, forward, ForwardPass};
pub use params::{glorot, LayerParams, Params};

use crate::graph::NormMode;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    Sage,
    Gcn,
    Mixhop,
    Gat,
}

impl Arch {
    pub const ALL: [Arch; 4] = [Arch::Sage, Arch::Gcn, Arch::Mixhop, Arch::Gat];

    /// Adjacency normalization each architecture propagates over.
    pub fn norm_mode(self) -> NormMode {
        match self {
            Arch::Sage => NormMode::Row,
            Arch::Gcn | Arch::Mixhop | Arch::Gat => NormMode::Sym,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arch::Sage => "sage",
            Arch::Gcn => "gcn",
            Arch::Mixhop => "mixhop",
            Arch::Gat => "gat",
        }
    }
}

impl std::fmt::Display for Arch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Arch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Arch::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown architecture '{s}' (sage, gcn, mixhop, gat)")))
    }
}

/// Shape of a network.
///
/// `hidden[l]` is the per-branch width of layer `l`: a sage layer outputs
/// `2 * hidden[l]` columns, a mixhop layer `(mixhop_k + 1) * hidden[l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub arch: Arch,
    pub in_dim: usize,
    pub hidden: Vec<usize>,
    pub num_classes: usize,
    pub multilabel: bool,
    pub mixhop_k: usize,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.is_empty() {
            return Err(Error::Config("need at least one layer".into()));
        }
        if self.in_dim == 0 || self.num_classes == 0 || self.hidden.contains(&0) {
            return Err(Error::Config(format!(
                "dimensions must be positive: in_dim={}, hidden={:?}, classes={}",
                self.in_dim, self.hidden, self.num_classes
            )));
        }
        Ok(())
    }

    pub fn num_layers(&self) -> usize {
        self.hidden.len()
    }

    pub fn layer_in(&self, l: usize) -> usize {
        if l == 0 {
            self.in_dim
        } else {
            self.layer_out(l - 1)
        }
    }

    pub fn layer_out(&self, l: usize) -> usize {
        let h = self.hidden[l];
        match self.arch {
            Arch::Sage => 2 * h,
            Arch::Gcn | Arch::Gat => h,
            Arch::Mixhop => (self.mixhop_k + 1) * h,
        }
    }

    pub fn embedding_dim(&self) -> usize {
        self.layer_out(self.num_layers() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        let mut s = ModelSpec {
            arch: Arch::Sage,
            in_dim: 5,
            hidden: vec![4, 3],
            num_classes: 2,
            multilabel: false,
            mixhop_k: 2,
        };
        assert_eq!(s.layer_in(1), 8);
        assert_eq!(s.embedding_dim(), 6);
        s.arch = Arch::Mixhop;
        assert_eq!(s.layer_in(1), 12);
        s.arch = Arch::Gat;
        assert_eq!(s.embedding_dim(), 3);
        assert_eq!("gcn".parse::<Arch>().unwrap(), Arch::Gcn);
        assert!("gin".parse::<Arch>().is_err());
    }
}
