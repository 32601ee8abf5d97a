//! Graph-sampling based minibatch training for graph neural networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the immutable CSR graph, dataset I/O, adjacency
//!   normalisation, subgraph induction, the data-array transpose and the
//!   Kronecker generator.
//! * [`samplers`] contains the Dashboard-backed frontier sampler, the edge and
//!   random-walk samplers, node clipping, the subgraph pool and the
//!   normalisation-coefficient estimator.
//! * [`kernels`] provides the dense matrix type, the feature-partitioned
//!   sparse x dense product and the matrix-chain order selector.
//! * [`model`] implements forward and backward propagation for GraphSAGE,
//!   GCN, MixHop and single-head GAT layers plus the classifier head.
//! * [`trainer`] drives minibatch training and evaluation.

pub mod error;
pub mod graph;
pub mod kernels;
pub mod model;
pub mod samplers;
pub mod seed;
pub mod trainer;

pub use error::{Error, Result};
