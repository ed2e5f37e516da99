//! Super-node compression of networks for community detection.
//!
//! A graph is compressed by picking seed nodes (CoreHD by default), growing a
//! super node around each seed by neighborhood order, and contracting each
//! super node to a single vertex. Louvain or a stochastic block model then
//! runs on the small weighted network, and the result is mapped back to the
//! original nodes.

pub mod compression;
pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod generator;
pub mod graph;
pub mod louvain;
pub mod metrics;
pub mod partition;
pub mod sbm;
pub mod scalar;
pub mod seeding;

pub use compression::{compress, contract, grow_supernodes, map_partition, SuperNodeAssignment};
pub use error::{Error, Result};
pub use generator::planted_partition;
pub use graph::{k_core, neighborhood, parse_edge_list, GraphBuilder, NodeSet};
pub use louvain::{louvain, modularity};
pub use metrics::{community_size_ranking, kendall_tau, min_auc, neighbor_community_distribution, nmi};
pub use partition::Partition;
pub use sbm::{estimate_pi, fit_sbm, sbm_loglik, select_k, BlockModelParams};
pub use scalar::Scalar;
pub use seeding::{select_seeds, SeedMethod, SeedSet};

pub type Graph = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type SuperNodeNetwork = compression::SuperNodeNetwork<f64>;
pub type Compression = compression::Compression<f64>;
