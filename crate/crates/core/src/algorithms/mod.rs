//! Constructive algorithms and baselines.

pub mod arborescence;
pub mod baselines;
pub mod improve;
pub mod reductions;
pub mod treestar;
pub mod unicast;
pub mod wcds;

use thiserror::Error;

use crate::ctree::CtreeError;
use crate::entropy::EntropyError;
use crate::netgraph::NodeId;

pub use baselines::{cluster_cost, cluster_greedy, cluster_scheme, dsc_lower_bound, ind_cost, Clustering};
pub use improve::local_improve;
pub use treestar::{greedy_treestar, mce_treestar_wlsg, Forest, GreedyOptions, GreedyResult, Mce, TreeStar};
pub use unicast::unicast_arborescence;
pub use wcds::{is_wcds, tree_from_wcds, wcds_greedy};

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error("node set is not a weakly connected dominating set")]
    InvalidWcds,
    #[error("no treestar candidate remains")]
    NoCandidate,
    #[error("instance with {n} nodes exceeds the exact-solver limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("node {0} cannot be reached")]
    Unreachable(NodeId),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Tree(#[from] CtreeError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}
