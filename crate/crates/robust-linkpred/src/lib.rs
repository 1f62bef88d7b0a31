//! Attacker-defender game for similarity-based link prediction under
//! adversarial edge deletion.
//!
//! The library models a network analyst (defender) who predicts links via
//! local similarity metrics and may reserve a budget of reliable queries,
//! against an attacker who deletes observed edges to hide a target link.
//! It provides:
//!
//! - the nine local similarity metrics (symmetric and asymmetric),
//! - random-graph scenario generation and attacker-type sampling,
//! - damage-graph construction under the independent-damage approximation,
//! - attacker best responses (LinkDel, UnbiasedDel, RandDel) with
//!   defender-favorable tie-breaking,
//! - defense planners (IDOpt via an exact 0-1 solver, IDRank, PPN),
//! - brute-force oracles including a MaxCut equivalence gadget,
//! - a Monte-Carlo experiment runner measuring damage prevention ratios.

pub mod attack;
pub mod damage;
pub mod defense;
pub mod experiment;
pub mod graph;
pub mod ilp;
pub mod loss;
pub mod metrics;
pub mod oracle;
pub mod par;
pub mod scenario;

pub use graph::{Graph, NodeId, NodePair};
pub use metrics::{MetricClass, MetricKind};

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node id {id} out of range for graph with {n} nodes")]
    InvalidNode { id: NodeId, n: usize },
    #[error("node pair endpoints must differ (got {0})")]
    SelfPair(NodeId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("attack budget {k_a} cannot cover {required} deletable tuples")]
    UnsupportedBudget { k_a: usize, required: usize },
    #[error("edge {0:?} is not part of the damage graph")]
    UnknownDamageEdge(NodePair),
    #[error("dpr denominator degenerate: la={la}, l0={l0}")]
    DegenerateDpr { la: f64, l0: f64 },
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("config error at {path}: {msg}")]
    Config { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
