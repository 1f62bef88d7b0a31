//! The nine local similarity metrics with their symmetric/asymmetric split.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId, NodePair};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[serde(rename = "cn")]
    CommonNeighbors,
    #[serde(rename = "aa")]
    AdamicAdar,
    #[serde(rename = "ra")]
    ResourceAllocation,
    Jaccard,
    Sorensen,
    Salton,
    #[serde(rename = "hpi")]
    HubPromoted,
    #[serde(rename = "hdi")]
    HubDepressed,
    #[serde(rename = "lhn")]
    LeichtHolmeNewman,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MetricClass {
    Symmetric,
    Asymmetric,
}

impl MetricKind {
    pub const ALL: [MetricKind; 9] = [
        MetricKind::CommonNeighbors,
        MetricKind::AdamicAdar,
        MetricKind::ResourceAllocation,
        MetricKind::Jaccard,
        MetricKind::Sorensen,
        MetricKind::Salton,
        MetricKind::HubPromoted,
        MetricKind::HubDepressed,
        MetricKind::LeichtHolmeNewman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::CommonNeighbors => "cn",
            MetricKind::AdamicAdar => "aa",
            MetricKind::ResourceAllocation => "ra",
            MetricKind::Jaccard => "jaccard",
            MetricKind::Sorensen => "sorensen",
            MetricKind::Salton => "salton",
            MetricKind::HubPromoted => "hpi",
            MetricKind::HubDepressed => "hdi",
            MetricKind::LeichtHolmeNewman => "lhn",
        }
    }

    pub fn parse(s: &str) -> Result<MetricKind> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric '{s}'")))
    }

    pub fn class(self) -> MetricClass {
        match self {
            MetricKind::CommonNeighbors
            | MetricKind::AdamicAdar
            | MetricKind::ResourceAllocation
            | MetricKind::Jaccard
            | MetricKind::Sorensen => MetricClass::Symmetric,
            MetricKind::Salton
            | MetricKind::HubPromoted
            | MetricKind::HubDepressed
            | MetricKind::LeichtHolmeNewman => MetricClass::Asymmetric,
        }
    }
}

/// Similarity of a node pair. Ratio metrics with no common neighbors score
/// 0 (this also covers the 0/0 case of two isolated endpoints).
pub fn similarity(m: MetricKind, g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    let common = g.common_neighbors(u, v)?;
    let d1 = g.deg(u);
    let d2 = g.deg(v);
    Ok(score(m, &common, d1, d2, |w| g.deg(w)))
}

/// Similarity evaluated as if `removed` were absent from the graph, without
/// materializing the deleted graph. Matches `similarity` on the graph
/// returned by `delete_edges(&[removed])` exactly.
pub fn similarity_excluding(
    m: MetricKind,
    g: &Graph,
    u: NodeId,
    v: NodeId,
    removed: NodePair,
) -> Result<f64> {
    if !g.contains_pair(removed) {
        return similarity(m, g, u, v);
    }
    let mut common = g.common_neighbors(u, v)?;
    common.retain(|&w| {
        !(removed == NodePair::new(u, w).unwrap() || removed == NodePair::new(v, w).unwrap())
    });
    let d1 = g.deg(u) - usize::from(removed.touches(u));
    let d2 = g.deg(v) - usize::from(removed.touches(v));
    Ok(score(m, &common, d1, d2, |w| {
        g.deg(w) - usize::from(removed.touches(w))
    }))
}

fn score<F: Fn(NodeId) -> usize>(
    m: MetricKind,
    common: &[NodeId],
    d1: usize,
    d2: usize,
    deg_of: F,
) -> f64 {
    let n = common.len() as f64;
    if common.is_empty() {
        return 0.0;
    }
    match m {
        MetricKind::CommonNeighbors => n,
        MetricKind::AdamicAdar => common
            .iter()
            .map(|&w| 1.0 / (deg_of(w) as f64).ln())
            .sum(),
        MetricKind::ResourceAllocation => {
            common.iter().map(|&w| 1.0 / deg_of(w) as f64).sum()
        }
        _ => ratio_value(m, n, d1 as f64, d2 as f64),
    }
}

/// The ratio-metric value for a given surviving common-neighbor count and
/// endpoint degrees. Shared between direct evaluation and the attacker's
/// partition search over hypothetical post-attack degrees.
pub fn ratio_value(m: MetricKind, n_common: f64, d1: f64, d2: f64) -> f64 {
    if n_common == 0.0 {
        return 0.0;
    }
    match m {
        MetricKind::Jaccard => n_common / (d1 + d2 - n_common),
        MetricKind::Sorensen => 2.0 * n_common / (d1 + d2),
        MetricKind::Salton => n_common / (d1 * d2).sqrt(),
        MetricKind::HubPromoted => n_common / d1.min(d2),
        MetricKind::HubDepressed => n_common / d1.max(d2),
        MetricKind::LeichtHolmeNewman => n_common / (d1 * d2),
        _ => panic!("ratio_value is only defined for ratio metrics"),
    }
}
