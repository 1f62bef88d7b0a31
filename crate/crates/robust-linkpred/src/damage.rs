//! Per-sample damage graphs: critical tuples (V1, w, V2) with independent
//! single-deletion damage estimates.

use serde::{Deserialize, Serialize};

use crate::defense::DefensePlan;
use crate::graph::{Graph, NodeId, NodePair};
use crate::loss::{pair_loss, LossParams};
use crate::metrics::{similarity, similarity_excluding, MetricKind};
use crate::scenario::TargetSet;
use crate::{Error, Result};

/// Sign convention for single-deletion damages. `AfterMinusBefore` makes a
/// positive damage one that increases the defender's loss, which is the
/// convention the attacker tie-break and the ranking defense rely on. The
/// flipped variant exists for auditing only.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum DamageSign {
    #[default]
    AfterMinusBefore,
    BeforeMinusAfter,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DamageTuple {
    pub w: NodeId,
    pub c1: f64,
    pub c2: f64,
    pub prot1: bool,
    pub prot2: bool,
}

impl DamageTuple {
    pub fn c_min(&self) -> f64 {
        self.c1.min(self.c2)
    }

    /// Both edges unprotected: the attacker must pick a side.
    pub fn is_critical(&self) -> bool {
        !self.prot1 && !self.prot2
    }
}

/// Damage graph for one attacker-type sample: the tuples over all common
/// neighbors of the hidden link (V1, V2), in ascending w.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DamageGraph {
    pub v1: NodeId,
    pub v2: NodeId,
    pub tuples: Vec<DamageTuple>,
    pub sample_index: usize,
    /// Degrees of v1/v2 in the sample graph; the asymmetric-metric
    /// partition search needs them.
    pub d1: usize,
    pub d2: usize,
}

impl DamageGraph {
    pub fn edge1(&self, t: &DamageTuple) -> NodePair {
        NodePair::new(self.v1, t.w).unwrap()
    }

    pub fn edge2(&self, t: &DamageTuple) -> NodePair {
        NodePair::new(self.v2, t.w).unwrap()
    }

    /// Count of critical (both-unprotected) tuples, the attacker's k_A'.
    pub fn num_critical(&self) -> usize {
        self.tuples.iter().filter(|t| t.is_critical()).count()
    }

    /// Returns a copy with protection flags recomputed against `plan`;
    /// damages are plan-independent and carried over unchanged.
    pub fn with_plan(&self, plan: &DefensePlan) -> DamageGraph {
        let mut out = self.clone();
        for t in &mut out.tuples {
            t.prot1 = plan.contains(NodePair::new(out.v1, t.w).unwrap());
            t.prot2 = plan.contains(NodePair::new(out.v2, t.w).unwrap());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("damage graph serializes")
    }
}

/// Builds the damage graph for `h_a` = (V1, V2): for each common neighbor
/// w, the damage of deleting (V_r, w) is the loss change over the affected
/// target pairs, computed without materializing the deleted graph.
pub fn build_damage_graph(
    g: &Graph,
    h_a: NodePair,
    targets: &TargetSet,
    m: MetricKind,
    p: &LossParams,
    plan: &DefensePlan,
    sample_index: usize,
    sign: DamageSign,
) -> Result<DamageGraph> {
    if !g.contains_pair(h_a) {
        return Err(Error::InvalidArgument(format!(
            "attacker target {h_a:?} is not an edge of the sample graph"
        )));
    }
    let (v1, v2) = (h_a.a(), h_a.b());
    let common = g.common_neighbors(v1, v2)?;
    let base: Vec<f64> = targets
        .pairs
        .iter()
        .zip(&targets.labels)
        .map(|(pair, &y)| {
            similarity(m, g, pair.a(), pair.b()).map(|s| pair_loss(s, y, p))
        })
        .collect::<Result<_>>()?;
    let mut tuples = Vec::with_capacity(common.len());
    for &w in &common {
        let mut c = [0.0; 2];
        for (r, v) in [v1, v2].into_iter().enumerate() {
            let e = NodePair::new(v, w)?;
            let affected = g.two_hop_affected_pairs(e, &targets.pairs);
            let mut delta = 0.0;
            for pair in affected {
                let idx = targets.pairs.binary_search(&pair).unwrap();
                let sim = similarity_excluding(m, g, pair.a(), pair.b(), e)?;
                delta += pair_loss(sim, targets.labels[idx], p) - base[idx];
            }
            c[r] = match sign {
                DamageSign::AfterMinusBefore => delta,
                DamageSign::BeforeMinusAfter => -delta,
            };
        }
        tuples.push(DamageTuple {
            w,
            c1: c[0],
            c2: c[1],
            prot1: plan.contains(NodePair::new(v1, w)?),
            prot2: plan.contains(NodePair::new(v2, w)?),
        });
    }
    Ok(DamageGraph {
        v1,
        v2,
        tuples,
        sample_index,
        d1: g.degree(v1)?,
        d2: g.degree(v2)?,
    })
}

/// Total damage of an attack under the independent-damage approximation:
/// the sum of per-edge damages over the deleted edges.
pub fn plan_damage(dg: &DamageGraph, attack: &crate::attack::AttackPlan) -> Result<f64> {
    let mut sum = 0.0;
    'outer: for &e in attack.deletions() {
        for t in &dg.tuples {
            if e == dg.edge1(t) {
                sum += t.c1;
                continue 'outer;
            }
            if e == dg.edge2(t) {
                sum += t.c2;
                continue 'outer;
            }
        }
        return Err(Error::UnknownDamageEdge(e));
    }
    Ok(sum)
}
