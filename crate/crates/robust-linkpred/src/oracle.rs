//! Brute-force ground truth: exhaustive attacker and defender
//! enumeration, plus the star-lift reduction tying the attacker's
//! problem to MaxCut. Everything here is exponential and guarded; it
//! exists to validate the fast paths, not to run at scale.

use std::collections::BTreeSet;

use crate::attack::{AttackKind, AttackPlan};
use crate::damage::DamageGraph;
use crate::defense::DefensePlan;
use crate::graph::{Graph, NodeId, NodePair};
use crate::loss::{total_loss, LossParams};
use crate::metrics::{similarity, MetricKind};
use crate::scenario::TargetSet;
use crate::{Error, Result};

const ATTACK_GUARD: usize = 20;
const DEFENSE_GUARD: usize = 16;
const GADGET_GUARD: usize = 8;

#[derive(Clone, Debug)]
pub struct ExactAttackResult {
    pub min_similarity: f64,
    /// Every deletion set attaining the minimum similarity, in ascending
    /// subset order over the sorted candidate edges.
    pub optimal_plans: Vec<AttackPlan>,
    /// The minimizer with the lowest exact post-attack loss (follower
    /// tie-break in the leader's favor); first in subset order on ties.
    pub defender_favorite: AttackPlan,
}

/// Enumerates all deletion subsets of unprotected tuple edges around
/// `h_a` up to size `k_a`, scoring each by exact similarity and exact
/// loss (no additivity assumption).
pub fn brute_attack(
    g: &Graph,
    h_a: NodePair,
    plan: &DefensePlan,
    m: MetricKind,
    k_a: usize,
    targets: &TargetSet,
    p: &LossParams,
) -> Result<ExactAttackResult> {
    let common = g.common_neighbors(h_a.a(), h_a.b())?;
    let mut candidates = Vec::new();
    for &w in &common {
        for end in [h_a.a(), h_a.b()] {
            let e = NodePair::new(end, w)?;
            if !plan.contains(e) {
                candidates.push(e);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    if candidates.len() > ATTACK_GUARD {
        return Err(Error::GuardExceeded(format!(
            "{} deletable edges exceeds the enumeration guard of {ATTACK_GUARD}",
            candidates.len()
        )));
    }

    let mut min_sim = f64::INFINITY;
    let mut minimizers: Vec<(u32, Vec<NodePair>)> = Vec::new();
    for mask in 0u32..1 << candidates.len() {
        if mask.count_ones() as usize > k_a {
            continue;
        }
        let subset: Vec<NodePair> = (0..candidates.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| candidates[i])
            .collect();
        let g2 = g.delete_edges(&subset);
        let sim = similarity(m, &g2, h_a.a(), h_a.b())?;
        if sim < min_sim - 1e-12 {
            min_sim = sim;
            minimizers.clear();
        }
        if sim <= min_sim + 1e-12 {
            min_sim = min_sim.min(sim);
            minimizers.push((mask, subset));
        }
    }

    let mut best_loss = f64::INFINITY;
    let mut favorite = None;
    for (_, subset) in &minimizers {
        let g2 = g.delete_edges(subset);
        let loss = total_loss(&g2, targets, m, p)?;
        if loss < best_loss - 1e-15 {
            best_loss = loss;
            favorite = Some(subset.clone());
        }
    }
    let to_plan = |subset: &[NodePair]| {
        AttackPlan::new(subset.iter().copied().collect(), AttackKind::LinkDel)
    };
    Ok(ExactAttackResult {
        min_similarity: min_sim,
        optimal_plans: minimizers.iter().map(|(_, s)| to_plan(s)).collect(),
        defender_favorite: to_plan(&favorite.expect("empty subset always enumerated")),
    })
}

#[derive(Clone, Copy, Debug)]
pub enum BruteAttacker<'a> {
    /// Follower response under the additive-damage model: each
    /// unprotected critical tuple contributes its cheaper side.
    Prop1,
    /// Exact follower: full enumeration with true loss per sample.
    Exact {
        samples: &'a [crate::scenario::AttackerTypeSample],
        m: MetricKind,
        k_a: usize,
        p: &'a LossParams,
    },
}

/// Enumerates every protected set of at most `k_d` candidate edges and
/// simulates the attacker response per sample; returns the plan with the
/// smallest total objective (ties: first in ascending subset order over
/// the sorted candidates).
pub fn brute_defense(
    dgs: &[DamageGraph],
    k_d: usize,
    attacker: BruteAttacker<'_>,
) -> Result<(DefensePlan, f64)> {
    let mut candidate_set = BTreeSet::new();
    for dg in dgs {
        for t in &dg.tuples {
            candidate_set.insert(dg.edge1(t));
            candidate_set.insert(dg.edge2(t));
        }
    }
    let candidates: Vec<NodePair> = candidate_set.into_iter().collect();
    if candidates.len() > DEFENSE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "{} candidate edges exceeds the enumeration guard of {DEFENSE_GUARD}",
            candidates.len()
        )));
    }

    let mut best: Option<(f64, DefensePlan)> = None;
    for mask in 0u32..1 << candidates.len() {
        if mask.count_ones() as usize > k_d {
            continue;
        }
        let protected: BTreeSet<NodePair> = (0..candidates.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| candidates[i])
            .collect();
        let plan = DefensePlan::new(protected, k_d);
        let objective = match attacker {
            BruteAttacker::Prop1 => dgs
                .iter()
                .map(|dg| prop1_objective(dg, &plan))
                .sum::<f64>(),
            BruteAttacker::Exact { samples, m, k_a, p } => {
                let mut total = 0.0;
                for s in samples {
                    let res = brute_attack(&s.graph, s.h_a, &plan, m, k_a, &s.targets, p)?;
                    let g2 = s.graph.delete_edges(res.defender_favorite.deletions());
                    total += total_loss(&g2, &s.targets, m, p)?;
                }
                total
            }
        };
        let better = match &best {
            None => true,
            Some((obj, _)) => objective < obj - 1e-15,
        };
        if better {
            best = Some((objective, plan));
        }
    }
    let (obj, plan) = best.expect("empty set is always feasible");
    Ok((plan, obj))
}

fn prop1_objective(dg: &DamageGraph, plan: &DefensePlan) -> f64 {
    dg.tuples
        .iter()
        .map(|t| {
            let p1 = plan.contains(dg.edge1(t));
            let p2 = plan.contains(dg.edge2(t));
            match (p1, p2) {
                (true, true) => 0.0,
                (true, false) => t.c2,
                (false, true) => t.c1,
                (false, false) => t.c_min(),
            }
        })
        .sum()
}

/// A MaxCut instance lifted into the attacker's problem: two extra
/// nodes, each attached to every base node, with the base's edge set
/// mirrored as the protected pair list. The lifted graph carries only
/// the attachment edges — the base edges would add partition-independent
/// common neighbors and break the correspondence.
#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub base: Graph,
    pub lifted: Graph,
    pub h_d: Vec<NodePair>,
    pub v1: NodeId,
    pub v2: NodeId,
}

pub fn gadget_from_graph(base: &Graph) -> Result<GadgetInstance> {
    let n = base.num_nodes();
    if n > GADGET_GUARD {
        return Err(Error::GuardExceeded(format!(
            "base has {n} nodes, gadget guard is {GADGET_GUARD}"
        )));
    }
    let v1 = n as NodeId;
    let v2 = n as NodeId + 1;
    let mut edges = Vec::with_capacity(2 * n);
    for u in 0..n as NodeId {
        edges.push((u, v1));
        edges.push((u, v2));
    }
    let lifted = Graph::from_edges(n + 2, &edges)?;
    let h_d = base.edges();
    Ok(GadgetInstance {
        base: base.clone(),
        lifted,
        h_d,
        v1,
        v2,
    })
}

/// Enumerates every side assignment of the base nodes. Each assignment
/// deletes one attachment edge per node; the score is the total CN
/// similarity over the mirrored pairs. Independently enumerates MaxCut
/// on the base; the two optima must satisfy min_score = |E| - maxcut.
pub fn verify_gadget(inst: &GadgetInstance) -> Result<(f64, usize, bool)> {
    let n = inst.base.num_nodes();
    if n > GADGET_GUARD {
        return Err(Error::GuardExceeded(format!(
            "base has {n} nodes, gadget guard is {GADGET_GUARD}"
        )));
    }
    let mut min_score = f64::INFINITY;
    for mask in 0u32..1 << n {
        let deletions: Vec<NodePair> = (0..n as NodeId)
            .map(|u| {
                let keep_v1 = mask >> u & 1 == 1;
                NodePair::new(u, if keep_v1 { inst.v2 } else { inst.v1 })
            })
            .collect::<Result<_>>()?;
        let g2 = inst.lifted.delete_edges(&deletions);
        let mut score = 0.0;
        for pair in &inst.h_d {
            score += similarity(MetricKind::CommonNeighbors, &g2, pair.a(), pair.b())?;
        }
        min_score = min_score.min(score);
    }
    if inst.h_d.is_empty() {
        min_score = 0.0;
    }

    let mut maxcut = 0usize;
    for mask in 0u32..1 << n {
        let cut = inst
            .h_d
            .iter()
            .filter(|p| (mask >> p.a() & 1) != (mask >> p.b() & 1))
            .count();
        maxcut = maxcut.max(cut);
    }
    let expected = (inst.h_d.len() - maxcut) as f64;
    let consistent = (min_score - expected).abs() < 1e-9;
    Ok((min_score, maxcut, consistent))
}
