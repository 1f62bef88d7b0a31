//! Defender-side planners: exact program solve, damage ranking, and a
//! uniform-protection baseline.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::damage::DamageGraph;
use crate::graph::{Graph, NodeId, NodePair};
use crate::ilp::{self, SolveLimits, Status};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefenseKind {
    IdOpt,
    IdRank,
    Ppn,
}

impl DefenseKind {
    pub const ALL: [DefenseKind; 3] = [DefenseKind::IdOpt, DefenseKind::IdRank, DefenseKind::Ppn];

    pub fn name(self) -> &'static str {
        match self {
            DefenseKind::IdOpt => "idopt",
            DefenseKind::IdRank => "idrank",
            DefenseKind::Ppn => "ppn",
        }
    }

    pub fn parse(s: &str) -> Result<DefenseKind> {
        DefenseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown defense `{s}`")))
    }
}

/// A set of protected edges. Protected edges cannot be deleted by any
/// attack.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefensePlan {
    protected: BTreeSet<NodePair>,
    budget: usize,
}

impl DefensePlan {
    pub fn new(protected: BTreeSet<NodePair>, budget: usize) -> DefensePlan {
        debug_assert!(protected.len() <= budget);
        DefensePlan { protected, budget }
    }

    pub fn empty() -> DefensePlan {
        DefensePlan {
            protected: BTreeSet::new(),
            budget: 0,
        }
    }

    pub fn contains(&self, pair: NodePair) -> bool {
        self.protected.contains(&pair)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn protected(&self) -> impl Iterator<Item = NodePair> + '_ {
        self.protected.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.protected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.protected.is_empty()
    }

    pub fn to_edge_list(&self) -> Vec<(NodeId, NodeId)> {
        self.protected.iter().map(|p| (p.a(), p.b())).collect()
    }
}

/// Edges with exactly one endpoint inside the protected node set
/// (ids `0..vd_size`). These are the only edges an attack can remove
/// without a protection decision being able to stop both sides.
pub fn critical_edges(g: &Graph, vd_size: usize) -> Vec<NodePair> {
    g.edges()
        .into_iter()
        .filter(|p| ((p.a() as usize) < vd_size) != ((p.b() as usize) < vd_size))
        .collect()
}

pub struct IdOptResult {
    pub plan: DefensePlan,
    pub status: Status,
    pub objective: f64,
}

/// Minimizes total expected damage over the sampled attacker types by
/// exact search on the pairwise binary program, warm-started from the
/// ranking plan.
pub fn idopt(dgs: &[DamageGraph], k_d: usize, limits: SolveLimits) -> IdOptResult {
    let (prog, keys) = ilp::from_damage_graphs(dgs, k_d);
    let rank_plan = idrank(dgs, k_d);
    let rank_seed: Vec<bool> = keys.iter().map(|p| rank_plan.contains(*p)).collect();
    let pair_plan = pair_cover(dgs, k_d);
    let pair_seed: Vec<bool> = keys.iter().map(|p| pair_plan.contains(p)).collect();
    let sol = ilp::solve_with_seeds(&prog, limits, &[rank_seed, pair_seed]);
    let protected: BTreeSet<NodePair> = keys
        .iter()
        .zip(&sol.assignment)
        .filter(|(_, &on)| on)
        .map(|(&p, _)| p)
        .collect();
    IdOptResult {
        plan: DefensePlan::new(protected, k_d),
        status: sol.status,
        objective: sol.objective,
    }
}

/// Greedy whole-tuple cover used to warm-start the exact search:
/// protecting a single edge only redirects the attacker to the other side
/// of the tuple, so the damage model rewards covering both edges. Edge
/// pairs are ranked by their pooled positive minimum cost and taken while
/// the budget allows, counting only newly protected edges.
fn pair_cover(dgs: &[DamageGraph], k_d: usize) -> BTreeSet<NodePair> {
    let mut credit: std::collections::BTreeMap<(NodePair, NodePair), f64> =
        std::collections::BTreeMap::new();
    for dg in dgs {
        for t in &dg.tuples {
            let cm = t.c_min();
            if cm > 0.0 {
                *credit.entry((dg.edge1(t), dg.edge2(t))).or_insert(0.0) += cm;
            }
        }
    }
    let mut ranked: Vec<((NodePair, NodePair), f64)> = credit.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut chosen = BTreeSet::new();
    for ((e1, e2), _) in ranked {
        let need = !chosen.contains(&e1) as usize + !chosen.contains(&e2) as usize;
        if chosen.len() + need <= k_d {
            chosen.insert(e1);
            chosen.insert(e2);
        }
    }
    chosen
}

/// Ranking heuristic: every critical tuple credits its positive minimum
/// cost to both of its edges; the `k_d` highest-credit edges are
/// protected. Ties break toward the smaller canonical pair.
pub fn idrank(dgs: &[DamageGraph], k_d: usize) -> DefensePlan {
    let mut credit: std::collections::BTreeMap<NodePair, f64> = std::collections::BTreeMap::new();
    for dg in dgs {
        for t in &dg.tuples {
            credit.entry(dg.edge1(t)).or_insert(0.0);
            credit.entry(dg.edge2(t)).or_insert(0.0);
            let cm = t.c_min();
            if cm > 0.0 {
                *credit.get_mut(&dg.edge1(t)).unwrap() += cm;
                *credit.get_mut(&dg.edge2(t)).unwrap() += cm;
            }
        }
    }
    let mut ranked: Vec<(NodePair, f64)> = credit.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let protected: BTreeSet<NodePair> = ranked.into_iter().take(k_d).map(|(p, _)| p).collect();
    DefensePlan::new(protected, k_d)
}

/// Baseline: protect `k_d` critical edges chosen uniformly at random.
pub fn ppn(g: &Graph, vd_size: usize, k_d: usize, rng: &mut impl Rng) -> DefensePlan {
    let candidates = critical_edges(g, vd_size);
    let take = k_d.min(candidates.len());
    let idx = rand::seq::index::sample(rng, candidates.len(), take);
    let protected: BTreeSet<NodePair> = idx.into_iter().map(|i| candidates[i]).collect();
    DefensePlan::new(protected, k_d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damage::DamageTuple;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dg(v1: NodeId, v2: NodeId, tuples: Vec<(NodeId, f64, f64)>) -> DamageGraph {
        DamageGraph {
            v1,
            v2,
            tuples: tuples
                .into_iter()
                .map(|(w, c1, c2)| DamageTuple {
                    w,
                    c1,
                    c2,
                    prot1: false,
                    prot2: false,
                })
                .collect(),
            sample_index: 0,
            d1: 10,
            d2: 10,
        }
    }

    fn pair(a: NodeId, b: NodeId) -> NodePair {
        NodePair::new(a, b).unwrap()
    }

    #[test]
    fn critical_edges_split_on_boundary() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let crits = critical_edges(&g, 2);
        assert_eq!(crits, vec![pair(0, 2), pair(1, 3)]);
        assert!(critical_edges(&g, 0).is_empty());
        assert!(critical_edges(&g, 4).is_empty());
    }

    #[test]
    fn idrank_credits_positive_minima_to_both_sides() {
        // tuple (w=2): c_min = 3 credits edges (0,2) and (1,2)
        // tuple (w=3): c_min = -1 credits nothing
        let d = dg(0, 1, vec![(2, 3.0, 5.0), (3, -1.0, 4.0)]);
        let plan = idrank(&[d], 2);
        assert!(plan.contains(pair(0, 2)));
        assert!(plan.contains(pair(1, 2)));
        assert_eq!(plan.len(), 2);
    }

    #[test]
    fn idrank_tie_breaks_to_smaller_pair() {
        let d = dg(0, 1, vec![(2, 1.0, 1.0), (3, 1.0, 1.0)]);
        // all four edges credited 1.0; the two smallest pairs win
        let plan = idrank(&[d], 2);
        assert!(plan.contains(pair(0, 2)));
        assert!(plan.contains(pair(0, 3)));
    }

    #[test]
    fn idopt_covers_single_tuple() {
        // protecting both edges of the only tuple kills all damage
        let d = dg(0, 1, vec![(2, 4.0, 4.0)]);
        let res = idopt(&[d], 2, SolveLimits::default());
        assert_eq!(res.status, Status::Optimal);
        assert_eq!(res.objective, 0.0);
        assert!(res.plan.contains(pair(0, 2)) && res.plan.contains(pair(1, 2)));
    }

    #[test]
    fn idopt_beats_idrank_on_coupled_instance() {
        // ranking spreads credit across two tuples, but the budget of 2
        // only fully covers one; the exact solver picks the cover.
        let d = dg(
            0,
            1,
            vec![(2, 10.0, 10.0), (3, 9.0, 9.0), (4, 8.0, 8.0)],
        );
        let res = idopt(&[d.clone()], 2, SolveLimits::default());
        let rank = idrank(&[d.clone()], 2);
        let eval = |plan: &DefensePlan| {
            d.tuples
                .iter()
                .map(|t| {
                    let p1 = plan.contains(d.edge1(t));
                    let p2 = plan.contains(d.edge2(t));
                    match (p1, p2) {
                        (true, true) => 0.0,
                        (true, false) => t.c2,
                        (false, true) => t.c1,
                        (false, false) => t.c_min(),
                    }
                })
                .sum::<f64>()
        };
        assert!(res.objective <= eval(&rank) + 1e-12);
        assert!((res.objective - eval(&res.plan)).abs() < 1e-12);
        // covering the w=2 tuple saves 10, any split saves at most 9+8 over minima... check exact:
        // no-protection objective = 10+9+8 = 27; best with k=2 covers w=2 -> 9+8=17
        assert!((res.objective - 17.0).abs() < 1e-12);
    }

    #[test]
    fn ppn_respects_budget_and_candidates() {
        let g = Graph::from_edges(6, &[(0, 3), (1, 4), (2, 5), (0, 1), (3, 4)]).unwrap();
        let crits = critical_edges(&g, 3);
        assert_eq!(crits.len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let plan = ppn(&g, 3, 2, &mut rng);
        assert_eq!(plan.len(), 2);
        for p in plan.protected() {
            assert!(crits.contains(&p));
        }
        // budget larger than candidate pool protects everything available
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let all = ppn(&g, 3, 10, &mut rng);
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn ppn_is_uniform() {
        let g = Graph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 8000;
        for _ in 0..trials {
            let plan = ppn(&g, 2, 1, &mut rng);
            let p = plan.protected().next().unwrap();
            *counts.entry(p).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4);
        for &c in counts.values() {
            let frac = c as f64 / trials as f64;
            assert!((frac - 0.25).abs() < 0.03, "frac {frac}");
        }
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in DefenseKind::ALL {
            assert_eq!(DefenseKind::parse(k.name()).unwrap(), k);
        }
        assert!(DefenseKind::parse("nothing").is_err());
    }
}
