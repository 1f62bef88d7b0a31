//! The three attack methods over a damage graph. LinkDel implements the
//! similarity-minimizing best response with defender-favorable
//! tie-breaking; the other two are the randomized baselines.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::damage::{DamageGraph, DamageTuple};
use crate::graph::NodePair;
use crate::metrics::{ratio_value, MetricClass, MetricKind};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    LinkDel,
    #[serde(rename = "unbiaseddel")]
    UnbiasedDel,
    #[serde(rename = "randdel")]
    RandDel,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::LinkDel => "linkdel",
            AttackKind::UnbiasedDel => "unbiaseddel",
            AttackKind::RandDel => "randdel",
        }
    }

    pub fn parse(s: &str) -> Result<AttackKind> {
        [AttackKind::LinkDel, AttackKind::UnbiasedDel, AttackKind::RandDel]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown attack '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub struct AttackPlan {
    deletions: BTreeSet<NodePair>,
    pub kind: AttackKind,
}

impl AttackPlan {
    pub fn new(deletions: BTreeSet<NodePair>, kind: AttackKind) -> AttackPlan {
        AttackPlan { deletions, kind }
    }

    pub fn deletions(&self) -> impl Iterator<Item = &NodePair> {
        self.deletions.iter()
    }

    pub fn deletion_set(&self) -> &BTreeSet<NodePair> {
        &self.deletions
    }

    pub fn len(&self) -> usize {
        self.deletions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deletions.is_empty()
    }
}

/// Split of the critical-tuple deletions between the two attack endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PartitionCounts {
    pub k1: usize,
    pub k2: usize,
}

/// Chooses (k1*, k2*) for an asymmetric metric by enumerating every split
/// of the critical deletions and minimizing the post-attack similarity of
/// the hidden link. `d1`/`d2` are the endpoint degrees net of forced
/// deletions; ties resolve to the smallest k1.
pub fn optimal_partition_counts(
    m: MetricKind,
    d1: usize,
    d2: usize,
    n_common: usize,
    n_surviving_common: usize,
    ka_prime: usize,
) -> PartitionCounts {
    assert_eq!(m.class(), MetricClass::Asymmetric);
    assert!(ka_prime <= n_common);
    let mut best = PartitionCounts { k1: 0, k2: ka_prime };
    let mut best_val = f64::INFINITY;
    for k1 in 0..=ka_prime {
        let k2 = ka_prime - k1;
        // every critical edge is incident to its endpoint, so the degree
        // never underflows
        assert!(d1 >= k1 && d2 >= k2);
        let val = ratio_value(
            m,
            n_surviving_common as f64,
            (d1 - k1) as f64,
            (d2 - k2) as f64,
        );
        if val < best_val {
            best_val = val;
            best = PartitionCounts { k1, k2 };
        }
    }
    best
}

fn deletable(t: &DamageTuple) -> bool {
    !(t.prot1 && t.prot2)
}

/// The similarity-minimizing attack with defender-favorable tie-breaking.
/// Requires the strong-attacker budget: k_A at least the number of tuples
/// with a deletable edge.
pub fn linkdel(dg: &DamageGraph, m: MetricKind, k_a: usize) -> Result<AttackPlan> {
    let required = dg.tuples.iter().filter(|t| deletable(t)).count();
    if k_a < required {
        return Err(Error::UnsupportedBudget { k_a, required });
    }
    let mut deletions = BTreeSet::new();
    let mut forced1 = 0usize;
    let mut forced2 = 0usize;
    let mut critical: Vec<&DamageTuple> = Vec::new();
    let mut surviving = 0usize;
    for t in &dg.tuples {
        match (t.prot1, t.prot2) {
            (true, true) => surviving += 1,
            (true, false) => {
                deletions.insert(dg.edge2(t));
                forced2 += 1;
            }
            (false, true) => {
                deletions.insert(dg.edge1(t));
                forced1 += 1;
            }
            (false, false) => critical.push(t),
        }
    }
    match m.class() {
        MetricClass::Symmetric => {
            for t in critical {
                // smaller damage wins; ties go to the V1 side
                if t.c1 <= t.c2 {
                    deletions.insert(dg.edge1(t));
                } else {
                    deletions.insert(dg.edge2(t));
                }
            }
        }
        MetricClass::Asymmetric => {
            let ka_prime = critical.len();
            let d1 = dg.d1 - forced1;
            let d2 = dg.d2 - forced2;
            critical.sort_by(|a, b| {
                (a.c1 - a.c2)
                    .total_cmp(&(b.c1 - b.c2))
                    .then(a.w.cmp(&b.w))
            });
            // damage of assigning the i smallest (c1 - c2) tuples to the
            // V1 side and the rest to V2
            let mut damage_at = Vec::with_capacity(ka_prime + 1);
            let base: f64 = critical.iter().map(|t| t.c2).sum();
            let mut acc = base;
            damage_at.push(acc);
            for t in &critical {
                acc += t.c1 - t.c2;
                damage_at.push(acc);
            }
            // several split sizes can tie on the post-attack similarity;
            // the follower then picks the split cheapest for the leader
            // (ties: smallest k1)
            let mut best_val = f64::INFINITY;
            for k1 in 0..=ka_prime {
                let k2 = ka_prime - k1;
                let val =
                    ratio_value(m, surviving as f64, (d1 - k1) as f64, (d2 - k2) as f64);
                best_val = best_val.min(val);
            }
            let mut k1_star = 0;
            let mut best_damage = f64::INFINITY;
            for k1 in 0..=ka_prime {
                let k2 = ka_prime - k1;
                let val =
                    ratio_value(m, surviving as f64, (d1 - k1) as f64, (d2 - k2) as f64);
                if val == best_val && damage_at[k1] < best_damage {
                    best_damage = damage_at[k1];
                    k1_star = k1;
                }
            }
            for (i, t) in critical.into_iter().enumerate() {
                if i < k1_star {
                    deletions.insert(dg.edge1(t));
                } else {
                    deletions.insert(dg.edge2(t));
                }
            }
        }
    }
    Ok(AttackPlan::new(deletions, AttackKind::LinkDel))
}

/// Per critical tuple, deletes one side uniformly at random; one-protected
/// tuples lose their unprotected edge. One coin is drawn per tuple
/// regardless of protection so that runs with different defense plans
/// share the same coin sequence.
pub fn unbiased_del(dg: &DamageGraph, rng: &mut impl Rng) -> AttackPlan {
    let mut deletions = BTreeSet::new();
    for t in &dg.tuples {
        let v1_side = rng.gen_bool(0.5);
        match (t.prot1, t.prot2) {
            (true, true) => {}
            (true, false) => {
                deletions.insert(dg.edge2(t));
            }
            (false, true) => {
                deletions.insert(dg.edge1(t));
            }
            (false, false) => {
                deletions.insert(if v1_side { dg.edge1(t) } else { dg.edge2(t) });
            }
        }
    }
    AttackPlan::new(deletions, AttackKind::UnbiasedDel)
}

/// Independent coin per unprotected tuple edge; both edges of a tuple may
/// fall. Coins are drawn for every edge regardless of protection, again
/// for common-random-number alignment across plans.
pub fn rand_del(dg: &DamageGraph, p: f64, rng: &mut impl Rng) -> AttackPlan {
    let mut deletions = BTreeSet::new();
    for t in &dg.tuples {
        let coin1 = rng.gen_bool(p);
        let coin2 = rng.gen_bool(p);
        if !t.prot1 && coin1 {
            deletions.insert(dg.edge1(t));
        }
        if !t.prot2 && coin2 {
            deletions.insert(dg.edge2(t));
        }
    }
    AttackPlan::new(deletions, AttackKind::RandDel)
}
