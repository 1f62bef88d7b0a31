//! Exact 0-1 solver for the defense program: linear objective plus
//! pairwise products of binaries under a single cardinality constraint.
//!
//! Branch-and-bound specialized to this structure. The node bound drops
//! the budget and treats every term independently, which relaxes the
//! feasible set and therefore never overestimates the minimum; branching
//! enforces the budget exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::damage::DamageGraph;
use crate::graph::NodePair;

#[derive(Clone, Debug)]
pub struct BinaryProgram {
    pub num_vars: usize,
    pub constant: f64,
    /// Linear coefficient per variable.
    pub linear: Vec<f64>,
    /// Pairwise product terms, keys canonical (i < j), merged.
    pub pairs: Vec<(usize, usize, f64)>,
    pub budget: usize,
}

impl BinaryProgram {
    pub fn evaluate(&self, assignment: &[bool]) -> f64 {
        let mut obj = self.constant;
        for (i, &c) in self.linear.iter().enumerate() {
            if assignment[i] {
                obj += c;
            }
        }
        for &(i, j, c) in &self.pairs {
            if assignment[i] && assignment[j] {
                obj += c;
            }
        }
        obj
    }

    /// Dump format for offline cross-checks with external MILP tools.
    pub fn to_json(&self) -> serde_json::Value {
        let linear: serde_json::Map<String, serde_json::Value> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i.to_string(), c.into()))
            .collect();
        let pairs: serde_json::Map<String, serde_json::Value> = self
            .pairs
            .iter()
            .map(|&(i, j, c)| (format!("{i},{j}"), c.into()))
            .collect();
        serde_json::json!({
            "constant": self.constant,
            "linear": linear,
            "pairs": pairs,
            "budget": self.budget,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Status {
    Optimal,
    /// Search limits hit; `gap` bounds the distance to the true optimum.
    Incumbent { gap: f64 },
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub assignment: Vec<bool>,
    pub objective: f64,
    pub status: Status,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveLimits {
    pub max_nodes: Option<u64>,
    pub time: Option<Duration>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_nodes: None,
            time: None,
        }
    }
}

/// Expands the per-tuple expected-damage cost
///   c2*x1*(1-x2) + c1*(1-x1)*x2 + min(c1,c2)*(1-x1)*(1-x2)
/// into constant + linear + pairwise terms over deduplicated edge
/// variables. Returns the program together with the variable key list
/// (canonical pairs, ascending; index = variable id).
pub fn from_damage_graphs(dgs: &[DamageGraph], k_d: usize) -> (BinaryProgram, Vec<NodePair>) {
    let mut keys = BTreeSet::new();
    for dg in dgs {
        for t in &dg.tuples {
            debug_assert!(!t.prot1 && !t.prot2, "programs are built pre-protection");
            keys.insert(dg.edge1(t));
            keys.insert(dg.edge2(t));
        }
    }
    let keys: Vec<NodePair> = keys.into_iter().collect();
    let index: BTreeMap<NodePair, usize> = keys
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut constant = 0.0;
    let mut linear = vec![0.0; keys.len()];
    let mut pair_coefs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for dg in dgs {
        for t in &dg.tuples {
            let x1 = index[&dg.edge1(t)];
            let x2 = index[&dg.edge2(t)];
            let cm = t.c_min();
            constant += cm;
            linear[x1] += t.c2 - cm;
            linear[x2] += t.c1 - cm;
            let key = (x1.min(x2), x1.max(x2));
            *pair_coefs.entry(key).or_insert(0.0) += cm - t.c1 - t.c2;
        }
    }
    let pairs = pair_coefs
        .into_iter()
        .map(|((i, j), c)| (i, j, c))
        .collect();
    (
        BinaryProgram {
            num_vars: keys.len(),
            constant,
            linear,
            pairs,
            budget: k_d,
        },
        keys,
    )
}

pub fn solve(prog: &BinaryProgram, limits: SolveLimits) -> Solution {
    solve_with_seeds(prog, limits, &[])
}

/// Greedy hill climbing over single flips and budget-preserving swaps,
/// used to polish warm starts before the exact search. `marginal[i]` holds
/// the objective change of switching variable `i` on (negated when it is
/// already on).
fn local_improve(prog: &BinaryProgram, mut x: Vec<bool>) -> Vec<bool> {
    const EPS: f64 = 1e-9;
    const MAX_MOVES: usize = 100_000;
    let n = prog.num_vars;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, c) in &prog.pairs {
        adj[i].push((j, c));
        adj[j].push((i, c));
    }
    let mut marginal = prog.linear.clone();
    for i in 0..n {
        if x[i] {
            for &(j, c) in &adj[i] {
                marginal[j] += c;
            }
        }
    }
    let mut used = x.iter().filter(|&&b| b).count();
    let flip = |i: usize, x: &mut Vec<bool>, marginal: &mut Vec<f64>| {
        let delta = if x[i] { -1.0 } else { 1.0 };
        x[i] = !x[i];
        for &(j, c) in &adj[i] {
            marginal[j] += delta * c;
        }
    };
    for _ in 0..MAX_MOVES {
        // best single flip: turning i on costs marginal[i], turning it off
        // gains marginal[i]
        let mut best: Option<(f64, usize, Option<usize>)> = None;
        for i in 0..n {
            let gain = if x[i] {
                -marginal[i]
            } else if used < prog.budget {
                marginal[i]
            } else {
                continue;
            };
            if gain < -EPS && best.map_or(true, |(g, _, _)| gain < g) {
                best = Some((gain, i, None));
            }
        }
        // joint additions along coupled pairs: a profitable cover of both
        // endpoints can hide behind two individually harmful flips
        let mut best_pair: Option<(f64, usize, usize)> = None;
        if used + 2 <= prog.budget {
            for &(i, j, c) in &prog.pairs {
                if x[i] || x[j] {
                    continue;
                }
                let gain = marginal[i] + marginal[j] + c;
                if gain < -EPS && best_pair.map_or(true, |(g, _, _)| gain < g) {
                    best_pair = Some((gain, i, j));
                }
            }
        }
        // budget-preserving swaps when the budget is saturated
        if used == prog.budget && prog.budget > 0 {
            for drop in 0..n {
                if !x[drop] {
                    continue;
                }
                for add in 0..n {
                    if x[add] {
                        continue;
                    }
                    let cross = adj[drop]
                        .iter()
                        .find(|&&(j, _)| j == add)
                        .map_or(0.0, |&(_, c)| c);
                    let gain = -marginal[drop] + marginal[add] - cross;
                    if gain < -EPS && best.map_or(true, |(g, _, _)| gain < g) {
                        best = Some((gain, add, Some(drop)));
                    }
                }
            }
        }
        let take_pair = match (best, best_pair) {
            (None, None) => break,
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (Some((g, _, _)), Some((gp, _, _))) => gp < g,
        };
        if take_pair {
            let (_, i, j) = best_pair.unwrap();
            flip(i, &mut x, &mut marginal);
            flip(j, &mut x, &mut marginal);
            used += 2;
        } else {
            let (_, i, dropped) = best.unwrap();
            if let Some(d) = dropped {
                flip(d, &mut x, &mut marginal);
                used -= 1;
            }
            flip(i, &mut x, &mut marginal);
            used = if x[i] { used + 1 } else { used - 1 };
        }
    }
    x
}

/// As `solve`, but warm-starts the incumbent from the given assignments
/// (infeasible seeds are skipped).
pub fn solve_with_seeds(
    prog: &BinaryProgram,
    limits: SolveLimits,
    seeds: &[Vec<bool>],
) -> Solution {
    let n = prog.num_vars;
    let zeros = local_improve(prog, vec![false; n]);
    let mut best_assignment = zeros.clone();
    let mut best_obj = prog.evaluate(&zeros);
    for seed in seeds {
        if seed.len() != n || seed.iter().filter(|&&b| b).count() > prog.budget {
            continue;
        }
        let improved = local_improve(prog, seed.clone());
        let obj = prog.evaluate(&improved);
        if obj < best_obj {
            best_obj = obj;
            best_assignment = improved;
        }
    }

    // static branch order: largest absolute coefficient mass first
    let mut mass = vec![0.0f64; n];
    for (i, &c) in prog.linear.iter().enumerate() {
        mass[i] += c.abs();
    }
    for &(i, j, c) in &prog.pairs {
        mass[i] += c.abs();
        mass[j] += c.abs();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mass[b].total_cmp(&mass[a]).then(a.cmp(&b)));

    // terms incident to each variable, for the leaf evaluation on budget
    // exhaustion we still evaluate the full program (cheap enough).
    let start = Instant::now();
    let root_bound = {
        let probe = Search {
            prog,
            order: order.clone(),
            fixed: vec![None; n],
            best_obj,
            best_assignment: Vec::new(),
            nodes: 0,
            limit_hit: false,
            limits,
            start,
        };
        probe.bound()
    };
    let mut state = Search {
        prog,
        order,
        fixed: vec![None; n],
        best_obj,
        best_assignment,
        nodes: 0,
        limit_hit: false,
        limits,
        start,
    };
    state.dfs(0, 0);

    let status = if state.limit_hit {
        Status::Incumbent {
            gap: state.best_obj - root_bound,
        }
    } else {
        Status::Optimal
    };
    Solution {
        assignment: state.best_assignment,
        objective: state.best_obj,
        status,
        nodes: state.nodes,
    }
}

struct Search<'a> {
    prog: &'a BinaryProgram,
    order: Vec<usize>,
    fixed: Vec<Option<bool>>,
    best_obj: f64,
    best_assignment: Vec<bool>,
    nodes: u64,
    limit_hit: bool,
    limits: SolveLimits,
    start: Instant,
}

impl Search<'_> {
    /// Valid lower bound for the current partial assignment: each term
    /// takes its minimum over completions independently, ignoring the
    /// budget.
    fn bound(&self) -> f64 {
        let mut b = self.prog.constant;
        for (i, &c) in self.prog.linear.iter().enumerate() {
            b += match self.fixed[i] {
                Some(true) => c,
                Some(false) => 0.0,
                None => c.min(0.0),
            };
        }
        for &(i, j, c) in &self.prog.pairs {
            b += match (self.fixed[i], self.fixed[j]) {
                (Some(false), _) | (_, Some(false)) => 0.0,
                (Some(true), Some(true)) => c,
                _ => c.min(0.0),
            };
        }
        b
    }

    fn record_leaf(&mut self) {
        let assignment: Vec<bool> = self.fixed.iter().map(|f| f.unwrap_or(false)).collect();
        let obj = self.prog.evaluate(&assignment);
        if obj < self.best_obj - 1e-15 {
            self.best_obj = obj;
            self.best_assignment = assignment;
        }
    }

    fn limits_exceeded(&self) -> bool {
        if let Some(max) = self.limits.max_nodes {
            if self.nodes >= max {
                return true;
            }
        }
        if let Some(t) = self.limits.time {
            // check occasionally; Instant::elapsed is not free
            if self.nodes % 1024 == 0 && self.start.elapsed() > t {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, depth: usize, ones: usize) {
        self.nodes += 1;
        if self.limit_hit {
            return;
        }
        if self.limits_exceeded() {
            self.limit_hit = true;
            return;
        }
        if self.bound() >= self.best_obj - 1e-12 {
            return;
        }
        if depth == self.order.len() || ones == self.prog.budget {
            self.record_leaf();
            return;
        }
        let var = self.order[depth];
        if ones < self.prog.budget {
            self.fixed[var] = Some(true);
            self.dfs(depth + 1, ones + 1);
        }
        self.fixed[var] = Some(false);
        self.dfs(depth + 1, ones);
        self.fixed[var] = None;
    }
}
