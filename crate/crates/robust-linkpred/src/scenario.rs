//! Random graph generation, subgraph sampling, target-set construction and
//! attacker-type sampling: the prior of the Bayesian game.

use std::path::PathBuf;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId, NodePair};
use crate::loss::ThetaSpec;
use crate::metrics::MetricKind;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSource {
    Ba {
        n: usize,
        m_attach: usize,
    },
    Powerlaw {
        n: usize,
        gamma: f64,
    },
    Edgelist {
        path: PathBuf,
        sample_size: usize,
        #[serde(default = "default_restart")]
        restart_prob: f64,
    },
}

fn default_restart() -> f64 {
    0.15
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioClass {
    Tca,
    Tsa,
    Rca,
    Rsa,
}

impl ScenarioClass {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioClass::Tca => "tca",
            ScenarioClass::Tsa => "tsa",
            ScenarioClass::Rca => "rca",
            ScenarioClass::Rsa => "rsa",
        }
    }

    /// Targeted classes draw the attacker's hidden link inside V_D.
    pub fn targeted(self) -> bool {
        matches!(self, ScenarioClass::Tca | ScenarioClass::Tsa)
    }

    pub fn vd_mode(self) -> VdMode {
        match self {
            ScenarioClass::Tca | ScenarioClass::Rca => VdMode::Clustering,
            ScenarioClass::Tsa | ScenarioClass::Rsa => VdMode::Sparse,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VdMode {
    /// V_D sampled uniformly from the top decile of nodes by degree.
    Clustering,
    /// V_D sampled uniformly from all nodes.
    Sparse,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LossConfig {
    pub beta: f64,
    pub theta: ThetaSpec,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            beta: 2.0,
            theta: ThetaSpec::Auto,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub source: GraphSource,
    pub scenario_class: ScenarioClass,
    pub vd_size: usize,
    pub seed: u64,
    #[serde(alias = "K")]
    pub num_planning_samples: usize,
    pub num_eval_attacks: usize,
    pub metric: MetricKind,
    #[serde(default)]
    pub loss: LossConfig,
    /// Budget points: values >= 1 are absolute k_D, values in (0,1) are
    /// fractions of the deduplicated candidate-edge universe.
    pub budgets: Vec<f64>,
    #[serde(default = "default_attacks")]
    pub attacks: Vec<crate::attack::AttackKind>,
    #[serde(default = "default_defenses")]
    pub defenses: Vec<crate::defense::DefenseKind>,
    #[serde(default = "default_randdel_p")]
    pub randdel_p: f64,
    /// Flips the damage sign convention for auditing; see the damage module.
    #[serde(default)]
    pub damage_sign_flipped: bool,
}

fn default_attacks() -> Vec<crate::attack::AttackKind> {
    vec![crate::attack::AttackKind::LinkDel]
}

fn default_defenses() -> Vec<crate::defense::DefenseKind> {
    use crate::defense::DefenseKind::*;
    vec![IdOpt, IdRank, Ppn]
}

fn default_randdel_p() -> f64 {
    0.5
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |path: &str, msg: String| Err(Error::Config {
            path: path.into(),
            msg,
        });
        match &self.source {
            GraphSource::Ba { n, m_attach } => {
                if *m_attach < 1 || *m_attach >= *n {
                    return err("source.m_attach", format!("need 1 <= m_attach < n, got {m_attach} / {n}"));
                }
            }
            GraphSource::Powerlaw { n, gamma } => {
                if *gamma <= 1.0 {
                    return err("source.gamma", format!("need gamma > 1, got {gamma}"));
                }
                if *n < 2 {
                    return err("source.n", format!("need n >= 2, got {n}"));
                }
            }
            GraphSource::Edgelist { restart_prob, .. } => {
                if !(*restart_prob > 0.0 && *restart_prob < 1.0) {
                    return err("source.restart_prob", format!("need restart_prob in (0,1), got {restart_prob}"));
                }
            }
        }
        if self.vd_size < 2 {
            return err("vd_size", format!("need vd_size >= 2, got {}", self.vd_size));
        }
        if self.num_planning_samples < 1 {
            return err("num_planning_samples", "need at least one planning sample".into());
        }
        if self.loss.beta <= 0.0 {
            return err("loss.beta", format!("need beta > 0, got {}", self.loss.beta));
        }
        if !(0.0..=1.0).contains(&self.randdel_p) {
            return err("randdel_p", format!("need p in [0,1], got {}", self.randdel_p));
        }
        Ok(())
    }
}

/// The analyst's target set over a sample graph: V_D occupies ids
/// 0..vd_size after relabeling, H_D is every pair within V_D, and labels
/// record edge/non-edge status in the sampled true graph.
#[derive(Clone, Debug)]
pub struct TargetSet {
    pub vd: Vec<NodeId>,
    pub pairs: Vec<NodePair>,
    pub labels: Vec<i8>,
}

impl TargetSet {
    pub fn from_graph(g: &Graph, vd: Vec<NodeId>) -> TargetSet {
        let mut pairs = Vec::new();
        for (i, &u) in vd.iter().enumerate() {
            for &v in &vd[i + 1..] {
                pairs.push(NodePair::new(u, v).unwrap());
            }
        }
        pairs.sort_unstable();
        let labels = pairs
            .iter()
            .map(|p| if g.contains_pair(*p) { 1 } else { -1 })
            .collect();
        TargetSet { vd, pairs, labels }
    }

    pub fn label(&self, p: NodePair) -> Option<i8> {
        self.pairs
            .binary_search(&p)
            .ok()
            .map(|i| self.labels[i])
    }
}

/// One attacker-type draw: sampled true network (relabeled so V_D is
/// 0..vd_size), its target set, and the link the attacker hides.
#[derive(Clone, Debug)]
pub struct AttackerTypeSample {
    pub graph: Graph,
    pub targets: TargetSet,
    pub h_a: NodePair,
    /// Set when the attacker's hidden link is itself a defender target pair.
    pub h_a_in_hd: bool,
}

/// Splitmix64-style seed derivation: reproducible per-sample generators
/// independent of execution order.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(index.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

pub fn rng_for(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

/// Barabasi-Albert preferential attachment: seed clique on m_attach+1
/// nodes, then each arriving node attaches to m_attach distinct existing
/// nodes with probability proportional to current degree.
pub fn gen_ba(n: usize, m_attach: usize, rng: &mut impl Rng) -> Result<Graph> {
    if m_attach < 1 || m_attach >= n {
        return Err(Error::InvalidArgument(format!(
            "gen_ba needs 1 <= m_attach < n, got m_attach={m_attach}, n={n}"
        )));
    }
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut pool: Vec<NodeId> = Vec::new();
    let seed = m_attach + 1;
    for u in 0..seed as NodeId {
        for v in (u + 1)..seed as NodeId {
            edges.push((u, v));
            pool.push(u);
            pool.push(v);
        }
    }
    for new in seed..n {
        let mut targets = std::collections::BTreeSet::new();
        while targets.len() < m_attach {
            targets.insert(pool[rng.gen_range(0..pool.len())]);
        }
        for &t in &targets {
            edges.push((new as NodeId, t));
            pool.push(new as NodeId);
            pool.push(t);
        }
    }
    Graph::from_edges(n, &edges)
}

/// Configuration model with a truncated power-law degree distribution
/// P(k) proportional to k^-gamma on k in [1, n-1]. The degree sum is
/// forced even by resampling one degree; stub matching discards
/// self-loops and multi-edges.
pub fn gen_powerlaw_config(n: usize, gamma: f64, rng: &mut impl Rng) -> Result<Graph> {
    if gamma <= 1.0 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "gen_powerlaw_config needs gamma > 1 and n >= 2, got gamma={gamma}, n={n}"
        )));
    }
    let kmax = (n - 1) as f64;
    // continuous truncated Pareto on [1, n-1] with density ~ x^-gamma,
    // floored to an integer degree
    let tail = 1.0 - kmax.powf(1.0 - gamma);
    let draw = |rng: &mut dyn RngCore| -> usize {
        let u: f64 = rng.gen_range(0.0..1.0);
        let x = (1.0 - u * tail).powf(1.0 / (1.0 - gamma));
        (x.floor() as usize).clamp(1, n - 1)
    };
    let mut degrees: Vec<usize> = (0..n).map(|_| draw(rng)).collect();
    let mut guard = 0;
    while degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[0] = draw(rng);
        guard += 1;
        if guard > 10_000 {
            degrees[0] += 1; // parity fixup; unreachable in practice
        }
    }
    let mut stubs: Vec<NodeId> = Vec::new();
    for (u, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(u as NodeId).take(d));
    }
    stubs.shuffle(rng);
    let mut edges = Vec::new();
    for pair in stubs.chunks_exact(2) {
        if pair[0] != pair[1] {
            edges.push((pair[0], pair[1]));
        }
    }
    // from_edges dedups multi-edges
    Graph::from_edges(n, &edges)
}

/// Random walk with restart from a random start on the largest component;
/// returns the induced subgraph on the first `target_n` distinct nodes
/// visited, ids compacted in visit order.
pub fn rw_sample(g: &Graph, target_n: usize, restart_prob: f64, rng: &mut impl Rng) -> Result<Graph> {
    if target_n > g.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "rw_sample target_n {} exceeds graph size {}",
            target_n,
            g.num_nodes()
        )));
    }
    if target_n == 0 {
        return Ok(Graph::empty(0));
    }
    let comp = g.largest_component();
    let step_limit = 100 * target_n;
    for _attempt in 0..10 {
        let start = comp[rng.gen_range(0..comp.len())];
        let mut visited: Vec<NodeId> = vec![start];
        let mut seen = std::collections::HashSet::from([start]);
        let mut cur = start;
        let mut since_new = 0usize;
        while visited.len() < target_n {
            if since_new > step_limit {
                break;
            }
            cur = if rng.gen_bool(restart_prob) || g.deg(cur) == 0 {
                start
            } else {
                let nbrs = g.neighbors(cur);
                nbrs[rng.gen_range(0..nbrs.len())]
            };
            since_new += 1;
            if seen.insert(cur) {
                visited.push(cur);
                since_new = 0;
            }
        }
        if visited.len() == target_n {
            return Ok(g.induced(&visited));
        }
    }
    Err(Error::Sampling(format!(
        "random walk stagnated before visiting {target_n} nodes"
    )))
}

/// Chooses V_D per mode and relabels the graph so the chosen nodes occupy
/// ids 0..size; remaining nodes keep their relative order. Returns the
/// relabeled graph with its target set.
pub fn assign_vd(
    g: &Graph,
    mode: VdMode,
    size: usize,
    rng: &mut impl Rng,
) -> Result<(Graph, TargetSet)> {
    let n = g.num_nodes();
    if size > n {
        return Err(Error::InvalidArgument(format!(
            "vd size {size} exceeds node count {n}"
        )));
    }
    let pool: Vec<NodeId> = match mode {
        VdMode::Clustering => {
            let decile = (n + 9) / 10;
            let pool_size = decile.max(size);
            let mut order: Vec<NodeId> = (0..n as NodeId).collect();
            order.sort_by_key(|&u| (std::cmp::Reverse(g.deg(u)), u));
            order.truncate(pool_size);
            order
        }
        VdMode::Sparse => (0..n as NodeId).collect(),
    };
    let chosen = match mode {
        // a uniform draw from the decile spreads V_D across weakly
        // interconnected mid-degree nodes; weighting by squared degree
        // concentrates it on the mutually connected core
        VdMode::Clustering => {
            let mut remaining = pool;
            let mut picked = Vec::with_capacity(size);
            while picked.len() < size {
                let weights: Vec<f64> = remaining
                    .iter()
                    .map(|&u| (g.deg(u) as f64).powi(2))
                    .collect();
                let total: f64 = weights.iter().sum();
                // all-zero degrees: fall back to the first pool entry
                let x = if total > 0.0 { rng.gen_range(0.0..total) } else { -1.0 };
                let mut acc = 0.0;
                let mut idx = remaining.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if x < acc {
                        idx = i;
                        break;
                    }
                }
                picked.push(remaining.swap_remove(idx));
            }
            picked.sort_unstable();
            picked
        }
        VdMode::Sparse => sample_without_replacement(&pool, size, rng),
    };
    let mut new_id = vec![u32::MAX; n];
    for (i, &u) in chosen.iter().enumerate() {
        new_id[u as usize] = i as NodeId;
    }
    let mut next = size as NodeId;
    for u in 0..n {
        if new_id[u] == u32::MAX {
            new_id[u] = next;
            next += 1;
        }
    }
    let relabeled = g.relabel(&new_id);
    let vd: Vec<NodeId> = (0..size as NodeId).collect();
    let targets = TargetSet::from_graph(&relabeled, vd);
    Ok((relabeled, targets))
}

fn sample_without_replacement(pool: &[NodeId], k: usize, rng: &mut impl Rng) -> Vec<NodeId> {
    let idx = rand::seq::index::sample(rng, pool.len(), k);
    let mut out: Vec<NodeId> = idx.iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    out
}

/// Draws graphs for a scenario config. Edge-list imports load the base
/// graph once and random-walk sample from it per draw.
pub struct Sampler {
    cfg: ScenarioConfig,
    base: Option<Graph>,
}

impl Sampler {
    pub fn new(cfg: &ScenarioConfig) -> Result<Sampler> {
        cfg.validate()?;
        let base = match &cfg.source {
            GraphSource::Edgelist { path, .. } => Some(crate::graph::load_edgelist(path)?.0),
            _ => None,
        };
        Ok(Sampler {
            cfg: cfg.clone(),
            base,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    fn draw_graph(&self, rng: &mut impl Rng) -> Result<Graph> {
        match &self.cfg.source {
            GraphSource::Ba { n, m_attach } => gen_ba(*n, *m_attach, rng),
            GraphSource::Powerlaw { n, gamma } => gen_powerlaw_config(*n, *gamma, rng),
            GraphSource::Edgelist {
                sample_size,
                restart_prob,
                ..
            } => rw_sample(
                self.base.as_ref().expect("base graph loaded"),
                *sample_size,
                *restart_prob,
                rng,
            ),
        }
    }

    /// One attacker-type sample from the generator state in `rng`.
    pub fn sample_attacker_type(&self, rng: &mut impl Rng) -> Result<AttackerTypeSample> {
        let cfg = &self.cfg;
        for _attempt in 0..50 {
            let raw = self.draw_graph(rng)?;
            let (graph, targets) =
                assign_vd(&raw, cfg.scenario_class.vd_mode(), cfg.vd_size, rng)?;
            let eligible: Vec<NodePair> = if cfg.scenario_class.targeted() {
                graph
                    .edges()
                    .into_iter()
                    .filter(|p| (p.b() as usize) < cfg.vd_size)
                    .collect()
            } else {
                graph.edges()
            };
            if eligible.is_empty() {
                continue;
            }
            let h_a = eligible[rng.gen_range(0..eligible.len())];
            let h_a_in_hd = targets.label(h_a).is_some();
            return Ok(AttackerTypeSample {
                graph,
                targets,
                h_a,
                h_a_in_hd,
            });
        }
        Err(Error::Sampling(
            "no eligible attacker target edge after 50 resamples".into(),
        ))
    }

    /// Deterministic indexed draw: sample `index` of the given stream.
    pub fn sample_indexed(&self, stream: u64, index: u64) -> Result<AttackerTypeSample> {
        let mut rng = rng_for(self.cfg.seed, stream, index);
        self.sample_attacker_type(&mut rng)
    }
}

/// Stream tags for derived seeds, one per independent draw family.
pub mod streams {
    pub const PLANNING: u64 = 1;
    pub const EVAL: u64 = 2;
    pub const PPN: u64 = 4;
    pub const ATTACK: u64 = 5;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ba_small_forced_structure() {
        let mut rng = rng_for(1, 0, 0);
        let g = gen_ba(3, 1, &mut rng).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 2);
        assert!(g.is_connected());
        assert!(gen_ba(3, 3, &mut rng).is_err());
    }

    #[test]
    fn ba_mean_degree_and_skew() {
        let mut skew_hits = 0;
        for seed in 0..20 {
            let mut rng = rng_for(seed, 0, 0);
            let g = gen_ba(500, 5, &mut rng).unwrap();
            assert!(g.is_connected());
            let mean = 2.0 * g.num_edges() as f64 / 500.0;
            assert!((mean - 10.0).abs() < 1.0, "mean degree {mean}");
            let max = (0..500u32).map(|u| g.deg(u)).max().unwrap() as f64;
            if max >= 3.0 * mean {
                skew_hits += 1;
            }
        }
        assert!(skew_hits >= 19, "right skew in only {skew_hits}/20 seeds");
    }

    #[test]
    fn powerlaw_mean_degree() {
        let mut means = Vec::new();
        for seed in 0..20 {
            let mut rng = rng_for(seed, 1, 0);
            let g = gen_powerlaw_config(500, 2.0, &mut rng).unwrap();
            assert_eq!(g.num_nodes(), 500);
            means.push(2.0 * g.num_edges() as f64 / 500.0);
        }
        let avg = means.iter().sum::<f64>() / means.len() as f64;
        assert!((avg - 5.0).abs() < 1.0, "average degree {avg}");
    }

    #[test]
    fn powerlaw_degenerate_gamma() {
        let mut rng = rng_for(7, 1, 0);
        let g = gen_powerlaw_config(200, 10.0, &mut rng).unwrap();
        let deg1 = (0..200u32).filter(|&u| g.deg(u) <= 1).count();
        assert!(deg1 > 180, "almost all degrees should be <= 1, got {deg1}");
        assert!(gen_powerlaw_config(200, 0.5, &mut rng).is_err());
    }

    #[test]
    fn rw_sample_contracts() {
        let mut rng = rng_for(3, 2, 0);
        let g = gen_ba(60, 3, &mut rng).unwrap();
        let full = rw_sample(&g, 60, 0.15, &mut rng).unwrap();
        assert_eq!(full.num_nodes(), 60);
        assert_eq!(full.num_edges(), g.num_edges());
        let single = rw_sample(&g, 1, 0.15, &mut rng).unwrap();
        assert_eq!(single.num_nodes(), 1);
        assert_eq!(single.num_edges(), 0);
        // sampler mostly produces one large component
        let mut ok = 0;
        for seed in 0..20 {
            let mut r = rng_for(seed, 2, 1);
            let big = gen_ba(300, 4, &mut r).unwrap();
            let sub = rw_sample(&big, 100, 0.15, &mut r).unwrap();
            if sub.largest_component().len() * 10 >= 9 * sub.num_nodes() {
                ok += 1;
            }
        }
        assert!(ok >= 19, "connected-ish in only {ok}/20 seeds");
    }

    #[test]
    fn rw_sample_stagnation_errors() {
        // two disconnected cliques; walk cannot leave the largest component
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let mut rng = rng_for(1, 2, 2);
        assert!(rw_sample(&g, 6, 0.15, &mut rng).is_err());
    }

    #[test]
    fn assign_vd_modes() {
        let mut rng = rng_for(5, 3, 0);
        let g = gen_ba(200, 4, &mut rng).unwrap();
        let mean = 2.0 * g.num_edges() as f64 / 200.0;
        let mut hits = 0;
        for seed in 0..20 {
            let mut r = rng_for(seed, 3, 1);
            let (g2, ts) = assign_vd(&g, VdMode::Clustering, 10, &mut r).unwrap();
            // relabeling preserves the degree multiset
            let mut d1: Vec<usize> = (0..200u32).map(|u| g.deg(u)).collect();
            let mut d2: Vec<usize> = (0..200u32).map(|u| g2.deg(u)).collect();
            d1.sort_unstable();
            d2.sort_unstable();
            assert_eq!(d1, d2);
            let vd_mean =
                ts.vd.iter().map(|&u| g2.deg(u)).sum::<usize>() as f64 / ts.vd.len() as f64;
            if vd_mean > mean {
                hits += 1;
            }
        }
        assert!(hits >= 19, "vd mean degree above graph mean in {hits}/20");
        // sparse with size = n covers everything
        let small = gen_ba(12, 2, &mut rng).unwrap();
        let (_, ts) = assign_vd(&small, VdMode::Sparse, 12, &mut rng).unwrap();
        assert_eq!(ts.vd.len(), 12);
        assert!(assign_vd(&small, VdMode::Sparse, 13, &mut rng).is_err());
    }

    #[test]
    fn hd_edge_fraction_at_paper_scale() {
        let mut fracs = Vec::new();
        for seed in 0..10 {
            let mut rng = rng_for(seed, 3, 2);
            let g = gen_ba(500, 5, &mut rng).unwrap();
            let (_, ts) = assign_vd(&g, VdMode::Clustering, 10, &mut rng).unwrap();
            let edges = ts.labels.iter().filter(|&&y| y == 1).count();
            fracs.push(edges as f64 / ts.labels.len() as f64);
        }
        let avg = fracs.iter().sum::<f64>() / fracs.len() as f64;
        assert!((0.3..=0.7).contains(&avg), "H_D edge fraction {avg}");
    }

    fn tca_config() -> ScenarioConfig {
        ScenarioConfig {
            source: GraphSource::Ba { n: 60, m_attach: 3 },
            scenario_class: ScenarioClass::Tca,
            vd_size: 6,
            seed: 9,
            num_planning_samples: 4,
            num_eval_attacks: 4,
            metric: MetricKind::CommonNeighbors,
            loss: LossConfig::default(),
            budgets: vec![2.0],
            attacks: default_attacks(),
            defenses: default_defenses(),
            randdel_p: 0.5,
            damage_sign_flipped: false,
        }
    }

    #[test]
    fn attacker_type_contracts() {
        let sampler = Sampler::new(&tca_config()).unwrap();
        for i in 0..10 {
            let s = sampler.sample_indexed(streams::PLANNING, i).unwrap();
            assert!(s.graph.contains_pair(s.h_a));
            assert!((s.h_a.b() as usize) < 6, "TCA endpoints inside V_D");
            assert!(s.h_a_in_hd);
        }
        // same seed, same sequence
        let again = Sampler::new(&tca_config()).unwrap();
        let a = sampler.sample_indexed(streams::PLANNING, 3).unwrap();
        let b = again.sample_indexed(streams::PLANNING, 3).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.h_a, b.h_a);
    }

    #[test]
    fn rsa_edge_draw_is_uniform() {
        // chi-square uniformity over the edge set of one fixed graph
        let mut cfg = tca_config();
        cfg.scenario_class = ScenarioClass::Rsa;
        let sampler = Sampler::new(&cfg).unwrap();
        let mut rng = rng_for(100, 9, 0);
        let raw = sampler.draw_graph(&mut rng).unwrap();
        let (graph, _) = assign_vd(&raw, VdMode::Sparse, 6, &mut rng).unwrap();
        let edges = graph.edges();
        let trials = 10_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let e = edges[rng.gen_range(0..edges.len())];
            *counts.entry(e).or_insert(0usize) += 1;
        }
        let expected = trials as f64 / edges.len() as f64;
        let chi2: f64 = edges
            .iter()
            .map(|e| {
                let o = *counts.get(e).unwrap_or(&0) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        // alpha = 0.01 critical value for df = |E|-1; normal approximation
        let df = (edges.len() - 1) as f64;
        let crit = df + 2.33 * (2.0 * df).sqrt();
        assert!(chi2 < crit, "chi2 {chi2} over critical {crit}");
    }

    #[test]
    fn config_json_roundtrip() {
        let text = r#"{
            "source": {"kind": "ba", "n": 100, "m_attach": 4},
            "scenario_class": "tca",
            "vd_size": 8,
            "seed": 42,
            "K": 50,
            "num_eval_attacks": 30,
            "metric": "cn",
            "loss": {"beta": 2.0, "theta": "auto"},
            "budgets": [0.1, 5],
            "attacks": ["linkdel", "randdel"],
            "defenses": ["idopt", "idrank", "ppn"]
        }"#;
        let cfg: ScenarioConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.num_planning_samples, 50);
        cfg.validate().unwrap();
        let back = serde_json::to_string(&cfg).unwrap();
        let cfg2: ScenarioConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(cfg2.vd_size, 8);
    }
}
