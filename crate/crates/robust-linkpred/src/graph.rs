//! Undirected simple graph over compact integer node ids.
//!
//! Graphs are immutable after construction; edge deletion produces a new
//! graph so that many hypothetical what-if deletions can share one base.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type NodeId = u32;

/// Unordered node pair stored in canonical order (`a < b`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct NodePair {
    a: NodeId,
    b: NodeId,
}

impl NodePair {
    pub fn new(u: NodeId, v: NodeId) -> Result<Self> {
        if u == v {
            return Err(Error::SelfPair(u));
        }
        Ok(if u < v {
            NodePair { a: u, b: v }
        } else {
            NodePair { a: v, b: u }
        })
    }

    pub fn a(&self) -> NodeId {
        self.a
    }

    pub fn b(&self) -> NodeId {
        self.b
    }

    /// True if `u` is one of the endpoints.
    pub fn touches(&self, u: NodeId) -> bool {
        self.a == u || self.b == u
    }

    /// The endpoint that is not `u`; panics if `u` is not an endpoint.
    pub fn other(&self, u: NodeId) -> NodeId {
        debug_assert!(self.touches(u));
        if self.a == u {
            self.b
        } else {
            self.a
        }
    }
}

/// Undirected simple graph with per-node sorted adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; duplicates and reversed copies
    /// collapse into single undirected edges, self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(Error::InvalidNode { id: u, n });
            }
            if v as usize >= n {
                return Err(Error::InvalidNode { id: v, n });
            }
            set.insert(NodePair::new(u, v)?);
        }
        let mut adj = vec![Vec::new(); n];
        for p in set {
            adj[p.a as usize].push(p.b);
            adj[p.b as usize].push(p.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj })
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if (u as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: u,
                n: self.adj.len(),
            })
        }
    }

    pub fn degree(&self, u: NodeId) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.adj[u as usize].len())
    }

    /// Unchecked degree for hot paths; panics on an invalid id.
    pub(crate) fn deg(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if u as usize >= self.adj.len() || v as usize >= self.adj.len() {
            return false;
        }
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn contains_pair(&self, p: NodePair) -> bool {
        self.has_edge(p.a, p.b)
    }

    /// Intersection of the two sorted adjacency lists, ascending.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfPair(u));
        }
        let (mut i, mut j) = (0, 0);
        let (au, av) = (&self.adj[u as usize], &self.adj[v as usize]);
        let mut out = Vec::new();
        while i < au.len() && j < av.len() {
            match au[i].cmp(&av[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(au[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Returns a new graph with every pair in `removals` absent.
    /// Removing a non-edge is a no-op.
    pub fn delete_edges<'a, I>(&self, removals: I) -> Graph
    where
        I: IntoIterator<Item = &'a NodePair>,
    {
        let mut adj = self.adj.clone();
        for p in removals {
            if let Ok(pos) = adj[p.a as usize].binary_search(&p.b) {
                adj[p.a as usize].remove(pos);
            }
            if let Ok(pos) = adj[p.b as usize].binary_search(&p.a) {
                adj[p.b as usize].remove(pos);
            }
        }
        Graph { adj }
    }

    pub fn edges(&self) -> Vec<NodePair> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (u as NodeId) < v {
                    out.push(NodePair { a: u as NodeId, b: v });
                }
            }
        }
        out
    }

    /// Locality filter: the subset of `candidates` whose local-metric
    /// similarity could change when `e` is deleted. Pair (x,y) is kept
    /// exactly when an endpoint of `e` lies in {x, y} or in N(x,y).
    pub fn two_hop_affected_pairs(&self, e: NodePair, candidates: &[NodePair]) -> Vec<NodePair> {
        let mut out = Vec::new();
        for &p in candidates {
            if e.touches(p.a) || e.touches(p.b) {
                out.push(p);
                continue;
            }
            let common = self
                .common_neighbors(p.a, p.b)
                .expect("candidates must be valid pairs");
            if common.contains(&e.a) || common.contains(&e.b) {
                out.push(p);
            }
        }
        out
    }

    /// Relabels node ids through `new_id` (indexed by old id), which must
    /// be a permutation of 0..n.
    pub fn relabel(&self, new_id: &[NodeId]) -> Graph {
        assert_eq!(new_id.len(), self.adj.len());
        let mut adj = vec![Vec::new(); self.adj.len()];
        for (u, list) in self.adj.iter().enumerate() {
            let nu = new_id[u] as usize;
            adj[nu] = list.iter().map(|&v| new_id[v as usize]).collect();
            adj[nu].sort_unstable();
        }
        Graph { adj }
    }

    /// Induced subgraph on `nodes`; new ids follow the order of `nodes`.
    pub fn induced(&self, nodes: &[NodeId]) -> Graph {
        let mut map = HashMap::with_capacity(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            map.insert(u, i as NodeId);
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in self.neighbors(u) {
                if let Some(&j) = map.get(&v) {
                    if (i as NodeId) < j {
                        edges.push((i as NodeId, j));
                    }
                }
            }
        }
        Graph::from_edges(nodes.len(), &edges).expect("induced edges are valid")
    }

    /// Nodes of the largest connected component, ascending.
    pub fn largest_component(&self) -> Vec<NodeId> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        let mut best: Vec<NodeId> = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start as NodeId];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in self.neighbors(u) {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        comp.push(v);
                    }
                }
            }
            if comp.len() > best.len() {
                best = comp;
            }
        }
        best.sort_unstable();
        best
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() == 0 || self.largest_component().len() == self.num_nodes()
    }
}

/// Reads a plain-text edge list: one edge per line, two whitespace-separated
/// non-negative integers, `#` comment lines ignored. Node ids need not be
/// contiguous; returns the compacted graph together with the id map
/// (original id at each compact index, ascending).
pub fn load_edgelist(path: &Path) -> Result<(Graph, Vec<u64>)> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let parse = |s: Option<&str>| -> Result<u64> {
            s.and_then(|x| x.parse().ok()).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{}:{}: expected two non-negative integers",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        raw.push((u, v));
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<u64, NodeId> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as NodeId))
        .collect();
    let edges: Vec<(NodeId, NodeId)> = raw
        .iter()
        .filter(|&&(u, v)| u != v)
        .map(|&(u, v)| (index[&u], index[&v]))
        .collect();
    Ok((Graph::from_edges(ids.len(), &edges)?, ids))
}

/// Writes the graph as a sorted edge list in the same text format.
pub fn write_edgelist(g: &Graph, w: &mut impl Write) -> Result<()> {
    for p in g.edges() {
        writeln!(w, "{} {}", p.a, p.b)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{similarity, MetricKind};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn degree_examples() {
        let g = path3();
        assert_eq!(g.degree(1).unwrap(), 2);
        let iso = Graph::empty(1);
        assert_eq!(iso.degree(0).unwrap(), 0);
        let k5 = complete(5);
        for u in 0..5 {
            assert_eq!(k5.degree(u).unwrap(), 4);
        }
        assert!(matches!(g.degree(7), Err(Error::InvalidNode { .. })));
    }

    #[test]
    fn common_neighbor_examples() {
        let g = path3();
        assert_eq!(g.common_neighbors(0, 2).unwrap(), vec![1]);
        let disjoint = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(disjoint.common_neighbors(0, 3).unwrap().is_empty());
        let k4 = complete(4);
        assert_eq!(k4.common_neighbors(0, 1).unwrap(), vec![2, 3]);
        assert!(matches!(g.common_neighbors(1, 1), Err(Error::SelfPair(1))));
    }

    #[test]
    fn delete_edges_examples() {
        let tri = complete(3);
        let removed = tri.delete_edges(&[NodePair::new(0, 2).unwrap()]);
        assert_eq!(removed, path3());
        assert_eq!(tri.delete_edges(&[]), tri);
        // non-edge removal is a no-op
        let g = path3();
        assert_eq!(g.delete_edges(&[NodePair::new(0, 2).unwrap()]), g);
        // original untouched
        assert_eq!(tri.num_edges(), 3);
    }

    #[test]
    fn two_hop_examples() {
        // 0-1-2 path plus far-away edge 3-4
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let cand = [NodePair::new(0, 2).unwrap()];
        let far = NodePair::new(3, 4).unwrap();
        assert!(g.two_hop_affected_pairs(far, &cand).is_empty());
        let direct = NodePair::new(0, 1).unwrap();
        assert_eq!(g.two_hop_affected_pairs(direct, &cand), cand.to_vec());
        // edge (w, z) with w a common neighbor and z outside the pair
        let g2 = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let e = NodePair::new(1, 3).unwrap();
        assert_eq!(g2.two_hop_affected_pairs(e, &cand), cand.to_vec());
        let aa_before = similarity(MetricKind::AdamicAdar, &g2, 0, 2).unwrap();
        let aa_after =
            similarity(MetricKind::AdamicAdar, &g2.delete_edges(&[e]), 0, 2).unwrap();
        assert!((aa_before - aa_after).abs() > 1e-9);
    }

    fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn excluded_pairs_keep_exact_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let g = random_graph(&mut rng, 12, 0.3);
            let edges = g.edges();
            if edges.is_empty() {
                continue;
            }
            let e = edges[rng.gen_range(0..edges.len())];
            let mut cands = Vec::new();
            for u in 0..12u32 {
                for v in (u + 1)..12 {
                    cands.push(NodePair::new(u, v).unwrap());
                }
            }
            let affected = g.two_hop_affected_pairs(e, &cands);
            let after = g.delete_edges(&[e]);
            for p in cands {
                if affected.contains(&p) {
                    continue;
                }
                for m in MetricKind::ALL {
                    let before = similarity(m, &g, p.a(), p.b()).unwrap();
                    let post = similarity(m, &after, p.a(), p.b()).unwrap();
                    assert_eq!(before, post, "metric {m:?} pair {p:?} edge {e:?}");
                }
            }
        }
    }

    #[test]
    fn degrees_drop_by_removed_incident_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_graph(&mut rng, 15, 0.4);
        let edges = g.edges();
        let removals: Vec<NodePair> = edges.iter().copied().step_by(3).collect();
        let after = g.delete_edges(&removals);
        for u in 0..15u32 {
            let incident = removals.iter().filter(|p| p.touches(u)).count();
            assert_eq!(after.deg(u), g.deg(u) - incident);
        }
    }

    #[test]
    fn symmetry_and_bound_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let g = random_graph(&mut rng, 10, 0.35);
            for u in 0..10u32 {
                for v in (u + 1)..10 {
                    let cn = g.common_neighbors(u, v).unwrap();
                    assert_eq!(cn, g.common_neighbors(v, u).unwrap());
                    assert!(cn.len() <= g.deg(u).min(g.deg(v)));
                }
            }
        }
    }

    #[test]
    fn edgelist_roundtrip_with_sparse_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        std::fs::write(&path, "# comment\n10 30\n30 500\n10 500\n").unwrap();
        let (g, ids) = load_edgelist(&path).unwrap();
        assert_eq!(ids, vec![10, 30, 500]);
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 3);
        let mut buf = Vec::new();
        write_edgelist(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n1 2\n");
    }
}
