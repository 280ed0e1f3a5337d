//! Undirected weighted graphs over candidate sites, Kruskal MST and
//! k-tree validation.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::geometry::Point2D;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid edge ({i}, {j}): {reason}")]
    InvalidEdge { i: usize, j: usize, reason: &'static str },
    #[error("node {0} is out of range")]
    UnknownNode(usize),
    #[error("induced subgraph on {nodes} nodes is disconnected; no spanning tree")]
    NoSpanningTree { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Edge-list graph. Edges are stored with `i < j`, sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self, GraphError> {
        let mut out: Vec<Edge> = Vec::new();
        for (a, b, weight) in edges {
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            if i == j {
                return Err(GraphError::InvalidEdge { i, j, reason: "self-loop" });
            }
            if j >= node_count {
                return Err(GraphError::UnknownNode(j));
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(GraphError::InvalidEdge { i, j, reason: "weight must be finite and non-negative" });
            }
            out.push(Edge { i, j, weight });
        }
        out.sort_by_key(|a| (a.i, a.j));
        if let Some(w) = out.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(GraphError::InvalidEdge { i: w[0].i, j: w[0].j, reason: "duplicate edge" });
        }
        Ok(Self { node_count, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .ok()
            .map(|idx| self.edges[idx].weight)
    }

    /// Neighbour lists, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let mut uf = UnionFind::new(self.node_count);
        let mut components = self.node_count;
        for e in &self.edges {
            if uf.union(e.i, e.j) {
                components -= 1;
            }
        }
        components == 1
    }
}

/// Complete graph with Euclidean edge weights.
pub fn complete_graph(sites: &[Point2D]) -> WeightedGraph {
    let n = sites.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge { i, j, weight: sites[i].distance(&sites[j]) });
        }
    }
    WeightedGraph { node_count: n, edges }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
    pub total_weight: f64,
}

/// Disjoint-set forest with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Minimum spanning tree of the subgraph induced by `nodes`.
///
/// Edges are scanned in `(weight, i, j)` order, so ties resolve the same way
/// on every run.
pub fn kruskal_mst(g: &WeightedGraph, nodes: &[usize]) -> Result<TreeSolution, GraphError> {
    let mut member = vec![false; g.node_count];
    for &v in nodes {
        if v >= g.node_count {
            return Err(GraphError::UnknownNode(v));
        }
        member[v] = true;
    }
    let node_set: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut candidates: Vec<&Edge> = g.edges.iter().filter(|e| member[e.i] && member[e.j]).collect();
    candidates.sort_by(|a, b| a.weight.total_cmp(&b.weight).then((a.i, a.j).cmp(&(b.i, b.j))));

    let mut uf = UnionFind::new(g.node_count);
    let mut edges = BTreeSet::new();
    let mut picked = Vec::with_capacity(node_set.len().saturating_sub(1));
    for e in candidates {
        if picked.len() + 1 >= node_set.len() {
            break;
        }
        if uf.union(e.i, e.j) {
            edges.insert((e.i, e.j));
            picked.push(e.weight);
        }
    }
    if picked.len() + 1 < node_set.len() {
        return Err(GraphError::NoSpanningTree { nodes: node_set.len() });
    }
    Ok(TreeSolution { nodes: node_set, edges, total_weight: picked.iter().sum() })
}

/// True iff `sol` is a tree on exactly `k` nodes using edges of `g`.
pub fn validate_ktree(g: &WeightedGraph, sol: &TreeSolution, k: usize) -> bool {
    if sol.nodes.len() != k || sol.edges.len() + 1 != k {
        return false;
    }
    if sol.nodes.iter().any(|&v| v >= g.node_count) {
        return false;
    }
    let mut uf = UnionFind::new(g.node_count);
    for &(i, j) in &sol.edges {
        if !sol.nodes.contains(&i) || !sol.nodes.contains(&j) || g.edge_weight(i, j).is_none() {
            return false;
        }
        // k - 1 edges with no cycle on k nodes is a spanning tree of them
        if !uf.union(i, j) {
            return false;
        }
    }
    true
}
