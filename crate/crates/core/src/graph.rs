//! Simple undirected graphs over integer vertex ids.
//!
//! Graphs are values: operations that look like mutation return a new graph
//! (and, where useful, the delta) so callers higher up the recursion keep
//! their own copy intact.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;

/// An unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Panics on a self-loop.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        assert_ne!(u, v, "self-loop {u}-{v}");
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn lo(self) -> Vertex {
        self.0
    }

    pub fn hi(self) -> Vertex {
        self.1
    }

    pub fn other(self, v: Vertex) -> Vertex {
        if v == self.0 {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

impl From<(Vertex, Vertex)> for Edge {
    fn from((u, v): (Vertex, Vertex)) -> Self {
        Edge::new(u, v)
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, VertexSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.adj.keys().collect::<Vec<_>>())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from a vertex list and an edge list. Duplicate edges
    /// collapse; self-loops and dangling endpoints are rejected.
    pub fn from_edges<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            g.adj.entry(v).or_default();
        }
        for (u, v) in edges {
            if u == v {
                return Err(Error::domain(format!("self-loop on vertex {u}")));
            }
            for x in [u, v] {
                if !g.adj.contains_key(&x) {
                    return Err(Error::UnknownVertex(x));
                }
            }
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    /// Path 1-2-...-n.
    pub fn path(n: usize) -> Self {
        Self::from_edges(1..=n, (1..n).map(|i| (i, i + 1))).unwrap()
    }

    /// Cycle 1-2-...-n-1, `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Self::from_edges(1..=n, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    /// Complete graph on 1..=n.
    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        Self::from_edges(1..=n, edges).unwrap()
    }

    /// `rows x cols` grid, vertices numbered row-major from 1.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let id = |r: usize, c: usize| r * cols + c + 1;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Self::from_edges(1..=rows * cols, edges).unwrap()
    }

    pub(crate) fn insert_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        debug_assert_ne!(u, v);
        let fresh = self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        fresh
    }

    pub(crate) fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        let had = self.adj.get_mut(&u).is_some_and(|s| s.remove(&v));
        if let Some(s) = self.adj.get_mut(&v) {
            s.remove(&u);
        }
        had
    }

    pub(crate) fn remove_vertex(&mut self, v: Vertex) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for u in nbrs {
                if let Some(s) = self.adj.get_mut(&u) {
                    s.remove(&v);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    /// Panics if `v` is not a vertex.
    pub fn neighbors(&self, v: Vertex) -> &VertexSet {
        &self.adj[&v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.range(u + 1..).map(move |&v| Edge(u, v)))
    }

    pub fn is_clique<'a, I>(&self, set: I) -> bool
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        let vs: Vec<Vertex> = set.into_iter().copied().collect();
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_simplicial(&self, v: Vertex) -> bool {
        self.is_clique(self.neighbors(v))
    }

    pub fn check_subset(&self, set: &VertexSet) -> Result<()> {
        match set.iter().find(|v| !self.contains(**v)) {
            Some(&v) => Err(Error::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<Graph> {
        self.check_subset(set)?;
        let adj = set
            .iter()
            .map(|&v| {
                let nbrs = self.adj[&v].intersection(set).copied().collect();
                (v, nbrs)
            })
            .collect();
        Ok(Graph { adj })
    }

    /// Connected components, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) {
                continue;
            }
            let comp = self.reach_from([start], &VertexSet::new());
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// Vertices reachable from `sources` without entering `blocked`.
    pub fn reach_from<I>(&self, sources: I, blocked: &VertexSet) -> VertexSet
    where
        I: IntoIterator<Item = Vertex>,
    {
        let mut seen = VertexSet::new();
        let mut queue = VecDeque::new();
        for s in sources {
            if !blocked.contains(&s) && seen.insert(s) {
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[&u] {
                if !blocked.contains(&v) && seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Repeatedly deletes the lowest-id simplicial vertex until none is left.
    /// Returns the residual graph and the deletion order.
    pub fn strip_simplicial(&self) -> (Graph, Vec<Vertex>) {
        let mut g = self.clone();
        let mut candidates: VertexSet = g.vertices().filter(|&v| g.is_simplicial(v)).collect();
        let mut removed = Vec::new();
        while let Some(v) = candidates.pop_first() {
            let nbrs = g.neighbors(v).clone();
            g.remove_vertex(v);
            removed.push(v);
            // only former neighbours can change status
            for u in nbrs {
                if g.is_simplicial(u) {
                    candidates.insert(u);
                } else {
                    candidates.remove(&u);
                }
            }
        }
        (g, removed)
    }

    /// Makes `set` a clique. Returns the new graph and exactly the edges
    /// that were missing before.
    pub fn add_clique_edges(&self, set: &VertexSet) -> Result<(Graph, BTreeSet<Edge>)> {
        self.check_subset(set)?;
        let mut g = self.clone();
        let added = g.complete_set(set);
        Ok((g, added))
    }

    pub(crate) fn complete_set(&mut self, set: &VertexSet) -> BTreeSet<Edge> {
        let vs: Vec<Vertex> = set.iter().copied().collect();
        let mut added = BTreeSet::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if self.insert_edge(u, v) {
                    added.insert(Edge(u, v));
                }
            }
        }
        added
    }

    /// The graph with `extra` edges added. Endpoints must be vertices.
    pub fn with_edges<'a, I>(&self, extra: I) -> Result<Graph>
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut g = self.clone();
        for e in extra {
            for x in [e.0, e.1] {
                if !g.contains(x) {
                    return Err(Error::UnknownVertex(x));
                }
            }
            g.insert_edge(e.0, e.1);
        }
        Ok(g)
    }
}
