//! Chordality recognition, maximal cliques, junction trees and the M/T
//! state-space metrics.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::Dense;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::state::{Measure, StateSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chordality {
    /// A perfect elimination ordering: each vertex's later neighbours form a
    /// clique.
    Chordal(Vec<Vertex>),
    /// A chordless cycle of length at least 4, in cycle order.
    NotChordal(Vec<Vertex>),
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal(_))
    }
}

/// Maximum-cardinality search visit order, ties to the lowest id. The
/// reverse is a perfect elimination ordering iff the graph is chordal.
fn mcs_order(d: &Dense) -> Vec<usize> {
    let n = d.n();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &u in &d.adj[v] {
            if !visited[u] {
                weight[u] += 1;
            }
        }
    }
    order
}

/// Checks that `peo` (dense) is a perfect elimination ordering of `d`.
fn is_peo(d: &Dense, peo: &[usize]) -> bool {
    let n = d.n();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    // later neighbours minus the earliest of them must be adjacent to it
    for &v in peo {
        let later = d.adj[v].iter().copied().filter(|&u| pos[u] > pos[v]);
        let Some(parent) = later.clone().min_by_key(|&u| pos[u]) else {
            continue;
        };
        if later.filter(|&u| u != parent).any(|u| !d.has_edge(parent, u)) {
            return false;
        }
    }
    true
}

fn chordless_cycle(d: &Dense) -> Option<Vec<usize>> {
    let n = d.n();
    for v in 0..n {
        let nbrs = &d.adj[v];
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if d.has_edge(u, w) {
                    continue;
                }
                let mut blocked = vec![false; n];
                blocked[v] = true;
                for &x in nbrs {
                    blocked[x] = x != u && x != w;
                }
                if let Some(path) = shortest_path(d, u, w, &blocked) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

fn shortest_path(d: &Dense, from: usize, to: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; d.n()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &y in &d.adj[x] {
            if !blocked[y] && prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

pub fn check_chordal(g: &Graph) -> Chordality {
    let d = Dense::new(g);
    let mut peo = mcs_order(&d);
    peo.reverse();
    if is_peo(&d, &peo) {
        return Chordality::Chordal(peo.into_iter().map(|i| d.ids[i]).collect());
    }
    let cycle = chordless_cycle(&d).expect("a graph without a PEO has a chordless cycle");
    Chordality::NotChordal(cycle.into_iter().map(|i| d.ids[i]).collect())
}

pub fn is_chordal(g: &Graph) -> bool {
    let d = Dense::new(g);
    let mut peo = mcs_order(&d);
    peo.reverse();
    is_peo(&d, &peo)
}

/// Whether `order` is a permutation of V(g) under which every vertex's
/// later neighbours form a clique.
pub fn is_perfect_elimination_ordering(g: &Graph, order: &[Vertex]) -> bool {
    let d = Dense::new(g);
    if order.len() != d.n() {
        return false;
    }
    let mut seen = vec![false; d.n()];
    let mut dense = Vec::with_capacity(order.len());
    for v in order {
        match d.index.get(v) {
            Some(&i) if !seen[i] => {
                seen[i] = true;
                dense.push(i);
            }
            _ => return false,
        }
    }
    is_peo(&d, &dense)
}

/// Maximal cliques of a chordal graph from a perfect elimination ordering,
/// listed in the order of their first vertex.
pub fn extract_cliques(g: &Graph, peo: &[Vertex]) -> Result<Vec<VertexSet>> {
    if !is_perfect_elimination_ordering(g, peo) {
        return Err(Error::domain("ordering is not a perfect elimination ordering"));
    }
    let pos: BTreeMap<Vertex, usize> = peo.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let candidates: Vec<VertexSet> = peo
        .iter()
        .map(|&v| {
            let mut c: VertexSet = g.neighbors(v).iter().copied().filter(|u| pos[u] > pos[&v]).collect();
            c.insert(v);
            c
        })
        .collect();
    let cliques = candidates
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !candidates
                .iter()
                .enumerate()
                .any(|(j, other)| j != *i && other.len() > c.len() && c.is_subset(other))
        })
        .map(|(_, c)| c.clone())
        .collect();
    Ok(cliques)
}

/// Largest clique size and heaviest clique weight of a chordal graph, read
/// off a perfect elimination ordering.
pub fn clique_profile(g: &Graph, peo: &[Vertex], measure: Measure<'_>) -> (usize, f64) {
    let pos: BTreeMap<Vertex, usize> = peo.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    peo.iter()
        .map(|&v| {
            let later = g.neighbors(v).iter().filter(|u| pos[*u] > pos[&v]);
            let size = 1 + later.clone().count();
            let weight = measure.weight(v) + measure.of(later);
            (size, weight)
        })
        .fold((0, 0.0), |(s, w), (s2, w2)| (s.max(s2), w.max(w2)))
}

/// Bags with tree edges given as pairs of bag indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JunctionTree {
    pub bags: Vec<VertexSet>,
    pub edges: Vec<(usize, usize)>,
}

impl JunctionTree {
    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    pub fn separator(&self, edge: (usize, usize)) -> VertexSet {
        self.bags[edge.0].intersection(&self.bags[edge.1]).copied().collect()
    }

    /// Drops edges with an empty separator, leaving one tree per connected
    /// component of the underlying graph.
    pub fn into_forest(self) -> JunctionTree {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&e| !self.separator(e).is_empty())
            .collect();
        JunctionTree { bags: self.bags, edges }
    }

    /// Number of connected components among the bags selected by `keep`.
    fn bag_components(&self, keep: impl Fn(usize) -> bool) -> usize {
        let mut uf = UnionFind::new(self.bags.len());
        for &(a, b) in &self.edges {
            if keep(a) && keep(b) {
                uf.union(a, b);
            }
        }
        let mut roots: Vec<usize> = (0..self.bags.len()).filter(|&i| keep(i)).map(|i| uf.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Checks the junction-tree properties against the chordal graph `h`:
    /// tree edges form a forest (a tree when `require_tree`), the bags are
    /// exactly the maximal cliques of `h`, and the bags holding any vertex
    /// form a connected subtree.
    pub fn verify(&self, h: &Graph, require_tree: bool) -> Result<()> {
        let fail = |msg: String| Err(Error::invariant(format!("junction tree: {msg}")));
        let nb = self.bags.len();
        let mut uf = UnionFind::new(nb);
        for &(a, b) in &self.edges {
            if a >= nb || b >= nb || a == b {
                return fail(format!("bad edge ({a}, {b})"));
            }
            if !uf.union(a, b) {
                return fail("tree edges contain a cycle".into());
            }
        }
        if require_tree && nb > 0 && self.edges.len() != nb - 1 {
            return fail("tree edges do not connect all bags".into());
        }
        for (i, bag) in self.bags.iter().enumerate() {
            if bag.is_empty() || !h.is_clique(bag) || !bag.iter().all(|&v| h.contains(v)) {
                return fail(format!("bag {} is not a clique of the graph", i + 1));
            }
            let extendable = h
                .vertices()
                .any(|v| !bag.contains(&v) && bag.iter().all(|u| h.has_edge(*u, v)));
            if extendable {
                return fail(format!("bag {} is not a maximal clique", i + 1));
            }
            if self.bags[..i].contains(bag) {
                return fail(format!("bag {} is repeated", i + 1));
            }
        }
        for v in h.vertices() {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return fail(format!("vertex {v} is in no bag"));
            }
        }
        for e in h.edges() {
            if !self.bags.iter().any(|b| b.contains(&e.lo()) && b.contains(&e.hi())) {
                return fail(format!("edge {e:?} is in no bag"));
            }
        }
        for v in h.vertices() {
            if self.bag_components(|i| self.bags[i].contains(&v)) != 1 {
                return fail(format!("bags holding vertex {v} are not connected"));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            cur = std::mem::replace(&mut self.parent[cur], root);
        }
        root
    }

    /// False when the two were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Maximum-weight spanning tree over the clique graph, weighted by
/// intersection size. Ties go to the lexicographically smaller bag pair.
/// Empty separators are allowed, so the result is always a single tree.
pub fn build_junction_tree(cliques: &[VertexSet]) -> Result<JunctionTree> {
    let n = cliques.len();
    let mut pairs: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (cliques[i].intersection(&cliques[j]).count(), i, j))
        .collect();
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut uf = UnionFind::new(n);
    let edges = pairs
        .into_iter()
        .filter(|&(_, i, j)| uf.union(i, j))
        .map(|(_, i, j)| (i, j))
        .collect();
    let jt = JunctionTree {
        bags: cliques.to_vec(),
        edges,
    };
    for v in cliques.iter().flatten().copied().collect::<VertexSet>() {
        if jt.bag_components(|i| jt.bags[i].contains(&v)) != 1 {
            return Err(Error::invariant(format!(
                "running intersection fails at vertex {v}; cliques are not from a chordal graph"
            )));
        }
    }
    Ok(jt)
}

/// `heaviest` is M, the log2 state space of the heaviest bag; `total` is T,
/// the log2 of the summed state spaces of all bags.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(rename = "M")]
    pub heaviest: f64,
    #[serde(rename = "T")]
    pub total: f64,
    pub largest_bag_size: usize,
}

pub fn compute_metrics(jt: &JunctionTree, ss: &StateSpace) -> Result<Metrics> {
    let mut weights = Vec::with_capacity(jt.bags.len());
    for bag in &jt.bags {
        let mut w = 0.0;
        for &v in bag {
            w += ss
                .weight(v)
                .ok_or_else(|| Error::domain(format!("no state size for vertex {v}")))?;
        }
        weights.push(w);
    }
    let heaviest = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if weights.is_empty() {
        return Ok(Metrics {
            heaviest: 0.0,
            total: 0.0,
            largest_bag_size: 0,
        });
    }
    let total = heaviest + weights.iter().map(|w| (w - heaviest).exp2()).sum::<f64>().log2();
    Ok(Metrics {
        heaviest,
        total,
        largest_bag_size: jt.max_bag_size(),
    })
}
