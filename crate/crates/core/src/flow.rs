// Max-flow on the vertex-split network. The public cut operations and the
// decomposition search both run on this; the search reuses one network for
// thousands of cuts on the same graph.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::state::EPS;

/// Capacity of a vertex in a cut problem. `Infinite` vertices never appear
/// in a cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn finite(self) -> Option<f64> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }
}

/// A graph relabelled to `0..n` for the inner loops.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub ids: Vec<Vertex>,
    pub index: BTreeMap<Vertex, usize>,
    pub adj: Vec<Vec<usize>>,
}

impl Dense {
    pub fn new(g: &Graph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = ids
            .iter()
            .map(|v| g.neighbors(*v).iter().map(|u| index[u]).collect())
            .collect();
        Dense { ids, index, adj }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Component labels of the graph minus `blocked`; blocked vertices get
    /// `usize::MAX`. Labels follow the smallest member.
    pub fn components(&self, blocked: &[bool]) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n() {
            if blocked[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !blocked[v] && label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum DenseCut {
    Uncuttable,
    /// Every separating set weighs more than the requested limit; carries
    /// the flow reached, a lower bound on the cut.
    Exceeds(f64),
    Cut {
        members: Vec<usize>,
        weight: f64,
    },
}

/// Outcome of pushing flow: the total so far, or why it stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Flow {
    Value(f64),
    Uncuttable,
    Exceeds(f64),
}

/// The split network of a fixed graph: `2v` is v_in, `2v + 1` is v_out,
/// `2n` the source and `2n + 1` the sink. Arcs come in pairs `a`, `a ^ 1`.
/// Infinite residuals are `f64::INFINITY` and never decrease.
///
/// Besides one-shot cuts the network supports growing a problem in place:
/// attaching vertices and adding terminals keeps the current flow feasible,
/// so augmenting afterwards continues from it.
pub(crate) struct FlowNet {
    n: usize,
    head: Vec<usize>,
    resid: Vec<f64>,
    arc_start: Vec<usize>,
    arc_list: Vec<usize>,
    inner: Vec<usize>,
    source_arc: Vec<usize>,
    sink_arc: Vec<usize>,
    /// Per vertex, the arcs `v_out -> u_in` and `u_out -> v_in` with `u`.
    incident: Vec<Vec<(usize, usize)>>,
    flow: f64,
    via: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl FlowNet {
    pub fn new(d: &Dense) -> Self {
        let n = d.n();
        let nodes = 2 * n + 2;
        let (src, snk) = (2 * n, 2 * n + 1);
        let mut head = Vec::new();
        let mut tails = Vec::new();
        let mut arc = |from: usize, to: usize| {
            let a = head.len();
            head.extend([to, from]);
            tails.extend([from, to]);
            a
        };
        let inner: Vec<usize> = (0..n).map(|v| arc(2 * v, 2 * v + 1)).collect();
        let source_arc: Vec<usize> = (0..n).map(|v| arc(src, 2 * v)).collect();
        let sink_arc: Vec<usize> = (0..n).map(|v| arc(2 * v + 1, snk)).collect();
        let mut incident = vec![Vec::new(); n];
        for v in 0..n {
            for &u in &d.adj[v] {
                let a = arc(2 * v + 1, 2 * u);
                incident[v].push((a, u));
                incident[u].push((a, v));
            }
        }
        let mut arc_start = vec![0; nodes + 1];
        for &t in &tails {
            arc_start[t + 1] += 1;
        }
        for i in 0..nodes {
            arc_start[i + 1] += arc_start[i];
        }
        let mut fill = arc_start.clone();
        let mut arc_list = vec![0; tails.len()];
        for (a, &t) in tails.iter().enumerate() {
            arc_list[fill[t]] = a;
            fill[t] += 1;
        }
        FlowNet {
            n,
            resid: vec![0.0; head.len()],
            head,
            arc_start,
            arc_list,
            inner,
            source_arc,
            sink_arc,
            incident,
            flow: 0.0,
            via: vec![NONE; nodes],
            stamp: vec![0; nodes],
            epoch: 0,
            queue: Vec::with_capacity(nodes),
        }
    }

    /// Marks every node reachable from the source over open arcs with the
    /// current epoch; records entering arcs in `via`.
    fn search(&mut self, stop_at: Option<usize>) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let src = 2 * self.n;
        self.queue.clear();
        self.queue.push(src);
        self.stamp[src] = self.epoch;
        let mut i = 0;
        while i < self.queue.len() {
            let x = self.queue[i];
            i += 1;
            for &a in &self.arc_list[self.arc_start[x]..self.arc_start[x + 1]] {
                let y = self.head[a];
                if self.stamp[y] != self.epoch && self.resid[a] > EPS {
                    self.stamp[y] = self.epoch;
                    self.via[y] = a;
                    if Some(y) == stop_at {
                        return true;
                    }
                    self.queue.push(y);
                }
            }
        }
        false
    }

    fn reached(&self, node: usize) -> bool {
        self.stamp[node] == self.epoch
    }

    /// Empties the network, then attaches every vertex not in `removed`.
    pub fn reset(&mut self, cap: &[Capacity], removed: &[bool]) {
        self.resid.fill(0.0);
        self.flow = 0.0;
        for v in 0..self.n {
            if removed[v] {
                continue;
            }
            self.set_inner(v, cap[v]);
            for i in 0..self.incident[v].len() {
                let (a, u) = self.incident[v][i];
                if !removed[u] && self.head[a] == 2 * u {
                    self.resid[a] = f64::INFINITY;
                }
            }
        }
    }

    fn set_inner(&mut self, v: usize, cap: Capacity) {
        self.resid[self.inner[v]] = match cap {
            Capacity::Finite(c) => c,
            Capacity::Infinite => f64::INFINITY,
        };
    }

    /// Brings a detached vertex into the network; `detached` tells which
    /// neighbours are still out.
    pub fn attach(&mut self, v: usize, cap: Capacity, detached: &[bool]) {
        self.set_inner(v, cap);
        for &(a, u) in &self.incident[v] {
            if !detached[u] {
                self.resid[a] = f64::INFINITY;
            }
        }
    }

    pub fn add_source(&mut self, v: usize) {
        self.resid[self.inner[v]] = f64::INFINITY;
        self.resid[self.source_arc[v]] = f64::INFINITY;
    }

    pub fn add_sink(&mut self, v: usize) {
        self.resid[self.inner[v]] = f64::INFINITY;
        self.resid[self.sink_arc[v]] = f64::INFINITY;
    }

    pub fn save(&self, into: &mut Vec<f64>) -> f64 {
        into.clone_from(&self.resid);
        self.flow
    }

    pub fn restore(&mut self, from: &[f64], flow: f64) {
        self.resid.copy_from_slice(from);
        self.flow = flow;
    }

    /// Pushes flow until none fits or the total passes `limit`.
    pub fn augment(&mut self, limit: Option<f64>) -> Flow {
        let (src, snk) = (2 * self.n, 2 * self.n + 1);
        while self.search(Some(snk)) {
            let mut delta = f64::INFINITY;
            let mut node = snk;
            while node != src {
                let a = self.via[node];
                delta = delta.min(self.resid[a]);
                node = self.head[a ^ 1];
            }
            if delta.is_infinite() {
                return Flow::Uncuttable;
            }
            let mut node = snk;
            while node != src {
                let a = self.via[node];
                self.resid[a] -= delta;
                self.resid[a ^ 1] += delta;
                node = self.head[a ^ 1];
            }
            self.flow += delta;
            if limit.is_some_and(|l| self.flow > l + EPS) {
                return Flow::Exceeds(self.flow);
            }
        }
        Flow::Value(self.flow)
    }

    /// Minimum-weight vertex set separating `sources` from `sinks` in the
    /// graph minus `removed`. Terminals are never cut regardless of `cap`.
    /// With a `limit`, gives up with `Exceeds` once the flow passes it.
    pub fn min_cut(
        &mut self,
        d: &Dense,
        cap: &[Capacity],
        removed: &[bool],
        sources: &[usize],
        sinks: &[usize],
        limit: Option<f64>,
    ) -> Result<DenseCut> {
        if sources.iter().any(|s| sinks.contains(s)) {
            return Ok(DenseCut::Uncuttable);
        }
        self.reset(cap, removed);
        for &s in sources {
            self.add_source(s);
        }
        for &t in sinks {
            self.add_sink(t);
        }
        let flow = match self.augment(limit) {
            Flow::Value(f) => f,
            Flow::Uncuttable => return Ok(DenseCut::Uncuttable),
            Flow::Exceeds(f) => return Ok(DenseCut::Exceeds(f)),
        };

        self.search(None);
        let members: Vec<usize> = (0..self.n)
            .filter(|&v| !removed[v] && self.reached(2 * v) && !self.reached(2 * v + 1))
            .collect();
        let weight: f64 = members
            .iter()
            .map(|&v| cap[v].finite().expect("infinite vertex on a saturated arc"))
            .sum();

        // Re-check the cut on the graph itself rather than trusting the flow.
        let mut blocked = removed.to_vec();
        for &v in &members {
            blocked[v] = true;
        }
        let (label, _) = d.components(&blocked);
        let crossing = sources.iter().any(|&s| sinks.iter().any(|&t| label[s] == label[t]));
        if crossing || (weight - flow).abs() > EPS * (1.0 + flow) {
            return Err(Error::invariant(format!(
                "vertex cut of weight {weight} does not match flow {flow} or fails to separate"
            )));
        }
        Ok(DenseCut::Cut { members, weight })
    }
}

/// One-off cut on a fresh network.
pub(crate) fn min_vertex_cut(
    d: &Dense,
    cap: &[Capacity],
    removed: &[bool],
    sources: &[usize],
    sinks: &[usize],
) -> Result<DenseCut> {
    FlowNet::new(d).min_cut(d, cap, removed, sources, sinks, None)
}
