//! The recursive triangulation: split along a W-decomposition, triangulate
//! each side with its share of W plus the separator, and make W ∪ X a
//! clique. Small pieces are finished by a greedy minimum-weight
//! elimination. The escalation driver raises the threshold until a run
//! succeeds.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::chordal::{clique_profile, is_perfect_elimination_ordering};
use crate::decomp::{self, DecompBudget, Probe};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex, VertexSet};
use crate::state::{lt, Measure, StateSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    /// No W-decomposition was found at some node: the (weighted)
    /// cliquewidth exceeds the threshold (sound for `alpha >= 2`).
    CliquewidthExceeds,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trace {
    /// Largest |W| handed to any recursion node.
    pub max_w: usize,
    pub depth: usize,
    pub nodes: usize,
    pub leaves: usize,
    pub partitions: u64,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangulationResult {
    pub threshold: f64,
    pub verdict: Verdict,
    /// Empty on failure.
    pub fill_edges: BTreeSet<Edge>,
    /// A perfect elimination ordering of G plus the fill edges on success;
    /// the vertices in id order on failure.
    pub ordering: Vec<Vertex>,
    /// Zero on failure.
    pub largest_clique_size: usize,
    pub heaviest_clique_weight: f64,
    /// `l / k`, set by [`escalate`] when the previous threshold failed.
    pub ratio_bound: Option<f64>,
    pub trace: Trace,
}

impl TriangulationResult {
    pub fn is_success(&self) -> bool {
        self.verdict == Verdict::Success
    }

    pub fn triangulated(&self, g: &Graph) -> Result<Graph> {
        g.with_edges(&self.fill_edges)
    }
}

/// Fill edges and a perfect elimination ordering of the filled graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Completion {
    pub fill_edges: BTreeSet<Edge>,
    pub ordering: Vec<Vertex>,
}

/// Eliminates the vertices outside `keep` greedily, always picking the one
/// whose closed neighbourhood is lightest (ties to the lowest id), and
/// cliques `keep` first. `keep` ends the ordering in id order.
fn eliminate_greedily(g: &Graph, keep: &VertexSet, measure: Measure<'_>) -> Completion {
    let mut h = g.clone();
    let mut fill_edges = h.complete_set(keep);
    let mut ordering = Vec::with_capacity(g.n());
    let mut remaining: VertexSet = g.vertices().filter(|v| !keep.contains(v)).collect();
    while !remaining.is_empty() {
        let cost = |v: Vertex| measure.weight(v) + measure.of(h.neighbors(v));
        let v = remaining
            .iter()
            .copied()
            .min_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)))
            .expect("nonempty");
        let nbrs = h.neighbors(v).clone();
        fill_edges.extend(h.complete_set(&nbrs));
        h.remove_vertex(v);
        remaining.remove(&v);
        ordering.push(v);
    }
    ordering.extend(keep);
    Completion { fill_edges, ordering }
}

/// Triangulates `g` so that `w` becomes a clique, with the greedy
/// minimum-weight heuristic on the rest.
pub fn leaf_complete(g: &Graph, w: &VertexSet, measure: Measure<'_>) -> Result<Completion> {
    g.check_subset(w)?;
    measure.check(g)?;
    Ok(eliminate_greedily(g, w, measure))
}

/// The minimum-weight elimination heuristic on the whole graph; with
/// `None` every vertex weighs the same.
pub fn greedy_min_weight(g: &Graph, ss: Option<&StateSpace>) -> Result<TriangulationResult> {
    let measure = ss.map_or(Measure::Cardinality, Measure::Weighted);
    measure.check(g)?;
    let c = eliminate_greedily(g, &VertexSet::new(), measure);
    let h = g.with_edges(&c.fill_edges)?;
    let (l, heaviest) = clique_profile(&h, &c.ordering, measure);
    Ok(TriangulationResult {
        threshold: heaviest,
        verdict: Verdict::Success,
        fill_edges: c.fill_edges,
        ordering: c.ordering,
        largest_clique_size: l,
        heaviest_clique_weight: heaviest,
        ratio_bound: None,
        trace: Trace::default(),
    })
}

struct Run<'a> {
    budget: DecompBudget<'a>,
    probe: Probe,
    trace: Trace,
}

impl Run<'_> {
    fn node(&mut self, g: &Graph, w: &VertexSet, depth: usize) -> Result<Option<Completion>> {
        let m = self.budget.measure;
        self.trace.nodes += 1;
        self.trace.depth = self.trace.depth.max(depth);
        self.trace.max_w = self.trace.max_w.max(w.len());

        let mv = m.of(&g.vertex_set());
        if lt(mv, self.budget.leaf_bound()) {
            self.trace.leaves += 1;
            return Ok(Some(eliminate_greedily(g, w, m)));
        }
        self.probe.note_margin(decomp::leaf_flip(&self.budget, mv));

        let Some(d) = decomp::search(g, w, &self.budget, &mut self.probe)? else {
            return Ok(None);
        };
        let mut fill_edges = BTreeSet::new();
        let mut ordering = Vec::with_capacity(g.n());
        for side in [&d.a, &d.b, &d.c] {
            if side.is_empty() {
                continue;
            }
            let mut part = side.clone();
            part.extend(&d.x);
            if part.len() >= g.n() {
                return Err(Error::invariant("recursion did not shrink the graph"));
            }
            let mut child_w: VertexSet = w.intersection(side).copied().collect();
            child_w.extend(&d.x);
            let sub = g.induced_subgraph(&part)?;
            let Some(child) = self.node(&sub, &child_w, depth + 1)? else {
                return Ok(None);
            };
            fill_edges.extend(child.fill_edges);
            ordering.extend(
                child
                    .ordering
                    .into_iter()
                    .filter(|v| side.contains(v) && !w.contains(v)),
            );
        }
        let mut top = w.clone();
        top.extend(&d.x);
        fill_edges.extend(top.iter().flat_map(|&u| {
            top.range(u + 1..)
                .filter(move |&&v| !g.has_edge(u, v))
                .map(move |&v| Edge::new(u, v))
        }));
        ordering.extend(d.x.iter().filter(|v| !w.contains(v)));
        ordering.extend(w);

        if cfg!(debug_assertions) {
            let h = g.with_edges(&fill_edges)?;
            if !h.is_clique(&top) || !is_perfect_elimination_ordering(&h, &ordering) {
                return Err(Error::invariant(
                    "glued triangulation is not chordal with W ∪ X a clique",
                ));
            }
        }
        Ok(Some(Completion { fill_edges, ordering }))
    }
}

fn run(g: &Graph, w: &VertexSet, budget: DecompBudget<'_>) -> Result<(TriangulationResult, Probe)> {
    budget.check()?;
    budget.measure.check(g)?;
    g.check_subset(w)?;
    if !lt(budget.measure.of(w), budget.w_bound()) {
        return Err(Error::domain("W is too heavy: need measure(W) < (alpha + 1) t"));
    }
    let mut r = Run {
        budget,
        probe: Probe::default(),
        trace: Trace::default(),
    };
    let outcome = r.node(g, w, 0)?;
    r.trace.partitions = r.probe.partitions;
    r.trace.candidates = r.probe.candidates;
    let result = match outcome {
        Some(c) => {
            let h = g.with_edges(&c.fill_edges)?;
            if !is_perfect_elimination_ordering(&h, &c.ordering) {
                return Err(Error::invariant(
                    "triangulation ordering is not a perfect elimination ordering",
                ));
            }
            let (l, heaviest) = clique_profile(&h, &c.ordering, budget.measure);
            TriangulationResult {
                threshold: budget.threshold,
                verdict: Verdict::Success,
                fill_edges: c.fill_edges,
                ordering: c.ordering,
                largest_clique_size: l,
                heaviest_clique_weight: heaviest,
                ratio_bound: None,
                trace: r.trace,
            }
        }
        None => TriangulationResult {
            threshold: budget.threshold,
            verdict: Verdict::CliquewidthExceeds,
            fill_edges: BTreeSet::new(),
            ordering: g.vertices().collect(),
            largest_clique_size: 0,
            heaviest_clique_weight: 0.0,
            ratio_bound: None,
            trace: r.trace,
        },
    };
    Ok((result, r.probe))
}

/// Triangulates `g` with `w` made a clique; on success the largest clique
/// has fewer than `(2 alpha + 1) k` vertices.
pub fn triangulate(g: &Graph, w: &VertexSet, k: usize, alpha: f64) -> Result<TriangulationResult> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(run(g, w, DecompBudget::cardinality(k, alpha))?.0)
}

/// Weighted variant: on success the heaviest clique weighs less than
/// `(2 alpha + 1) m`.
pub fn w_triangulate(g: &Graph, w: &VertexSet, m: f64, alpha: f64, ss: &StateSpace) -> Result<TriangulationResult> {
    Ok(run(g, w, DecompBudget::weighted(m, alpha, Measure::Weighted(ss)))?.0)
}

/// How the next threshold is chosen after a failed round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Jump {
    /// `t + 1`.
    Increment,
    /// The smallest threshold at which some tested decomposition would have
    /// been accepted (never beyond the threshold at which the whole graph
    /// is a leaf).
    KStar,
    /// The smallest threshold that flips any failed comparison of the run,
    /// or `1.05 t` when there is none.
    WeightedMargin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscalationPolicy {
    /// First threshold; defaults to 1 by size, or the heaviest edge by
    /// weight.
    pub start: Option<f64>,
    pub jump: Jump,
}

impl Default for EscalationPolicy {
    fn default() -> Self {
        EscalationPolicy {
            start: None,
            jump: Jump::Increment,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Round {
    pub threshold: f64,
    pub success: bool,
    pub partitions: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Escalation {
    pub threshold: f64,
    pub result: TriangulationResult,
    /// Largest threshold that failed; the (weighted) cliquewidth exceeds it.
    pub failed_at: Option<f64>,
    pub rounds: Vec<Round>,
}

/// Heaviest edge `w(u) + w(v)`, or the heaviest vertex in an edgeless
/// graph: no triangulation has a lighter clique.
pub fn weighted_start(g: &Graph, ss: &StateSpace) -> f64 {
    let m = Measure::Weighted(ss);
    let by_edge = g
        .edges()
        .map(|e| m.weight(e.lo()) + m.weight(e.hi()))
        .fold(0.0, f64::max);
    let by_vertex = g.vertices().map(|v| m.weight(v)).fold(0.0, f64::max);
    by_edge.max(by_vertex)
}

/// Runs the triangulation with increasing thresholds until it succeeds.
pub fn escalate(g: &Graph, alpha: f64, policy: EscalationPolicy, ss: Option<&StateSpace>) -> Result<Escalation> {
    let measure = ss.map_or(Measure::Cardinality, Measure::Weighted);
    measure.check(g)?;
    let integral = measure.is_cardinality();
    let mut t = match (policy.start, ss) {
        (Some(s), _) => s,
        (None, None) => 1.0,
        (None, Some(ss)) => weighted_start(g, ss),
    };
    if integral {
        t = t.ceil().max(1.0);
    }
    if !(t.is_finite() && t > 0.0) {
        t = 1.0;
    }
    let mut rounds = Vec::new();
    let mut failed_at = None;
    loop {
        let budget = DecompBudget {
            threshold: t,
            alpha,
            measure,
        };
        let (mut result, probe) = run(g, &VertexSet::new(), budget)?;
        rounds.push(Round {
            threshold: t,
            success: result.is_success(),
            partitions: probe.partitions,
        });
        if result.is_success() {
            result.ratio_bound = match failed_at {
                Some(f) if integral && f == t - 1.0 => Some(result.largest_clique_size as f64 / t),
                Some(f) if !integral => Some(result.heaviest_clique_weight / f),
                _ => None,
            };
            return Ok(Escalation {
                threshold: t,
                result,
                failed_at,
                rounds,
            });
        }
        failed_at = Some(t);
        t = next_threshold(g, &budget, policy.jump, &probe);
    }
}

fn next_threshold(g: &Graph, budget: &DecompBudget<'_>, jump: Jump, probe: &Probe) -> f64 {
    let t = budget.threshold;
    let integral = budget.measure.is_cardinality();
    let leaf_cap = decomp::leaf_flip(budget, budget.measure.of(&g.vertex_set()));
    let fallback = if integral { t + 1.0 } else { t * 1.05 };
    let next = match jump {
        Jump::Increment => t + 1.0,
        Jump::KStar => probe.kstar.map_or(t + 1.0, |k| k.min(leaf_cap).max(t + 1.0)),
        Jump::WeightedMargin => probe.margin.map_or(fallback, |m| m.max(fallback)),
    };
    let next = if integral { next.ceil() } else { next };
    if next > t {
        next
    } else {
        fallback
    }
}
