//! Vertex-capacitated cuts: exact s–t vertex cuts by max-flow on the split
//! graph, and a 2-approximate 3-way vertex cut built from isolating cuts.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::flow::{min_vertex_cut, Dense, DenseCut, FlowNet};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::state::{Measure, EPS};

pub use crate::flow::Capacity;

/// A capacity for every vertex of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityAssignment {
    caps: BTreeMap<Vertex, Capacity>,
}

impl CapacityAssignment {
    pub fn unit(g: &Graph) -> Self {
        Self::from_measure(g, Measure::Cardinality)
    }

    /// Capacity of each vertex is its weight under `measure`.
    pub fn from_measure(g: &Graph, measure: Measure<'_>) -> Self {
        let caps = g.vertices().map(|v| (v, Capacity::Finite(measure.weight(v)))).collect();
        CapacityAssignment { caps }
    }

    pub fn set(&mut self, v: Vertex, cap: Capacity) {
        self.caps.insert(v, cap);
    }

    pub fn with_infinite<'a, I>(mut self, vs: I) -> Self
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        for &v in vs {
            self.caps.insert(v, Capacity::Infinite);
        }
        self
    }

    pub fn get(&self, v: Vertex) -> Option<Capacity> {
        self.caps.get(&v).copied()
    }

    fn check(&self, g: &Graph) -> Result<()> {
        for v in g.vertices() {
            match self.caps.get(&v) {
                None => return Err(Error::domain(format!("no capacity for vertex {v}"))),
                Some(Capacity::Finite(c)) if !(c.is_finite() && *c > 0.0) => {
                    return Err(Error::domain(format!("capacity {c} of vertex {v} is not positive")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub(crate) fn dense(&self, d: &Dense) -> Vec<Capacity> {
        d.ids.iter().map(|v| self.caps[v]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutResult {
    pub cut: VertexSet,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CutOutcome {
    Cut(CutResult),
    /// No set of finite-capacity vertices separates the terminals.
    Uncuttable,
}

impl CutOutcome {
    pub fn cut(&self) -> Option<&CutResult> {
        match self {
            CutOutcome::Cut(c) => Some(c),
            CutOutcome::Uncuttable => None,
        }
    }

    fn from_dense(d: &Dense, cut: DenseCut) -> Self {
        match cut {
            DenseCut::Uncuttable | DenseCut::Exceeds(_) => CutOutcome::Uncuttable,
            DenseCut::Cut { members, weight } => CutOutcome::Cut(CutResult {
                cut: members.iter().map(|&i| d.ids[i]).collect(),
                weight,
            }),
        }
    }
}

fn terminals(g: &Graph, d: &Dense, set: &VertexSet, name: &str) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::domain(format!("terminal set {name} is empty")));
    }
    g.check_subset(set)?;
    Ok(set.iter().map(|v| d.index[v]).collect())
}

fn check_disjoint(sets: &[&VertexSet]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(v) = a.intersection(b).next() {
                return Err(Error::domain(format!("terminal sets share vertex {v}")));
            }
        }
    }
    Ok(())
}

/// Minimum-capacity vertex set whose removal disconnects `s` from `t`.
/// Terminal vertices are never part of the cut.
pub fn min_st_vertex_cut(g: &Graph, s: &VertexSet, t: &VertexSet, cap: &CapacityAssignment) -> Result<CutOutcome> {
    cap.check(g)?;
    check_disjoint(&[s, t])?;
    let d = Dense::new(g);
    let src = terminals(g, &d, s, "S")?;
    let snk = terminals(g, &d, t, "T")?;
    let cut = min_vertex_cut(&d, &cap.dense(&d), &vec![false; d.n()], &src, &snk)?;
    Ok(CutOutcome::from_dense(&d, cut))
}

/// 3-way vertex cut of weight at most twice the optimum.
///
/// For each terminal set the minimum cut isolating it from the other two is
/// computed; the union of the two lightest isolating cuts separates all
/// three sets pairwise. Ties go to the earlier set (A, then B, then C).
pub fn three_way_cut_2approx(
    g: &Graph,
    wa: &VertexSet,
    wb: &VertexSet,
    wc: &VertexSet,
    cap: &CapacityAssignment,
) -> Result<CutOutcome> {
    cap.check(g)?;
    check_disjoint(&[wa, wb, wc])?;
    let d = Dense::new(g);
    let groups = [
        terminals(g, &d, wa, "W_A")?,
        terminals(g, &d, wb, "W_B")?,
        terminals(g, &d, wc, "W_C")?,
    ];
    let mut net = FlowNet::new(&d);
    let cut = dense_three_way(&mut net, &d, &cap.dense(&d), &vec![false; d.n()], &groups, None)?;
    Ok(CutOutcome::from_dense(&d, cut))
}

/// With a `limit`, gives up with `Exceeds` as soon as the result is known
/// to weigh more than it.
pub(crate) fn dense_three_way(
    net: &mut FlowNet,
    d: &Dense,
    cap: &[Capacity],
    removed: &[bool],
    groups: &[Vec<usize>; 3],
    limit: Option<f64>,
) -> Result<DenseCut> {
    let mut isolating = Vec::with_capacity(3);
    let mut exceeded = Vec::new();
    for i in 0..3 {
        let rest: Vec<usize> = (0..3)
            .filter(|&j| j != i)
            .flat_map(|j| groups[j].iter().copied())
            .collect();
        match net.min_cut(d, cap, removed, &groups[i], &rest, limit)? {
            DenseCut::Uncuttable => return Ok(DenseCut::Uncuttable),
            DenseCut::Exceeds(f) => {
                exceeded.push(f);
                if exceeded.len() == 2 {
                    // the result contains the second-lightest isolating cut
                    return Ok(DenseCut::Exceeds(exceeded[0].min(exceeded[1])));
                }
                isolating.push((f64::INFINITY, Vec::new()));
            }
            DenseCut::Cut { members, weight } => isolating.push((weight, members)),
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| isolating[a].0.total_cmp(&isolating[b].0));

    let mut in_cut = vec![false; d.n()];
    for &i in &order[..2] {
        for &v in &isolating[i].1 {
            in_cut[v] = true;
        }
    }
    let members: Vec<usize> = (0..d.n()).filter(|&v| in_cut[v]).collect();
    let weight = members.iter().map(|&v| cap[v].finite().unwrap()).sum();
    if limit.is_some_and(|l| weight > l + EPS) {
        return Ok(DenseCut::Exceeds(weight));
    }

    let mut blocked = removed.to_vec();
    for &v in &members {
        blocked[v] = true;
    }
    let (label, _) = d.components(&blocked);
    for i in 0..3 {
        for j in i + 1..3 {
            if groups[i]
                .iter()
                .any(|&a| groups[j].iter().any(|&b| label[a] == label[b]))
            {
                return Err(Error::invariant("3-way cut leaves two terminal sets connected"));
            }
        }
    }
    Ok(DenseCut::Cut { members, weight })
}
