//! Removal of redundant fill edges until the triangulation is minimal: no
//! single kept fill edge can be dropped without losing chordality.

use std::collections::{BTreeMap, BTreeSet};

use crate::chordal::is_chordal;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinimizationReport {
    pub removed: BTreeSet<Edge>,
    pub kept: BTreeSet<Edge>,
    /// Sweeps over the candidates, including the final one that removed
    /// nothing.
    pub passes: usize,
}

/// Tries to delete each fill edge in turn, keeping the deletion whenever
/// the graph stays chordal, and sweeps until nothing more can go.
/// Candidates are visited by the later endpoint's position in `ordering`,
/// latest first, then by the earlier endpoint's position.
pub fn minimize_fill(g: &Graph, fills: &BTreeSet<Edge>, ordering: &[Vertex]) -> Result<MinimizationReport> {
    let pos: BTreeMap<Vertex, usize> = ordering.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if ordering.len() != g.n() || pos.len() != g.n() || !g.vertices().all(|v| pos.contains_key(&v)) {
        return Err(Error::domain("ordering is not a permutation of the vertices"));
    }
    if let Some(e) = fills.iter().find(|e| g.has_edge(e.lo(), e.hi())) {
        return Err(Error::domain(format!("fill edge {e:?} is already in the graph")));
    }
    let mut h = g.with_edges(fills)?;
    if !is_chordal(&h) {
        return Err(Error::domain("graph plus fill edges is not chordal"));
    }

    let mut candidates: Vec<Edge> = fills.iter().copied().collect();
    candidates.sort_by_key(|e| {
        let (a, b) = (pos[&e.lo()], pos[&e.hi()]);
        (std::cmp::Reverse(a.max(b)), a.min(b))
    });
    let mut removed = BTreeSet::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for e in &candidates {
            if removed.contains(e) {
                continue;
            }
            h.remove_edge(e.lo(), e.hi());
            if is_chordal(&h) {
                removed.insert(*e);
                changed = true;
            } else {
                h.insert_edge(e.lo(), e.hi());
            }
        }
        if !changed {
            break;
        }
    }
    let kept = fills.difference(&removed).copied().collect();
    Ok(MinimizationReport { removed, kept, passes })
}
