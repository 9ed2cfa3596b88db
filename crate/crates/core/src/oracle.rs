//! Exact references for small graphs: (weighted) cliquewidth by dynamic
//! programming over eliminated sets, and minimum 3-way vertex cuts by
//! exhaustive search.

use crate::cuts::{Capacity, CapacityAssignment, CutOutcome, CutResult};
use crate::error::{Error, Result};
use crate::flow::Dense;
use crate::graph::{Graph, VertexSet};
use crate::state::{lt, Measure, StateSpace};

/// Largest input an oracle accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
}

impl OracleBudget {
    pub const CLIQUEWIDTH: OracleBudget = OracleBudget { max_n: 16 };
    pub const THREE_WAY_CUT: OracleBudget = OracleBudget { max_n: 12 };

    fn admit(self, g: &Graph) -> Result<()> {
        if g.n() > self.max_n {
            return Err(Error::Refused {
                n: g.n(),
                max: self.max_n,
            });
        }
        Ok(())
    }
}

fn masks(d: &Dense) -> Vec<u32> {
    d.adj
        .iter()
        .map(|ns| ns.iter().fold(0u32, |m, &u| m | 1 << u))
        .collect()
}

/// Vertices outside `eliminated ∪ {v}` reachable from `v` through
/// eliminated vertices: the later neighbours of `v` in the filled graph.
fn later_neighbours(adj: &[u32], eliminated: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut found = 0u32;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = adj[x] & !seen;
        seen |= next;
        found |= next & !eliminated;
        frontier |= next & eliminated;
    }
    found
}

fn mask_weight(wt: &[f64], mut mask: u32) -> f64 {
    let mut total = 0.0;
    while mask != 0 {
        total += wt[mask.trailing_zeros() as usize];
        mask &= mask - 1;
    }
    total
}

/// Minimum over all elimination orderings of the heaviest clique formed:
/// the cliquewidth (treewidth + 1) without a state space, the weighted
/// cliquewidth with one.
pub fn exact_cliquewidth(g: &Graph, ss: Option<&StateSpace>) -> Result<f64> {
    exact_cliquewidth_within(g, ss, OracleBudget::CLIQUEWIDTH)
}

pub fn exact_cliquewidth_within(g: &Graph, ss: Option<&StateSpace>, budget: OracleBudget) -> Result<f64> {
    // one table entry per vertex subset
    let budget = OracleBudget {
        max_n: budget.max_n.min(24),
    };
    budget.admit(g)?;
    let measure = ss.map_or(Measure::Cardinality, Measure::Weighted);
    measure.check(g)?;
    let d = Dense::new(g);
    let n = d.n();
    if n == 0 {
        return Ok(0.0);
    }
    let adj = masks(&d);
    let wt: Vec<f64> = d.ids.iter().map(|&v| measure.weight(v)).collect();
    let full = (1u32 << n) - 1;
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for s in 0..full {
        let here = best[s as usize];
        if here.is_infinite() {
            continue;
        }
        let mut rest = full & !s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let cost = wt[v] + mask_weight(&wt, later_neighbours(&adj, s, v));
            let next = (s | 1 << v) as usize;
            let value = here.max(cost);
            if value < best[next] {
                best[next] = value;
            }
        }
    }
    Ok(best[full as usize])
}

fn separated(adj: &[u32], alive: u32, groups: &[u32; 3]) -> bool {
    let mut reach = [0u32; 3];
    for (i, &g) in groups.iter().enumerate() {
        let mut seen = g;
        let mut frontier = g;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let next = adj[x] & alive & !seen;
            seen |= next;
            frontier |= next;
        }
        reach[i] = seen;
    }
    (0..3).all(|i| (0..3).all(|j| i == j || reach[i] & groups[j] == 0))
}

/// Minimum-weight set of finite-capacity non-terminal vertices whose
/// removal leaves the three terminal sets pairwise disconnected. Ties go to
/// the set with the smallest bitmask over vertex ids in ascending order.
pub fn optimal_three_way_cut(
    g: &Graph,
    wa: &VertexSet,
    wb: &VertexSet,
    wc: &VertexSet,
    cap: &CapacityAssignment,
) -> Result<CutOutcome> {
    OracleBudget::THREE_WAY_CUT.admit(g)?;
    let d = Dense::new(g);
    let n = d.n();
    let adj = masks(&d);
    let mut groups = [0u32; 3];
    for (slot, set) in groups.iter_mut().zip([wa, wb, wc]) {
        if set.is_empty() {
            return Err(Error::domain("terminal sets must be nonempty"));
        }
        g.check_subset(set)?;
        *slot = set.iter().fold(0, |m, v| m | 1 << d.index[v]);
    }
    if groups[0] & groups[1] != 0 || groups[0] & groups[2] != 0 || groups[1] & groups[2] != 0 {
        return Err(Error::domain("terminal sets share a vertex"));
    }
    let terminals = groups[0] | groups[1] | groups[2];
    let mut caps = Vec::with_capacity(n);
    for &v in &d.ids {
        match cap.get(v) {
            None => return Err(Error::domain(format!("no capacity for vertex {v}"))),
            Some(c) => caps.push(c),
        }
    }
    let cuttable = (0..n)
        .filter(|&i| terminals & 1 << i == 0 && matches!(caps[i], Capacity::Finite(_)))
        .fold(0u32, |m, i| m | 1 << i);
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };

    let mut best: Option<(f64, u32)> = None;
    // enumerate subsets of `cuttable` in increasing numeric order
    let mut sub = 0u32;
    loop {
        if separated(&adj, full & !sub, &groups) {
            let w: f64 = (0..n)
                .filter(|&i| sub & 1 << i != 0)
                .map(|i| caps[i].finite().expect("cuttable vertices are finite"))
                .sum();
            if best.is_none_or(|(bw, _)| lt(w, bw)) {
                best = Some((w, sub));
            }
        }
        if sub == cuttable {
            break;
        }
        sub = (sub.wrapping_sub(cuttable)) & cuttable;
    }
    Ok(match best {
        None => CutOutcome::Uncuttable,
        Some((weight, mask)) => CutOutcome::Cut(CutResult {
            cut: (0..n).filter(|&i| mask & 1 << i != 0).map(|i| d.ids[i]).collect(),
            weight,
        }),
    })
}
