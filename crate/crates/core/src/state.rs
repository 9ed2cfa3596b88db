//! Per-vertex state spaces and the set measure (cardinality or log-weight)
//! that every threshold test is phrased in.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Absolute tolerance for comparisons between sums of log weights.
pub const EPS: f64 = 1e-9;

/// `a < b`, counted as false when the two are within [`EPS`].
pub fn lt(a: f64, b: f64) -> bool {
    a < b - EPS
}

/// `a <= b`, counted as true when the two are within [`EPS`].
pub fn le(a: f64, b: f64) -> bool {
    a <= b + EPS
}

/// Domain sizes `|D(v)| >= 2` for every vertex of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    sizes: BTreeMap<Vertex, u64>,
}

impl StateSpace {
    pub fn uniform(g: &Graph, size: u64) -> Result<Self> {
        Self::new(g.vertices().map(|v| (v, size)).collect())
    }

    /// Rejects any size below 2.
    pub fn new(sizes: BTreeMap<Vertex, u64>) -> Result<Self> {
        if let Some((v, s)) = sizes.iter().find(|(_, &s)| s < 2) {
            return Err(Error::domain(format!(
                "vertex {v} has state size {s}; sizes must be at least 2"
            )));
        }
        Ok(StateSpace { sizes })
    }

    /// Fills in size 2 for graph vertices missing from `sizes`.
    pub fn with_defaults(g: &Graph, sizes: BTreeMap<Vertex, u64>) -> Result<Self> {
        let mut full = sizes;
        for v in g.vertices() {
            full.entry(v).or_insert(2);
        }
        Self::new(full)
    }

    pub fn size(&self, v: Vertex) -> Option<u64> {
        self.sizes.get(&v).copied()
    }

    pub fn weight(&self, v: Vertex) -> Option<f64> {
        self.size(v).map(|s| (s as f64).log2())
    }

    pub fn sizes(&self) -> &BTreeMap<Vertex, u64> {
        &self.sizes
    }

    pub fn covers(&self, g: &Graph) -> Result<()> {
        match g.vertices().find(|v| !self.sizes.contains_key(v)) {
            Some(v) => Err(Error::domain(format!("no state size for vertex {v}"))),
            None => Ok(()),
        }
    }

    pub fn is_uniform_binary(&self) -> bool {
        self.sizes.values().all(|&s| s == 2)
    }
}

/// How a vertex set is measured: by size, or by total log2 state space.
#[derive(Clone, Copy, Debug)]
pub enum Measure<'a> {
    Cardinality,
    Weighted(&'a StateSpace),
}

impl Measure<'_> {
    /// Panics for a vertex missing from a weighted state space; callers
    /// check coverage at their entry point.
    pub fn weight(&self, v: Vertex) -> f64 {
        match self {
            Measure::Cardinality => 1.0,
            Measure::Weighted(ss) => ss.weight(v).unwrap_or_else(|| panic!("no state size for vertex {v}")),
        }
    }

    pub fn of<'v, I>(&self, set: I) -> f64
    where
        I: IntoIterator<Item = &'v Vertex>,
    {
        set.into_iter().map(|&v| self.weight(v)).sum()
    }

    pub fn is_cardinality(&self) -> bool {
        matches!(self, Measure::Cardinality)
    }

    pub(crate) fn check(&self, g: &Graph) -> Result<()> {
        match self {
            Measure::Cardinality => Ok(()),
            Measure::Weighted(ss) => ss.covers(g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_log2() {
        let g = Graph::path(3);
        let ss = StateSpace::new([(1, 2), (2, 8), (3, 3)].into()).unwrap();
        assert_eq!(ss.weight(1), Some(1.0));
        assert_eq!(ss.weight(2), Some(3.0));
        assert!((ss.weight(3).unwrap() - 3f64.log2()).abs() < 1e-15);
        let m = Measure::Weighted(&ss);
        assert!((m.of(&[1, 2]) - 4.0).abs() < 1e-15);
        assert_eq!(Measure::Cardinality.of(&[1, 2, 3]), 3.0);
        assert!(ss.covers(&g).is_ok());
    }

    #[test]
    fn rejects_small_sizes_and_gaps() {
        assert!(StateSpace::new([(1, 1)].into()).is_err());
        let g = Graph::path(3);
        let ss = StateSpace::new([(1, 4)].into()).unwrap();
        assert!(ss.covers(&g).is_err());
        let full = StateSpace::with_defaults(&g, [(1, 4)].into()).unwrap();
        assert_eq!(full.size(3), Some(2));
    }

    #[test]
    fn tolerant_comparisons() {
        assert!(!lt(1.0, 1.0 + 1e-12));
        assert!(lt(1.0, 1.1));
        assert!(le(1.0 + 1e-12, 1.0));
        assert!(!le(1.1, 1.0));
    }
}
