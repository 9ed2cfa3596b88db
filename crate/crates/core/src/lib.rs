//! Triangulation of undirected graphs with a constant-factor guarantee on
//! the largest clique, by size or by log state-space weight.
//!
//! The core is a recursive search for small balanced separators
//! ([`decomp`]) driven by vertex min-cuts ([`cuts`]). Around it sit
//! chordality tools and junction trees ([`chordal`]), fill minimization
//! ([`minimize`]), exact references for small inputs ([`oracle`]) and the
//! end-to-end driver ([`pipeline`]).

pub mod chordal;
pub mod cuts;
pub mod decomp;
pub mod error;
mod flow;
pub mod format;
pub mod graph;
pub mod minimize;
pub mod oracle;
pub mod pipeline;
pub mod state;
pub mod triangulate;

pub use chordal::{JunctionTree, Metrics};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, Vertex, VertexSet};
pub use state::{Measure, StateSpace};
pub use triangulate::{EscalationPolicy, Jump, TriangulationResult, Verdict};
