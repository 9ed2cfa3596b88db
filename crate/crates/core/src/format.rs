//! Text formats: PACE-style `.gr` graphs, the state-space sidecar and
//! `.td` junction trees.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::chordal::JunctionTree;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::state::StateSpace;

/// Lines that carry content, with 1-based line numbers. Blank lines and
/// `c` comments are dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing `p tw <n> <m>` header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "tw" {
        return Err(Error::parse(hline, "malformed header, expected `p tw <n> <m>`"));
    }
    let n: usize = number(header[2], hline, "vertex count")?;
    let m: usize = number(header[3], hline, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(Error::parse(line, "expected an edge line `<u> <v>`"));
        }
        let u: Vertex = number(toks[0], line, "vertex id")?;
        let v: Vertex = number(toks[1], line, "vertex id")?;
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(Error::parse(line, format!("vertex {x} out of range 1..={n}")));
            }
        }
        if u == v {
            return Err(Error::parse(line, format!("self-loop on vertex {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            hline,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(1..=n, edges)
}

/// Writes a graph whose vertices are exactly `1..=n`.
pub fn write_graph(g: &Graph) -> Result<String> {
    if g.vertices().enumerate().any(|(i, v)| v != i + 1) {
        return Err(Error::domain("`.gr` output needs vertices numbered 1..=n"));
    }
    let mut out = format!("p tw {} {}\n", g.n(), g.m());
    for e in g.edges() {
        writeln!(out, "{} {}", e.lo(), e.hi()).unwrap();
    }
    Ok(out)
}

/// Parses `<v> <size>` lines. Vertices not listed get size 2.
pub fn parse_state_space(text: &str, g: &Graph) -> Result<StateSpace> {
    let mut sizes = BTreeMap::new();
    for (line, toks) in content_lines(text) {
        if toks.len() != 2 {
            return Err(Error::parse(line, "expected `<v> <size>`"));
        }
        let v: Vertex = number(toks[0], line, "vertex id")?;
        let s: u64 = number(toks[1], line, "state size")?;
        if !g.contains(v) {
            return Err(Error::parse(line, format!("vertex {v} is not in the graph")));
        }
        if s < 2 {
            return Err(Error::parse(line, format!("state size {s} is below 2")));
        }
        if sizes.insert(v, s).is_some() {
            return Err(Error::parse(line, format!("vertex {v} listed twice")));
        }
    }
    StateSpace::with_defaults(g, sizes)
}

pub fn write_state_space(ss: &StateSpace) -> String {
    let mut out = String::new();
    for (v, s) in ss.sizes() {
        writeln!(out, "{v} {s}").unwrap();
    }
    out
}

/// `.td` text for a junction tree over a graph with `n` vertices.
pub fn write_td(jt: &JunctionTree, n: usize) -> String {
    let mut out = format!("s td {} {} {}\n", jt.bags.len(), jt.max_bag_size(), n);
    for (i, bag) in jt.bags.iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in &jt.edges {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
    out
}

/// Parses `.td` text. Returns the tree and the declared vertex count.
pub fn parse_td(text: &str) -> Result<(JunctionTree, usize)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(0, "missing `s td` header"))?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(Error::parse(
            hline,
            "malformed header, expected `s td <bags> <width> <n>`",
        ));
    }
    let nbags: usize = number(header[2], hline, "bag count")?;
    let width: usize = number(header[3], hline, "bag size")?;
    let n: usize = number(header[4], hline, "vertex count")?;

    let mut bags = vec![None; nbags];
    let mut edges = Vec::new();
    for (line, toks) in lines {
        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(Error::parse(line, "bag line without an id"));
            }
            let id: usize = number(toks[1], line, "bag id")?;
            if id == 0 || id > nbags {
                return Err(Error::parse(line, format!("bag id {id} out of range")));
            }
            let mut bag = crate::graph::VertexSet::new();
            for t in &toks[2..] {
                let v: Vertex = number(t, line, "vertex id")?;
                if v == 0 || v > n {
                    return Err(Error::parse(line, format!("vertex {v} out of range")));
                }
                bag.insert(v);
            }
            if bags[id - 1].replace(bag).is_some() {
                return Err(Error::parse(line, format!("bag {id} defined twice")));
            }
        } else {
            if toks.len() != 2 {
                return Err(Error::parse(line, "expected a tree edge `<bag> <bag>`"));
            }
            let a: usize = number(toks[0], line, "bag id")?;
            let b: usize = number(toks[1], line, "bag id")?;
            if a == 0 || b == 0 || a > nbags || b > nbags {
                return Err(Error::parse(line, "tree edge names an unknown bag"));
            }
            edges.push((a - 1, b - 1));
        }
    }
    let bags: Vec<_> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(hline, format!("bag {} missing", i + 1))))
        .collect::<Result<_>>()?;
    let jt = JunctionTree { bags, edges };
    if jt.max_bag_size() != width {
        return Err(Error::parse(hline, "declared bag size does not match the bags"));
    }
    Ok((jt, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_smallest_graph() {
        let g = parse_graph("p tw 2 1\n1 2\n").unwrap();
        assert_eq!(g.vertex_set(), [1, 2].into());
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn parses_chain_with_comments() {
        let g = parse_graph("c the chain a-b-c-d-e\np tw 5 4\n1 2\n2 3\n\n3 4\nc mid\n4 5\n").unwrap();
        assert_eq!(g, Graph::path(5));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_graph("p tw 3 3\n1 2\n2 1\n2 3\n").unwrap();
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            parse_graph("p tw 3 1\n1 1\n"),
            Err(Error::parse(2, "self-loop on vertex 1"))
        );
        assert!(matches!(
            parse_graph("p tw 3 1\n1 4\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("c hi\np td 3 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_graph(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_graph("p tw 3 2\n1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn graph_text_round_trip() {
        let g = Graph::grid(3, 3);
        assert_eq!(parse_graph(&write_graph(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn state_space_sidecar() {
        let g = Graph::path(4);
        let ss = parse_state_space("c sizes\n1 3\n4 21\n", &g).unwrap();
        assert_eq!(ss.size(1), Some(3));
        assert_eq!(ss.size(2), Some(2));
        assert_eq!(ss.size(4), Some(21));
        assert!(parse_state_space("1 1\n", &g).is_err());
        assert!(parse_state_space("7 3\n", &g).is_err());
        let again = parse_state_space(&write_state_space(&ss), &g).unwrap();
        assert_eq!(again, ss);
    }

    #[test]
    fn td_round_trip() {
        let jt = JunctionTree {
            bags: vec![[1, 2, 3].into(), [1, 3, 4].into()],
            edges: vec![(0, 1)],
        };
        let text = write_td(&jt, 4);
        assert_eq!(text, "s td 2 3 4\nb 1 1 2 3\nb 2 1 3 4\n1 2\n");
        let (back, n) = parse_td(&text).unwrap();
        assert_eq!(n, 4);
        assert_eq!(back, jt);
    }
}
