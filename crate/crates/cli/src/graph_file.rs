//! Plain-text graph files.
//!
//! ```text
//! # comment
//! v <id> <mass>
//! e <id> <id> <weight>
//! omega <id> <id> ...
//! ```
//!
//! Lines may come in any order; an edge may name a vertex declared further down.

use std::fmt::Write as _;
use std::sync::Arc;

use isocap::graph::{GraphBuilder, SteklovDomain, WeightedGraph};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Graph(String),
}

fn at(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line { line, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: WeightedGraph<f64>,
    /// Interior indices from the `omega` line.
    pub omega: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn domain(&self) -> Result<SteklovDomain<f64>, isocap::Error> {
        let omega = self.omega.as_ref().ok_or_else(|| isocap::Error::Input("graph file has no `omega` line".into()))?;
        SteklovDomain::new(Arc::new(self.graph.clone()), omega)
    }
}

fn positive(tok: &str, what: &str, line: usize) -> Result<f64, ParseError> {
    let x: f64 = tok.parse().map_err(|_| at(line, format!("{what} `{tok}` is not a number")))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(at(line, format!("{what} must be positive, got `{tok}`")));
    }
    Ok(x)
}

pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut vertices: Vec<(usize, &str, f64)> = Vec::new();
    let mut edges: Vec<(usize, &str, &str, f64)> = Vec::new();
    let mut omega: Option<(usize, Vec<&str>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["v", id, mass] => vertices.push((line, id, positive(mass, "mass", line)?)),
            ["v", ..] => return Err(at(line, "expected `v <id> <mass>`")),
            ["e", a, b, w] => edges.push((line, a, b, positive(w, "weight", line)?)),
            ["e", ..] => return Err(at(line, "expected `e <id> <id> <weight>`")),
            ["omega", ids @ ..] => {
                if omega.is_some() {
                    return Err(at(line, "duplicate `omega` line"));
                }
                if ids.is_empty() {
                    return Err(at(line, "`omega` needs at least one vertex"));
                }
                omega = Some((line, ids.to_vec()));
            }
            [other, ..] => return Err(at(line, format!("unknown directive `{other}`"))),
        }
    }
    let mut b = GraphBuilder::new();
    for &(line, id, mass) in &vertices {
        b.add_vertex(id, mass).map_err(|e| at(line, e.to_string()))?;
    }
    for &(line, a, c, w) in &edges {
        b.add_edge_by_id(a, c, w).map_err(|e| at(line, e.to_string()))?;
    }
    let graph = b.build().map_err(|e| ParseError::Graph(e.to_string()))?;
    let omega = match omega {
        None => None,
        Some((line, ids)) => {
            let mut idx = Vec::with_capacity(ids.len());
            for id in ids {
                let v = graph.index_of(id).ok_or_else(|| at(line, format!("undeclared vertex `{id}` in omega")))?;
                if idx.contains(&v) {
                    return Err(at(line, format!("vertex `{id}` repeated in omega")));
                }
                idx.push(v);
            }
            Some(idx)
        }
    };
    Ok(GraphFile { graph, omega })
}

/// Inverse of [`parse_graph`]; numbers use the shortest round-tripping form.
pub fn emit_graph(file: &GraphFile) -> String {
    let g = &file.graph;
    let mut out = String::new();
    for i in 0..g.n() {
        let _ = writeln!(out, "v {} {}", g.id(i), g.mass(i));
    }
    for e in g.edges() {
        let _ = writeln!(out, "e {} {} {}", g.id(e.u), g.id(e.v), e.w);
    }
    if let Some(omega) = &file.omega {
        let ids: Vec<&str> = omega.iter().map(|&v| g.id(v)).collect();
        let _ = writeln!(out, "omega {}", ids.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertices() {
        let f = parse_graph("v a 1\nv b 2.5\ne a b 3\n").unwrap();
        assert_eq!(f.graph.n(), 2);
        assert_eq!(f.graph.weight(0, 1), Some(3.0));
        assert!(f.omega.is_none());
    }

    #[test]
    fn zero_weight_cites_line() {
        let err = parse_graph("v a 1\nv b 1\n# note\ne a b 0\n").unwrap_err();
        assert_eq!(err, ParseError::Line { line: 4, msg: "weight must be positive, got `0`".into() });
    }

    #[test]
    fn malformed_and_undeclared() {
        assert!(matches!(parse_graph("v a\n"), Err(ParseError::Line { line: 1, .. })));
        assert!(matches!(parse_graph("v a 1\nv b 1\ne a c 1\n"), Err(ParseError::Line { line: 3, .. })));
        assert!(matches!(parse_graph("v a 1\nv a 1\n"), Err(ParseError::Line { line: 2, .. })));
        assert!(matches!(parse_graph("v a 1\nv b 1\ne a b 1\nomega z\n"), Err(ParseError::Line { line: 4, .. })));
        assert!(matches!(parse_graph("v a 1\nv b 1\ne a b 1\nomega a\nomega b\n"), Err(ParseError::Line { line: 5, .. })));
        assert!(matches!(parse_graph("v a -1\n"), Err(ParseError::Line { line: 1, .. })));
        assert!(matches!(parse_graph("x a\n"), Err(ParseError::Line { line: 1, .. })));
    }

    #[test]
    fn edges_before_vertices() {
        let f = parse_graph("e a b 1 # trailing comment\nv a 1\nv b 1\n").unwrap();
        assert_eq!(f.graph.edges().len(), 1);
    }

    #[test]
    fn path_domain() {
        let text = "v 0 1\nv 1 1\nv 2 1\nv 3 1\nv 4 1\ne 0 1 1\ne 1 2 1\ne 2 3 1\ne 3 4 1\nomega 1 2 3\n";
        let d = parse_graph(text).unwrap().domain().unwrap();
        assert_eq!(d.interior(), &[1, 2, 3]);
        assert_eq!(d.boundary(), &[0, 4]);
    }

    #[test]
    fn round_trip() {
        let text = "v x 0.1\nv y 3.3333333333333335\nv z 7e-5\ne x y 0.30000000000000004\ne y z 2\nomega y\n";
        let f = parse_graph(text).unwrap();
        let again = parse_graph(&emit_graph(&f)).unwrap();
        assert_eq!(again, f);
        assert_eq!(emit_graph(&again), emit_graph(&f));
    }
}
