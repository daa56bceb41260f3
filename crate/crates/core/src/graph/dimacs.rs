//! DIMACS `.col` edge format.
//!
//! ```text
//! c optional comments
//! p edge <n> <m>
//! e <u> <v>        (1-based vertex indices)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{Graph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: duplicate problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: edge before the problem line")]
    EdgeBeforeHeader { line: usize },
    #[error("line {line}: malformed edge line `{text}`")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range [1, {n}]")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: unknown line type `{text}`")]
    UnknownLine { line: usize, text: String },
    #[error("missing problem line")]
    MissingHeader,
}

/// Parses a DIMACS edge file. Duplicate edges and both orientations are
/// accepted; self-loops are rejected.
pub fn parse_dimacs(text: &str) -> Result<Graph, DimacsError> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        let mut fields = trimmed.split_whitespace();
        match fields.next() {
            None | Some("c") => {}
            Some("p") => {
                if graph.is_some() {
                    return Err(DimacsError::DuplicateHeader { line });
                }
                let malformed = || DimacsError::MalformedHeader {
                    line,
                    text: trimmed.to_string(),
                };
                let format = fields.next().ok_or_else(malformed)?;
                if format != "edge" && format != "col" {
                    return Err(malformed());
                }
                let n: usize = parse_field(fields.next()).ok_or_else(malformed)?;
                let _m: usize = parse_field(fields.next()).ok_or_else(malformed)?;
                if fields.next().is_some() {
                    return Err(malformed());
                }
                graph = Some(Graph::empty(n).map_err(|_| malformed())?);
            }
            Some("e") => {
                let g = graph.as_mut().ok_or(DimacsError::EdgeBeforeHeader { line })?;
                let malformed = || DimacsError::MalformedEdge {
                    line,
                    text: trimmed.to_string(),
                };
                let u: usize = parse_field(fields.next()).ok_or_else(malformed)?;
                let v: usize = parse_field(fields.next()).ok_or_else(malformed)?;
                if fields.next().is_some() {
                    return Err(malformed());
                }
                let n = g.n();
                for vertex in [u, v] {
                    if vertex == 0 || vertex > n {
                        return Err(DimacsError::VertexOutOfRange { line, vertex, n });
                    }
                }
                match g.add_edge(u - 1, v - 1) {
                    Ok(()) => {}
                    Err(GraphError::SelfLoop(_)) => return Err(DimacsError::SelfLoop { line, vertex: u }),
                    Err(_) => unreachable!("range checked above"),
                }
            }
            Some(_) => {
                return Err(DimacsError::UnknownLine {
                    line,
                    text: trimmed.to_string(),
                })
            }
        }
    }
    graph.ok_or(DimacsError::MissingHeader)
}

fn parse_field(field: Option<&str>) -> Option<usize> {
    field?.parse().ok()
}

/// Canonical DIMACS text: header, then edges with `u < v` in sorted order.
pub fn to_dimacs(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("p edge {} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}
