//! Plain-text edge-list format: a header line `n m` followed by `m` lines
//! `u v` with `u < v`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut fields = line.split_ascii_whitespace();
    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
        return parse_err(line_no, "expected exactly two integers");
    };
    let a = a
        .parse()
        .or_else(|_| parse_err(line_no, format!("not a nonnegative integer: {a:?}")))?;
    let b = b
        .parse()
        .or_else(|_| parse_err(line_no, format!("not a nonnegative integer: {b:?}")))?;
    Ok((a, b))
}

impl Graph {
    pub fn parse(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let Some((header_no, header)) = lines.next() else {
            return parse_err(1, "missing header line");
        };
        let (n, m) = parse_pair(header_no, header)?;

        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen_edges = std::collections::HashSet::new();
        let mut seen = 0;
        for (line_no, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (u, v) = parse_pair(line_no, line)?;
            if u == v {
                return parse_err(line_no, format!("self-loop at vertex {u}"));
            }
            if u > v {
                return parse_err(line_no, format!("endpoints must be ordered u < v, got {u} {v}"));
            }
            if v >= n {
                return parse_err(line_no, format!("vertex {v} out of range for n = {n}"));
            }
            if !seen_edges.insert((u, v)) {
                return parse_err(line_no, format!("duplicate edge {u} {v}"));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            seen += 1;
        }
        if seen != m {
            return parse_err(header_no, format!("header declares {m} edges, found {seen}"));
        }
        Ok(Graph::from_adjacency(adjacency))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * (self.edge_count() + 1));
        let _ = writeln!(out, "{} {}", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Serde form of a graph: vertex count and `u < v` edge pairs.
#[derive(Serialize, Deserialize)]
pub(super) struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl From<Graph> for EdgeList {
    fn from(g: Graph) -> Self {
        EdgeList {
            n: g.vertex_count(),
            edges: g.edges().collect(),
        }
    }
}

impl TryFrom<EdgeList> for Graph {
    type Error = Error;
    fn try_from(e: EdgeList) -> Result<Graph> {
        Graph::from_edges(e.n, e.edges)
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Graph> {
        Graph::parse(s)
    }
}
