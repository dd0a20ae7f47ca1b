//! Text formats for graphs and minor sequences.
//!
//! Graph file: first significant line `n m`, then `n` vertex labels (one per
//! line), then `m` lines `u v`. `#` starts a comment anywhere on a line.
//!
//! Minor sequence file: first line `fingerprint <hex>`, then one op per line,
//! `DV v` / `DE u v` / `CT u v w`. Same comment rule.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GraphError, LabeledGraph, MinorOp, MinorSequence};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unexpected end of file: {0}")]
    Truncated(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

fn malformed(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        msg: msg.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<LabeledGraph, FormatError> {
    let mut lines = significant_lines(text);
    let (lno, header) = lines
        .next()
        .ok_or_else(|| FormatError::Truncated("missing `n m` header".into()))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(lno, "expected vertex count"))?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(lno, "expected edge count"))?;
    if parts.next().is_some() {
        return Err(malformed(lno, "trailing tokens after `n m`"));
    }
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| FormatError::Truncated("vertex list ended early".into()))?;
        if line.split_whitespace().count() != 1 {
            return Err(malformed(lno, "expected a single vertex label"));
        }
        vertices.push(line.to_string());
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| FormatError::Truncated("edge list ended early".into()))?;
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u.to_string(), v.to_string()),
            _ => return Err(malformed(lno, "expected `u v`")),
        };
        edges.push((u, v));
    }
    if let Some((lno, _)) = lines.next() {
        return Err(malformed(lno, "trailing content after edge list"));
    }
    Ok(LabeledGraph::new(vertices, edges)?)
}

pub fn write_graph(g: &LabeledGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
    for v in g.vertices() {
        let _ = writeln!(out, "{v}");
    }
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.lo(), e.hi());
    }
    out
}

pub fn parse_minor_sequence(text: &str) -> Result<MinorSequence, FormatError> {
    let mut lines = significant_lines(text);
    let (lno, header) = lines
        .next()
        .ok_or_else(|| FormatError::Truncated("missing fingerprint line".into()))?;
    let mut parts = header.split_whitespace();
    match parts.next() {
        Some("fingerprint") => {}
        _ => return Err(malformed(lno, "expected `fingerprint <hex>`")),
    }
    let fp = parts
        .next()
        .ok_or_else(|| malformed(lno, "expected `fingerprint <hex>`"))?;
    if parts.next().is_some() || !fp.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(malformed(lno, "expected `fingerprint <hex>`"));
    }
    let mut ops = Vec::new();
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let op = match toks.as_slice() {
            ["DV", v] => MinorOp::VertexDelete((*v).into()),
            ["DE", u, v] => MinorOp::EdgeDelete((*u).into(), (*v).into()),
            ["CT", u, v, w] => MinorOp::Contract((*u).into(), (*v).into(), (*w).into()),
            _ => return Err(malformed(lno, format!("unrecognized op `{line}`"))),
        };
        ops.push(op);
    }
    Ok(MinorSequence {
        source_fingerprint: fp.to_string(),
        ops,
    })
}

pub fn write_minor_sequence(seq: &MinorSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fingerprint {}", seq.source_fingerprint);
    for op in &seq.ops {
        let _ = writeln!(out, "{op}");
    }
    out
}
