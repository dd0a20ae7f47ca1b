//! Simple undirected graphs with stable string labels.
//!
//! Labels are the identity of a vertex: graph equality is label-exact, and
//! minor sequences refer to vertices by label so they replay byte-for-byte.

mod minor;
mod treewidth;

pub mod io;

pub use minor::{
    apply_minor_op, apply_minor_sequence, diagnose_minor_sequence, validate_minor_sequence,
    MinorOp, MinorSequence,
};
pub use treewidth::{
    treewidth_exact, treewidth_exact_with_budget, treewidth_upper, TreewidthResult,
    DEFAULT_TREEWIDTH_BUDGET,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub type Label = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex `{0}` not present")]
    MissingVertex(Label),
    #[error("edge {{{0}, {1}}} not present")]
    MissingEdge(Label, Label),
    #[error("label `{0}` collides with a surviving vertex")]
    LabelCollision(Label),
    #[error("label `{0}` is invalid (empty, whitespace, or reserved character)")]
    InvalidLabel(Label),
    #[error("self-loop on `{0}` not allowed")]
    SelfLoop(Label),
    #[error("source fingerprint mismatch: sequence expects {expected}, graph has {found}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("op {index} failed: {source}")]
    SequenceOp {
        index: usize,
        #[source]
        source: Box<GraphError>,
    },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph has {0} vertices, beyond the supported limit of 63")]
    TooLarge(usize),
}

/// An unordered vertex pair in canonical (sorted) orientation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Label, Label);

impl Edge {
    pub fn new(u: impl Into<Label>, v: impl Into<Label>) -> Result<Self, GraphError> {
        let (u, v) = (u.into(), v.into());
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(if u < v { Edge(u, v) } else { Edge(v, u) })
    }

    pub fn lo(&self) -> &Label {
        &self.0
    }

    pub fn hi(&self) -> &Label {
        &self.1
    }

    pub fn touches(&self, v: &str) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`; panics if the edge does not touch `v`.
    pub fn other(&self, v: &str) -> &Label {
        if self.0 == v {
            &self.1
        } else {
            assert!(self.1 == v, "edge {self} does not touch {v}");
            &self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

pub(crate) fn check_label(l: &str) -> Result<(), GraphError> {
    let bad = l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == '#' || c == ':');
    if bad {
        Err(GraphError::InvalidLabel(l.to_string()))
    } else {
        Ok(())
    }
}

/// A simple undirected graph over string-labeled vertices.
///
/// Immutable after construction; minor operations return fresh graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: BTreeSet<Label>,
    edges: BTreeSet<Edge>,
}

impl LabeledGraph {
    pub fn empty() -> Self {
        LabeledGraph {
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<Label>,
        E: IntoIterator<Item = (Label, Label)>,
    {
        let mut vs = BTreeSet::new();
        for v in vertices {
            let v = v.into();
            check_label(&v)?;
            vs.insert(v);
        }
        let mut es = BTreeSet::new();
        for (u, v) in edges {
            let e = Edge::new(u, v)?;
            for end in [e.lo(), e.hi()] {
                if !vs.contains(end) {
                    return Err(GraphError::MissingVertex(end.clone()));
                }
            }
            es.insert(e);
        }
        Ok(LabeledGraph {
            vertices: vs,
            edges: es,
        })
    }

    /// Convenience constructor: vertex set is the union of edge endpoints.
    pub fn from_edges<'a, I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs: Vec<(Label, Label)> = edges
            .into_iter()
            .map(|(u, v)| (u.to_string(), v.to_string()))
            .collect();
        let mut vs: BTreeSet<Label> = BTreeSet::new();
        for (u, v) in &pairs {
            vs.insert(u.clone());
            vs.insert(v.clone());
        }
        LabeledGraph::new(vs, pairs)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Label> {
        self.vertices.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn contains_edge(&self, u: &str, v: &str) -> bool {
        Edge::new(u, v).map(|e| self.edges.contains(&e)).unwrap_or(false)
    }

    pub fn neighbors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a Label> + 'a {
        self.edges.iter().filter_map(move |e| {
            if e.touches(v) {
                Some(e.other(v))
            } else {
                None
            }
        })
    }

    pub fn degree(&self, v: &str) -> usize {
        self.neighbors(v).count()
    }

    /// Adjacency as an index map over the canonical vertex order.
    pub fn adjacency_indexed(&self) -> (Vec<Label>, Vec<BTreeSet<usize>>) {
        let order: Vec<Label> = self.vertices.iter().cloned().collect();
        let index: BTreeMap<&str, usize> = order
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut adj = vec![BTreeSet::new(); order.len()];
        for e in &self.edges {
            let (i, j) = (index[e.lo().as_str()], index[e.hi().as_str()]);
            adj[i].insert(j);
            adj[j].insert(i);
        }
        (order, adj)
    }

    pub fn connected_components(&self) -> Vec<BTreeSet<Label>> {
        let mut seen: BTreeSet<&Label> = BTreeSet::new();
        let mut comps = Vec::new();
        for start in &self.vertices {
            if seen.contains(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                comp.insert(v.clone());
                for w in self.neighbors(v) {
                    if !seen.contains(w) {
                        stack.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Canonical SHA-256 fingerprint of the labeled graph.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"graph\n");
        hasher.update(format!("{} {}\n", self.vertex_count(), self.edge_count()));
        for v in &self.vertices {
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        for e in &self.edges {
            hasher.update(format!("{} {}\n", e.lo(), e.hi()));
        }
        hex_string(&hasher.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// The g-by-g grid graph with vertices labeled `row,col`.
pub fn grid_graph(g: usize) -> LabeledGraph {
    assert!(g >= 1, "grid side must be at least 1");
    let label = |r: usize, c: usize| format!("{r},{c}");
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for r in 0..g {
        for c in 0..g {
            vertices.push(label(r, c));
            if r + 1 < g {
                edges.push((label(r, c), label(r + 1, c)));
            }
            if c + 1 < g {
                edges.push((label(r, c), label(r, c + 1)));
            }
        }
    }
    LabeledGraph::new(vertices, edges).expect("grid construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            LabeledGraph::new(["a"], [("a".into(), "a".into())]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            LabeledGraph::new(["a"], [("a".into(), "b".into())]),
            Err(GraphError::MissingVertex(_))
        ));
        assert!(matches!(
            LabeledGraph::new(["a b"], std::iter::empty()),
            Err(GraphError::InvalidLabel(_))
        ));
        assert!(matches!(
            LabeledGraph::new([""], std::iter::empty()),
            Err(GraphError::InvalidLabel(_))
        ));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.contains_edge("b", "a"));
    }

    #[test]
    fn grid_counts() {
        for (g, vs, es) in [(1, 1, 0), (2, 4, 4), (3, 9, 12), (4, 16, 24)] {
            let grid = grid_graph(g);
            assert_eq!(grid.vertex_count(), vs, "side {g}");
            assert_eq!(grid.edge_count(), es, "side {g}");
            assert_eq!(es, 2 * g * (g - 1));
        }
    }

    #[test]
    fn fingerprint_is_label_sensitive() {
        let a = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let b = LabeledGraph::from_edges([("a", "c")]).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

    #[test]
    fn neighbors_and_components() {
        let g = LabeledGraph::new(
            ["a", "b", "c", "d"],
            [("a".into(), "b".into()), ("b".into(), "c".into())],
        )
        .unwrap();
        let nbrs: Vec<_> = g.neighbors("b").cloned().collect();
        assert_eq!(nbrs, vec!["a".to_string(), "c".to_string()]);
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().any(|c| c.len() == 1 && c.contains("d")));
    }
}
