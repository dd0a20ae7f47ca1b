//! Discrete graphical models: a labeled graph plus one non-negative
//! potential table per vertex and per edge, over a uniform cardinality `q`.
//!
//! Tables hold [`ExactNumber`]s. Inference has two numeric paths: exact
//! rational arithmetic (everything correctness-critical) and `f64`
//! (benchmarks only); the float path reads the same rational tables.

mod brute;
mod junction;

pub mod io;

pub use brute::{marginal, partition_brute, partition_brute_with_cap, DEFAULT_ASSIGNMENT_CAP};
pub use junction::{
    partition_junction_tree, partition_junction_tree_with_budget, InferenceMethod,
    InferenceReport, NumericMode, ZValue, DEFAULT_TABLE_BUDGET,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Edge, GraphError, Label, LabeledGraph};
use crate::num::ExactNumber;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cardinality must be at least 2, got {0}")]
    BadCardinality(usize),
    #[error("vertex `{0}` has no potential table")]
    MissingVertexTable(Label),
    #[error("edge {0} has no potential table")]
    MissingEdgeTable(Edge),
    #[error("table for `{0}` has {1} entries, expected {2}")]
    TableSize(String, usize, usize),
    #[error("table refers to `{0}` which is not in the graph")]
    UnknownScope(String),
    #[error("state {value} out of range for cardinality {q}")]
    BadState { value: usize, q: usize },
    #[error("enumeration needs {needed} assignments, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("partition function is zero")]
    ZeroPartition,
    #[error("junction tree needs {needed} table entries, budget is {budget}")]
    MemoryBudgetExceeded { needed: u128, budget: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graphical model: graph, cardinality, and exact potential tables.
///
/// Edge tables are stored against the canonical edge orientation
/// (`lo < hi`), row-major with the `lo` state as the slow index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    graph: LabeledGraph,
    q: usize,
    vertex_potentials: BTreeMap<Label, Vec<ExactNumber>>,
    edge_potentials: BTreeMap<Edge, Vec<ExactNumber>>,
}

impl Model {
    pub fn new(
        graph: LabeledGraph,
        q: usize,
        vertex_potentials: BTreeMap<Label, Vec<ExactNumber>>,
        edge_potentials: BTreeMap<Edge, Vec<ExactNumber>>,
    ) -> Result<Self, ModelError> {
        if q < 2 {
            return Err(ModelError::BadCardinality(q));
        }
        for v in vertex_potentials.keys() {
            if !graph.contains_vertex(v) {
                return Err(ModelError::UnknownScope(v.clone()));
            }
        }
        for e in edge_potentials.keys() {
            if !graph.contains_edge(e.lo(), e.hi()) {
                return Err(ModelError::UnknownScope(e.to_string()));
            }
        }
        for v in graph.vertices() {
            let table = vertex_potentials
                .get(v)
                .ok_or_else(|| ModelError::MissingVertexTable(v.clone()))?;
            if table.len() != q {
                return Err(ModelError::TableSize(v.clone(), table.len(), q));
            }
        }
        for e in graph.edges() {
            let table = edge_potentials
                .get(e)
                .ok_or_else(|| ModelError::MissingEdgeTable(e.clone()))?;
            if table.len() != q * q {
                return Err(ModelError::TableSize(e.to_string(), table.len(), q * q));
            }
        }
        Ok(Model {
            graph,
            q,
            vertex_potentials,
            edge_potentials,
        })
    }

    /// All-ones potentials on every vertex and edge.
    pub fn uniform(graph: LabeledGraph, q: usize) -> Result<Self, ModelError> {
        let ones_v = vec![ExactNumber::one(); q];
        let ones_e = vec![ExactNumber::one(); q * q];
        let vp = graph.vertices().map(|v| (v.clone(), ones_v.clone())).collect();
        let ep = graph.edges().map(|e| (e.clone(), ones_e.clone())).collect();
        Model::new(graph, q, vp, ep)
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn vertex_potential(&self, v: &str) -> &[ExactNumber] {
        &self.vertex_potentials[v]
    }

    /// Table entry for edge `{u, v}` at states `(a, b)` of `(u, v)`.
    pub fn edge_value(&self, u: &str, v: &str, a: usize, b: usize) -> &ExactNumber {
        let e = Edge::new(u, v).expect("distinct endpoints");
        let table = &self.edge_potentials[&e];
        if e.lo() == u {
            &table[a * self.q + b]
        } else {
            &table[b * self.q + a]
        }
    }

    /// Canonical-orientation table for an edge.
    pub fn edge_potential(&self, e: &Edge) -> &[ExactNumber] {
        &self.edge_potentials[e]
    }

    /// Replaces one vertex table, returning the modified model.
    pub fn with_vertex_potential(
        mut self,
        v: &str,
        table: Vec<ExactNumber>,
    ) -> Result<Self, ModelError> {
        if !self.graph.contains_vertex(v) {
            return Err(ModelError::UnknownScope(v.to_string()));
        }
        if table.len() != self.q {
            return Err(ModelError::TableSize(v.to_string(), table.len(), self.q));
        }
        self.vertex_potentials.insert(v.to_string(), table);
        Ok(self)
    }

    /// Replaces one edge table; `table[a * q + b]` is the value at state `a`
    /// of `u` and `b` of `v`.
    pub fn with_edge_potential(
        mut self,
        u: &str,
        v: &str,
        table: Vec<ExactNumber>,
    ) -> Result<Self, ModelError> {
        let e = Edge::new(u, v)?;
        if !self.graph.contains_edge(u, v) {
            return Err(ModelError::UnknownScope(e.to_string()));
        }
        if table.len() != self.q * self.q {
            return Err(ModelError::TableSize(e.to_string(), table.len(), self.q * self.q));
        }
        let canonical = if e.lo() == u {
            table
        } else {
            transpose(&table, self.q)
        };
        self.edge_potentials.insert(e, canonical);
        Ok(self)
    }

    /// Canonical text dump, used for fingerprinting model artifacts.
    pub fn canonical_dump(&self) -> String {
        io::write_uai(self)
    }
}

pub(crate) fn transpose(table: &[ExactNumber], q: usize) -> Vec<ExactNumber> {
    let mut out = vec![ExactNumber::zero(); q * q];
    for a in 0..q {
        for b in 0..q {
            out[b * q + a] = table[a * q + b].clone();
        }
    }
    out
}

/// Zeroes a vertex potential everywhere except `value`, leaving the graph
/// unchanged. Summing the clamped partition functions over all values
/// recovers the original partition function.
pub fn clamp(m: &Model, v: &str, value: usize) -> Result<Model, ModelError> {
    if !m.graph.contains_vertex(v) {
        return Err(ModelError::UnknownScope(v.to_string()));
    }
    if value >= m.q {
        return Err(ModelError::BadState { value, q: m.q });
    }
    let mut table = vec![ExactNumber::zero(); m.q];
    table[value] = m.vertex_potentials[v][value].clone();
    m.clone().with_vertex_potential(v, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    #[test]
    fn construction_validates_tables() {
        let g = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let err = Model::new(g.clone(), 2, BTreeMap::new(), BTreeMap::new());
        assert!(matches!(err, Err(ModelError::MissingVertexTable(_))));
        assert!(matches!(
            Model::new(g, 1, BTreeMap::new(), BTreeMap::new()),
            Err(ModelError::BadCardinality(1))
        ));
    }

    #[test]
    fn edge_orientation_is_transparent() {
        let g = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let table: Vec<ExactNumber> = ["1", "2", "3", "4"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let m = Model::uniform(g, 2)
            .unwrap()
            .with_edge_potential("b", "a", table)
            .unwrap();
        // table was given for (b, a): entry (a=1, b=0) is table[0*2+1] = 2
        assert_eq!(m.edge_value("b", "a", 0, 1), &"2".parse().unwrap());
        assert_eq!(m.edge_value("a", "b", 1, 0), &"2".parse().unwrap());
        assert_eq!(m.edge_value("a", "b", 0, 1), &"3".parse().unwrap());
    }

    #[test]
    fn clamp_checks_inputs() {
        let m = Model::uniform(grid_graph(2), 2).unwrap();
        assert!(matches!(
            clamp(&m, "9,9", 0),
            Err(ModelError::UnknownScope(_))
        ));
        assert!(matches!(
            clamp(&m, "0,0", 5),
            Err(ModelError::BadState { value: 5, q: 2 })
        ));
        let c = clamp(&m, "0,0", 1).unwrap();
        assert_eq!(c.vertex_potential("0,0")[0], ExactNumber::zero());
        assert_eq!(c.vertex_potential("0,0")[1], ExactNumber::one());
        assert_eq!(c.graph(), m.graph());
    }
}
