//! Minor operations and replayable minor sequences.

use std::collections::BTreeSet;
use std::fmt;

use super::{check_label, Edge, GraphError, Label, LabeledGraph};

/// One step of a minor derivation: vertex deletion, edge deletion, or edge
/// contraction with an explicit fresh label for the merged vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinorOp {
    VertexDelete(Label),
    EdgeDelete(Label, Label),
    Contract(Label, Label, Label),
}

impl fmt::Display for MinorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinorOp::VertexDelete(v) => write!(f, "DV {v}"),
            MinorOp::EdgeDelete(u, v) => write!(f, "DE {u} {v}"),
            MinorOp::Contract(u, v, w) => write!(f, "CT {u} {v} {w}"),
        }
    }
}

/// An ordered, replayable list of minor operations pinned to a source graph
/// by its fingerprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorSequence {
    pub source_fingerprint: String,
    pub ops: Vec<MinorOp>,
}

impl MinorSequence {
    pub fn for_source(source: &LabeledGraph, ops: Vec<MinorOp>) -> Self {
        MinorSequence {
            source_fingerprint: source.fingerprint(),
            ops,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Applies a single minor operation, leaving the input graph untouched.
///
/// Contraction removes both endpoints and introduces the new label adjacent
/// to every former neighbor of either endpoint; parallel edges merge because
/// the graph is simple.
pub fn apply_minor_op(g: &LabeledGraph, op: &MinorOp) -> Result<LabeledGraph, GraphError> {
    match op {
        MinorOp::VertexDelete(v) => {
            if !g.contains_vertex(v) {
                return Err(GraphError::MissingVertex(v.clone()));
            }
            let vertices: Vec<Label> = g.vertices().filter(|x| *x != v).cloned().collect();
            let edges: Vec<(Label, Label)> = g
                .edges()
                .filter(|e| !e.touches(v))
                .map(|e| (e.lo().clone(), e.hi().clone()))
                .collect();
            LabeledGraph::new(vertices, edges)
        }
        MinorOp::EdgeDelete(u, v) => {
            let target = Edge::new(u.clone(), v.clone())?;
            if !g.contains_edge(u, v) {
                return Err(GraphError::MissingEdge(u.clone(), v.clone()));
            }
            let vertices: Vec<Label> = g.vertices().cloned().collect();
            let edges: Vec<(Label, Label)> = g
                .edges()
                .filter(|e| **e != target)
                .map(|e| (e.lo().clone(), e.hi().clone()))
                .collect();
            LabeledGraph::new(vertices, edges)
        }
        MinorOp::Contract(u, v, new_label) => {
            if !g.contains_vertex(u) {
                return Err(GraphError::MissingVertex(u.clone()));
            }
            if !g.contains_vertex(v) {
                return Err(GraphError::MissingVertex(v.clone()));
            }
            if !g.contains_edge(u, v) {
                return Err(GraphError::MissingEdge(u.clone(), v.clone()));
            }
            check_label(new_label)?;
            // Survivors are everything but u and v; the new label must be
            // fresh among them (it may reuse u or v themselves).
            if g.contains_vertex(new_label) && new_label != u && new_label != v {
                return Err(GraphError::LabelCollision(new_label.clone()));
            }
            let merged_neighbors: BTreeSet<Label> = g
                .neighbors(u)
                .chain(g.neighbors(v))
                .filter(|w| *w != u && *w != v)
                .cloned()
                .collect();
            let mut vertices: Vec<Label> = g
                .vertices()
                .filter(|x| *x != u && *x != v)
                .cloned()
                .collect();
            vertices.push(new_label.clone());
            let mut edges: Vec<(Label, Label)> = g
                .edges()
                .filter(|e| !e.touches(u) && !e.touches(v))
                .map(|e| (e.lo().clone(), e.hi().clone()))
                .collect();
            for w in merged_neighbors {
                edges.push((new_label.clone(), w));
            }
            LabeledGraph::new(vertices, edges)
        }
    }
}

/// Replays a minor sequence left to right. The sequence's fingerprint must
/// match the graph; per-op failures carry the offending op index.
pub fn apply_minor_sequence(
    g: &LabeledGraph,
    seq: &MinorSequence,
) -> Result<LabeledGraph, GraphError> {
    let found = g.fingerprint();
    if found != seq.source_fingerprint {
        return Err(GraphError::FingerprintMismatch {
            expected: seq.source_fingerprint.clone(),
            found,
        });
    }
    let mut current = g.clone();
    for (index, op) in seq.ops.iter().enumerate() {
        current = apply_minor_op(&current, op).map_err(|e| GraphError::SequenceOp {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(current)
}

/// True iff replaying `seq` on `src` succeeds and yields exactly `target`
/// (label-exact comparison).
pub fn validate_minor_sequence(
    src: &LabeledGraph,
    seq: &MinorSequence,
    target: &LabeledGraph,
) -> bool {
    diagnose_minor_sequence(src, seq, target).is_ok()
}

/// Like [`validate_minor_sequence`] but reports the first divergence.
pub fn diagnose_minor_sequence(
    src: &LabeledGraph,
    seq: &MinorSequence,
    target: &LabeledGraph,
) -> Result<(), String> {
    let result = apply_minor_sequence(src, seq).map_err(|e| format!("replay failed: {e}"))?;
    if &result == target {
        return Ok(());
    }
    for v in result.vertices() {
        if !target.contains_vertex(v) {
            return Err(format!("replay result has extra vertex `{v}`"));
        }
    }
    for v in target.vertices() {
        if !result.contains_vertex(v) {
            return Err(format!("replay result is missing vertex `{v}`"));
        }
    }
    for e in result.edges() {
        if !target.contains_edge(e.lo(), e.hi()) {
            return Err(format!("replay result has extra edge {e}"));
        }
    }
    for e in target.edges() {
        if !result.contains_edge(e.lo(), e.hi()) {
            return Err(format!("replay result is missing edge {e}"));
        }
    }
    unreachable!("graphs differ but no divergence found");
}

/// The nine-vertex grid used as the running reference graph in tests:
/// labels 1..9 laid out row-major in a 3-by-3 grid.
#[cfg(test)]
pub(crate) fn numbered_grid3() -> LabeledGraph {
    LabeledGraph::from_edges([
        ("1", "2"),
        ("2", "3"),
        ("4", "5"),
        ("5", "6"),
        ("7", "8"),
        ("8", "9"),
        ("1", "4"),
        ("4", "7"),
        ("2", "5"),
        ("5", "8"),
        ("3", "6"),
        ("6", "9"),
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &str) -> MinorOp {
        MinorOp::VertexDelete(v.into())
    }

    fn de(u: &str, v: &str) -> MinorOp {
        MinorOp::EdgeDelete(u.into(), v.into())
    }

    fn ct(u: &str, v: &str, w: &str) -> MinorOp {
        MinorOp::Contract(u.into(), v.into(), w.into())
    }

    #[test]
    fn edge_delete_removes_exactly_one_edge() {
        let g = numbered_grid3();
        let h1 = apply_minor_op(&g, &de("5", "6")).unwrap();
        assert_eq!(h1.vertex_count(), 9);
        assert_eq!(h1.edge_count(), 11);
        assert!(!h1.contains_edge("5", "6"));
        for e in h1.edges() {
            assert!(g.contains_edge(e.lo(), e.hi()));
        }
    }

    #[test]
    fn deleting_isolated_vertex_keeps_edges() {
        let g = LabeledGraph::new(["a", "b", "z"], [("a".into(), "b".into())]).unwrap();
        let h = apply_minor_op(&g, &dv("z")).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 1);
    }

    #[test]
    fn contracting_a_square_yields_a_triangle() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let h = apply_minor_op(&g, &ct("a", "b", "ab")).unwrap();
        let expected =
            LabeledGraph::from_edges([("ab", "c"), ("c", "d"), ("d", "ab")]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn contract_may_reuse_a_consumed_label() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c")]).unwrap();
        let h = apply_minor_op(&g, &ct("a", "b", "a")).unwrap();
        assert!(h.contains_edge("a", "c"));
        assert_eq!(h.vertex_count(), 2);
    }

    #[test]
    fn op_preconditions() {
        let g = LabeledGraph::from_edges([("a", "b"), ("c", "b")]).unwrap();
        assert!(matches!(
            apply_minor_op(&g, &dv("x")),
            Err(GraphError::MissingVertex(_))
        ));
        assert!(matches!(
            apply_minor_op(&g, &de("a", "c")),
            Err(GraphError::MissingEdge(..))
        ));
        assert!(matches!(
            apply_minor_op(&g, &ct("a", "c", "z")),
            Err(GraphError::MissingEdge(..))
        ));
        assert!(matches!(
            apply_minor_op(&g, &ct("a", "b", "c")),
            Err(GraphError::LabelCollision(_))
        ));
    }

    #[test]
    fn reference_three_step_sequence() {
        let g = numbered_grid3();
        let seq = MinorSequence::for_source(
            &g,
            vec![de("5", "6"), dv("7"), ct("5", "8", "8'")],
        );
        let h3 = apply_minor_sequence(&g, &seq).unwrap();
        let expected = LabeledGraph::from_edges([
            ("1", "2"),
            ("2", "3"),
            ("1", "4"),
            ("3", "6"),
            ("6", "9"),
            ("2", "8'"),
            ("4", "8'"),
            ("8'", "9"),
        ])
        .unwrap();
        assert_eq!(h3, expected);
        assert!(validate_minor_sequence(&g, &seq, &expected));
    }

    #[test]
    fn empty_sequence_is_identity() {
        let g = numbered_grid3();
        let seq = MinorSequence::for_source(&g, vec![]);
        assert_eq!(apply_minor_sequence(&g, &seq).unwrap(), g);
        assert!(validate_minor_sequence(&g, &seq, &g));
    }

    #[test]
    fn fingerprint_mismatch_is_rejected() {
        let g = numbered_grid3();
        let other = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let seq = MinorSequence::for_source(&other, vec![]);
        assert!(matches!(
            apply_minor_sequence(&g, &seq),
            Err(GraphError::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn sequence_error_carries_op_index() {
        let g = numbered_grid3();
        let seq = MinorSequence::for_source(&g, vec![de("5", "6"), de("5", "6")]);
        match apply_minor_sequence(&g, &seq) {
            Err(GraphError::SequenceOp { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected SequenceOp, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_wrong_target() {
        let g = numbered_grid3();
        let seq = MinorSequence::for_source(&g, vec![dv("1")]);
        assert!(!validate_minor_sequence(&g, &seq, &g));
        let diag = diagnose_minor_sequence(&g, &seq, &g).unwrap_err();
        assert!(diag.contains("missing vertex"), "{diag}");
    }
}
