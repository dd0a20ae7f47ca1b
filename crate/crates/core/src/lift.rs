//! Partition-function-preserving lifts.
//!
//! Given a model on a minor `H` of a host graph `G` together with the minor
//! sequence that produced `H`, `lift_model` builds a model on `G` whose
//! partition function equals the original exactly. The sequence is replayed
//! in reverse, undoing one operation at a time:
//!
//! - a deleted vertex returns with the constant `1/q` potential and all-ones
//!   tables on its restored edges (the vertex then sums to a factor of one);
//! - a deleted edge returns with an all-ones table;
//! - a contracted edge `{u, v}` returns with a Kronecker-delta table, `u`
//!   inheriting the merged vertex's potential and its edge tables, while `v`
//!   carries ones; a neighbor adjacent to both endpoints keeps the inherited
//!   table on the `u` side and ones on the `v` side.
//!
//! Each undo needs the graph as it stood *before* the forward operation, so
//! the single-step API takes that graph explicitly.

use thiserror::Error;

use crate::graph::{
    apply_minor_op, diagnose_minor_sequence, GraphError, LabeledGraph, MinorOp, MinorSequence,
};
use crate::model::{Model, ModelError};
use crate::num::ExactNumber;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("minor sequence does not map the host to the model's graph: {0}")]
    SequenceInvalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Lifts `m` from the minor onto `host`, preserving the partition function
/// exactly. `seq` must replay `host` into `m`'s graph.
pub fn lift_model(
    host: &LabeledGraph,
    seq: &MinorSequence,
    m: &Model,
) -> Result<Model, LiftError> {
    diagnose_minor_sequence(host, seq, m.graph()).map_err(LiftError::SequenceInvalid)?;

    // Forward replay records the graph before each op.
    let mut stages = Vec::with_capacity(seq.ops.len());
    let mut current = host.clone();
    for op in &seq.ops {
        let next = apply_minor_op(&current, op)?;
        stages.push(current);
        current = next;
    }

    let mut lifted = m.clone();
    for (before, op) in stages.iter().zip(&seq.ops).rev() {
        lifted = lift_step(before, op, &lifted)?;
    }
    Ok(lifted)
}

/// Undoes a single minor operation. `before` is the graph the operation was
/// applied to; `m` lives on `apply_minor_op(before, op)`. Returns a model on
/// `before` with the same partition function.
pub fn lift_step(before: &LabeledGraph, op: &MinorOp, m: &Model) -> Result<Model, LiftError> {
    let after = apply_minor_op(before, op)?;
    if &after != m.graph() {
        return Err(LiftError::SequenceInvalid(format!(
            "op {op} applied to the given graph does not produce the model's graph"
        )));
    }
    let q = m.q();
    let ones_edge = vec![ExactNumber::one(); q * q];
    let one_over_q = ExactNumber::from_u64(1)
        .checked_div(&ExactNumber::from_u64(q as u64))
        .expect("q >= 2");

    match op {
        MinorOp::VertexDelete(v) => {
            let mut out = rebase(m, before)?;
            out = out.with_vertex_potential(v, vec![one_over_q; q])?;
            for w in before.neighbors(v) {
                out = out.with_edge_potential(v, w, ones_edge.clone())?;
            }
            Ok(out)
        }
        MinorOp::EdgeDelete(u, v) => {
            let out = rebase(m, before)?;
            Ok(out.with_edge_potential(u, v, ones_edge)?)
        }
        MinorOp::Contract(u, v, merged) => {
            let mut out = rebase(m, before)?;
            // delta table forces x_u = x_v
            let mut delta = vec![ExactNumber::zero(); q * q];
            for a in 0..q {
                delta[a * q + a] = ExactNumber::one();
            }
            out = out.with_edge_potential(u, v, delta)?;
            out = out.with_vertex_potential(u, m.vertex_potential(merged).to_vec())?;
            out = out.with_vertex_potential(v, vec![ExactNumber::one(); q])?;
            for w in before.neighbors(u) {
                if w == v {
                    continue;
                }
                let inherited: Vec<ExactNumber> = (0..q * q)
                    .map(|i| m.edge_value(merged, w, i / q, i % q).clone())
                    .collect();
                out = out.with_edge_potential(u, w, inherited)?;
            }
            for w in before.neighbors(v) {
                if w == u {
                    continue;
                }
                if before.contains_edge(u, w) {
                    out = out.with_edge_potential(v, w, ones_edge.clone())?;
                } else {
                    let inherited: Vec<ExactNumber> = (0..q * q)
                        .map(|i| m.edge_value(merged, w, i / q, i % q).clone())
                        .collect();
                    out = out.with_edge_potential(v, w, inherited)?;
                }
            }
            Ok(out)
        }
    }
}

/// Copies `m`'s tables onto the larger graph `before`; scopes not present in
/// `m` start as ones and are overwritten by the specific undo construction.
fn rebase(m: &Model, before: &LabeledGraph) -> Result<Model, ModelError> {
    let mut out = Model::uniform(before.clone(), m.q())?;
    for v in m.graph().vertices() {
        if before.contains_vertex(v) {
            out = out.with_vertex_potential(v, m.vertex_potential(v).to_vec())?;
        }
    }
    for e in m.graph().edges() {
        if before.contains_edge(e.lo(), e.hi()) {
            out = out.with_edge_potential(e.lo(), e.hi(), m.edge_potential(e).to_vec())?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::apply_minor_sequence;
    use crate::model::partition_brute;

    fn x(s: &str) -> ExactNumber {
        s.parse().unwrap()
    }

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
    fn empty_sequence_returns_model_unchanged() {
        let host = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let m = Model::uniform(host.clone(), 2)
            .unwrap()
            .with_vertex_potential("a", vec![x("2"), x("5")])
            .unwrap();
        let seq = MinorSequence::for_source(&host, vec![]);
        let lifted = lift_model(&host, &seq, &m).unwrap();
        assert_eq!(lifted, m);
    }

    #[test]
    fn contract_undo_preserves_partition() {
        let host = LabeledGraph::from_edges([("u", "v")]).unwrap();
        let seq = MinorSequence::for_source(&host, vec![ct("u", "v", "u'")]);
        let minor = apply_minor_sequence(&host, &seq).unwrap();
        let m = Model::uniform(minor, 2)
            .unwrap()
            .with_vertex_potential("u'", vec![x("2"), x("3")])
            .unwrap();
        let lifted = lift_model(&host, &seq, &m).unwrap();
        assert_eq!(partition_brute(&lifted).unwrap(), x("5"));
        assert_eq!(partition_brute(&m).unwrap(), x("5"));
    }

    #[test]
    fn vertex_delete_undo_adds_a_unit_factor() {
        let host = LabeledGraph::new(["v", "w"], std::iter::empty()).unwrap();
        let seq = MinorSequence::for_source(&host, vec![dv("v")]);
        let minor = apply_minor_sequence(&host, &seq).unwrap();
        let m = Model::uniform(minor, 2).unwrap();
        let lifted = lift_model(&host, &seq, &m).unwrap();
        assert_eq!(partition_brute(&lifted).unwrap(), x("2"));
        assert_eq!(lifted.vertex_potential("v"), &[x("1/2"), x("1/2")]);
    }

    #[test]
    fn edge_delete_undo_is_an_all_ones_table() {
        let host = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let seq = MinorSequence::for_source(&host, vec![de("a", "c")]);
        let minor = apply_minor_sequence(&host, &seq).unwrap();
        let m = Model::uniform(minor, 3)
            .unwrap()
            .with_vertex_potential("b", vec![x("1"), x("4"), x("1/2")])
            .unwrap();
        let before_z = partition_brute(&m).unwrap();
        let lifted = lift_step(&host, &de("a", "c"), &m).unwrap();
        assert_eq!(partition_brute(&lifted).unwrap(), before_z);
    }

    #[test]
    fn contract_undo_with_shared_neighbor() {
        // triangle u-v-w contracted on {u, v}: w was adjacent to both ends
        let host = LabeledGraph::from_edges([("u", "v"), ("v", "w"), ("u", "w")]).unwrap();
        let op = ct("u", "v", "m");
        let seq = MinorSequence::for_source(&host, vec![op.clone()]);
        let minor = apply_minor_sequence(&host, &seq).unwrap();
        let m = Model::uniform(minor, 2)
            .unwrap()
            .with_vertex_potential("m", vec![x("2"), x("3")])
            .unwrap()
            .with_vertex_potential("w", vec![x("1"), x("5")])
            .unwrap()
            .with_edge_potential("m", "w", vec![x("1"), x("2"), x("3"), x("4")])
            .unwrap();
        let expected = partition_brute(&m).unwrap();
        let lifted = lift_step(&host, &op, &m).unwrap();
        assert_eq!(partition_brute(&lifted).unwrap(), expected);
        // u keeps the inherited table, v gets ones
        assert_eq!(lifted.vertex_potential("u"), m.vertex_potential("m"));
        assert_eq!(lifted.vertex_potential("v"), &[x("1"), x("1")]);
        assert_eq!(lifted.edge_value("v", "w", 0, 1), &x("1"));
        assert_eq!(lifted.edge_value("u", "w", 0, 1), &x("2"));
    }

    #[test]
    fn mismatched_sequence_is_rejected() {
        let host = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let other = LabeledGraph::from_edges([("a", "c")]).unwrap();
        let m = Model::uniform(other, 2).unwrap();
        let seq = MinorSequence::for_source(&host, vec![]);
        assert!(matches!(
            lift_model(&host, &seq, &m),
            Err(LiftError::SequenceInvalid(_))
        ));
    }
}
