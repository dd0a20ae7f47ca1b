//! Seeded generators for benchmarks and property suites.
//!
//! Everything here is deterministic given the RNG state; the test suites
//! and the benchmark harness share these so their corpora are reproducible.

use std::collections::BTreeSet;

use rand::Rng;

use crate::csp::{CspInstance, PairConstraint};
use crate::graph::{apply_minor_op, Label, LabeledGraph, MinorOp, MinorSequence};
use crate::model::Model;
use crate::num::ExactNumber;

/// Erdos-Renyi style graph on `n` vertices labeled `v0..`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> LabeledGraph {
    let names: Vec<Label> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    LabeledGraph::new(names, edges).expect("generated labels are valid")
}

/// A random valid minor sequence of up to `max_ops` operations, leaving at
/// least one vertex. Returns the sequence and the resulting minor.
pub fn random_minor_sequence<R: Rng>(
    rng: &mut R,
    source: &LabeledGraph,
    max_ops: usize,
) -> (MinorSequence, LabeledGraph) {
    let mut ops = Vec::new();
    let mut current = source.clone();
    let mut fresh = 0usize;
    for _ in 0..max_ops {
        let vertices: Vec<Label> = current.vertices().cloned().collect();
        let edges: Vec<(Label, Label)> = current
            .edges()
            .map(|e| (e.lo().clone(), e.hi().clone()))
            .collect();
        let mut candidates: Vec<MinorOp> = Vec::new();
        if vertices.len() > 1 {
            candidates.push(MinorOp::VertexDelete(
                vertices[rng.random_range(0..vertices.len())].clone(),
            ));
        }
        if !edges.is_empty() {
            let (u, v) = edges[rng.random_range(0..edges.len())].clone();
            candidates.push(MinorOp::EdgeDelete(u.clone(), v.clone()));
            let label = loop {
                let candidate = format!("m{fresh}");
                fresh += 1;
                if !current.contains_vertex(&candidate) {
                    break candidate;
                }
            };
            candidates.push(MinorOp::Contract(u, v, label));
        }
        if candidates.is_empty() {
            break;
        }
        let op = candidates[rng.random_range(0..candidates.len())].clone();
        current = apply_minor_op(&current, &op).expect("candidate ops are valid");
        ops.push(op);
    }
    (MinorSequence::for_source(source, ops), current)
}

/// Random rational potentials with numerators in `0..=4` (zeros are rare)
/// and denominators in `1..=4`.
pub fn random_model<R: Rng>(rng: &mut R, graph: &LabeledGraph, q: usize) -> Model {
    let entry = |rng: &mut R| -> ExactNumber {
        let numer = if rng.random_bool(0.06) {
            0
        } else {
            rng.random_range(1..=4u64)
        };
        ExactNumber::ratio(numer, rng.random_range(1..=4u64))
    };
    let mut m = Model::uniform(graph.clone(), q).expect("q >= 2");
    let vertices: Vec<Label> = graph.vertices().cloned().collect();
    for v in vertices {
        let table: Vec<ExactNumber> = (0..q).map(|_| entry(rng)).collect();
        m = m.with_vertex_potential(&v, table).expect("vertex exists");
    }
    let edges: Vec<(Label, Label)> = graph
        .edges()
        .map(|e| (e.lo().clone(), e.hi().clone()))
        .collect();
    for (u, v) in edges {
        let table: Vec<ExactNumber> = (0..q * q).map(|_| entry(rng)).collect();
        m = m.with_edge_potential(&u, &v, table).expect("edge exists");
    }
    m
}

/// Connected planar graph built by adding random edges that keep the
/// left-right test happy, starting from a random spanning tree.
pub fn random_planar_graph<R: Rng>(rng: &mut R, n: usize, extra_edges: usize) -> LabeledGraph {
    use crate::embed::is_planar;

    let names: Vec<Label> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(Label, Label)> = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((names[j].clone(), names[i].clone()));
    }
    let mut g = LabeledGraph::new(names.clone(), edges.clone()).expect("tree is valid");
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 10 * extra_edges + 20 {
        attempts += 1;
        if n < 2 {
            break;
        }
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j || g.contains_edge(&names[i], &names[j]) {
            continue;
        }
        edges.push((names[i].clone(), names[j].clone()));
        let candidate = LabeledGraph::new(names.clone(), edges.clone()).expect("simple");
        if is_planar(&candidate) {
            g = candidate;
            added += 1;
        } else {
            edges.pop();
        }
    }
    g
}

/// Random binary-scope instance: up to `max_constraints` constraints over
/// `n` variables of cardinality `q`, mixing unary and pairwise relations.
pub fn random_csp<R: Rng>(rng: &mut R, n: usize, q: usize, max_constraints: usize) -> CspInstance {
    let count = rng.random_range(0..=max_constraints);
    let mut unary = Vec::new();
    let mut pairwise = Vec::new();
    for _ in 0..count {
        if n >= 2 && rng.random_bool(0.75) {
            let i = rng.random_range(0..n);
            let j = loop {
                let j = rng.random_range(0..n);
                if j != i {
                    break j;
                }
            };
            let mut allowed = BTreeSet::new();
            for a in 0..q {
                for b in 0..q {
                    if rng.random_bool(0.6) {
                        allowed.insert((a, b));
                    }
                }
            }
            pairwise.push(PairConstraint { i, j, allowed });
        } else if n >= 1 {
            let v = rng.random_range(0..n);
            let mut allowed = BTreeSet::new();
            for a in 0..q {
                if rng.random_bool(0.5) {
                    allowed.insert(a);
                }
            }
            unary.push((v, allowed));
        }
    }
    CspInstance::new(n, q, unary, pairwise).expect("generated constraints are in range")
}

/// DIMACS text for a random 2-CNF whose constraint graph is planar by
/// construction (clauses sit on the edges of a random planar graph).
pub fn random_planar_cnf<R: Rng>(rng: &mut R, n: usize, max_clauses: usize) -> String {
    let skeleton = random_planar_graph(rng, n, n / 2 + 1);
    let index_of = |l: &Label| -> usize { l[1..].parse::<usize>().expect("v<i> label") };
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let edges: Vec<(usize, usize)> = skeleton
        .edges()
        .map(|e| (index_of(e.lo()), index_of(e.hi())))
        .collect();
    for &(i, j) in &edges {
        if clauses.len() >= max_clauses {
            break;
        }
        let copies = if rng.random_bool(0.25) { 2 } else { 1 };
        for _ in 0..copies {
            if clauses.len() >= max_clauses {
                break;
            }
            let si: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
            let sj: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
            clauses.push(vec![si * (i as i64 + 1), sj * (j as i64 + 1)]);
        }
    }
    if n >= 1 && rng.random_bool(0.5) && clauses.len() < max_clauses {
        let v = rng.random_range(0..n) as i64 + 1;
        let sign: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
        clauses.push(vec![sign * v]);
    }
    let mut text = format!("p cnf {} {}\n", n, clauses.len());
    for clause in clauses {
        let lits: Vec<String> = clause.iter().map(|l| l.to_string()).collect();
        text.push_str(&format!("{} 0\n", lits.join(" ")));
    }
    text
}
