//! Exact brute-force inference: the oracle everything else is checked
//! against.
//!
//! The sum over all `q^n` assignments runs on scaled integers: each table is
//! multiplied by the lcm of its denominators up front, so the inner loop is
//! pure `BigUint` products, and the common denominator is divided back out
//! once at the end. Zero partial products prune their whole subtree, which
//! matters for the delta-constrained models produced by lifting.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::Label;
use crate::num::ExactNumber;

use super::{clamp, Model, ModelError};

/// Default cap on the number of enumerated assignments (2^24, i.e. 24
/// binary variables).
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 1 << 24;

/// Exact partition function by full enumeration.
pub fn partition_brute(m: &Model) -> Result<ExactNumber, ModelError> {
    partition_brute_with_cap(m, DEFAULT_ASSIGNMENT_CAP)
}

pub fn partition_brute_with_cap(m: &Model, cap: u128) -> Result<ExactNumber, ModelError> {
    let n = m.graph().vertex_count();
    let q = m.q();
    let needed = (q as u128)
        .checked_pow(n as u32)
        .ok_or(ModelError::CapExceeded {
            needed: u128::MAX,
            cap,
        })?;
    if needed > cap {
        return Err(ModelError::CapExceeded { needed, cap });
    }

    let order: Vec<Label> = m.graph().vertices().cloned().collect();
    let mut denominator = BigUint::one();
    let mut scale_table = |values: &[ExactNumber]| -> Vec<BigUint> {
        let mut lcm = BigUint::one();
        for v in values {
            lcm = lcm.lcm(&v.denom().magnitude().clone());
        }
        denominator *= &lcm;
        values
            .iter()
            .map(|v| v.numer().magnitude() * &lcm / v.denom().magnitude())
            .collect()
    };

    // unary[k][a], and for each k the edges back to already-assigned
    // vertices: (j, table) with index a_j * q + a_k (canonical order makes
    // the earlier vertex the low endpoint).
    let mut unary: Vec<Vec<BigUint>> = Vec::with_capacity(n);
    let mut back_edges: Vec<Vec<(usize, Vec<BigUint>)>> = Vec::with_capacity(n);
    for (k, label) in order.iter().enumerate() {
        unary.push(scale_table(m.vertex_potential(label)));
        let mut backs = Vec::new();
        for (j, earlier) in order.iter().enumerate().take(k) {
            if m.graph().contains_edge(earlier, label) {
                let mut table = Vec::with_capacity(q * q);
                for a in 0..q {
                    for b in 0..q {
                        table.push(m.edge_value(earlier, label, a, b).clone());
                    }
                }
                backs.push((j, scale_table(&table)));
            }
        }
        back_edges.push(backs);
    }

    let mut total = BigUint::zero();
    let mut assignment = vec![0usize; n];
    enumerate(
        0,
        &BigUint::one(),
        &mut assignment,
        &unary,
        &back_edges,
        q,
        &mut total,
    );

    let z = BigRational::new(BigInt::from(total), BigInt::from(denominator));
    Ok(ExactNumber::try_from_rational(z).expect("sum of non-negative terms"))
}

fn enumerate(
    k: usize,
    partial: &BigUint,
    assignment: &mut Vec<usize>,
    unary: &[Vec<BigUint>],
    back_edges: &[Vec<(usize, Vec<BigUint>)>],
    q: usize,
    total: &mut BigUint,
) {
    if k == unary.len() {
        *total += partial;
        return;
    }
    for a in 0..q {
        let mut p = partial * &unary[k][a];
        if p.is_zero() {
            continue;
        }
        for (j, table) in &back_edges[k] {
            p *= &table[assignment[*j] * q + a];
            if p.is_zero() {
                break;
            }
        }
        if p.is_zero() {
            continue;
        }
        assignment[k] = a;
        enumerate(k + 1, &p, assignment, unary, back_edges, q, total);
    }
}

/// Exact marginal at `v`: component `a` is the partition function with `v`
/// clamped to `a`, normalized by the full partition function.
pub fn marginal(m: &Model, v: &str) -> Result<Vec<ExactNumber>, ModelError> {
    let q = m.q();
    let mut clamped = Vec::with_capacity(q);
    for a in 0..q {
        clamped.push(partition_brute(&clamp(m, v, a)?)?);
    }
    let mut z = ExactNumber::zero();
    for za in &clamped {
        z += za;
    }
    if z.is_zero() {
        return Err(ModelError::ZeroPartition);
    }
    Ok(clamped.iter().map(|za| za / &z).collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::LabeledGraph;

    fn x(s: &str) -> ExactNumber {
        s.parse().unwrap()
    }

    fn single_vertex(table: &[&str]) -> Model {
        let g = LabeledGraph::new(["v"], std::iter::empty()).unwrap();
        let mut vp = BTreeMap::new();
        vp.insert("v".to_string(), table.iter().map(|s| x(s)).collect());
        Model::new(g, table.len(), vp, BTreeMap::new()).unwrap()
    }

    #[test]
    fn uniform_single_vertex_sums_to_two() {
        let m = single_vertex(&["1", "1"]);
        assert_eq!(partition_brute(&m).unwrap(), x("2"));
    }

    #[test]
    fn all_ones_gives_two_to_the_n() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]).unwrap();
        let m = Model::uniform(g, 2).unwrap();
        assert_eq!(partition_brute(&m).unwrap(), x("16"));
    }

    #[test]
    fn single_edge_with_skew_table() {
        let g = LabeledGraph::from_edges([("u", "v")]).unwrap();
        let m = Model::uniform(g, 2)
            .unwrap()
            .with_edge_potential("u", "v", vec![x("1"), x("2"), x("3"), x("4")])
            .unwrap();
        assert_eq!(partition_brute(&m).unwrap(), x("10"));
    }

    #[test]
    fn cap_is_enforced() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c")]).unwrap();
        let m = Model::uniform(g, 2).unwrap();
        assert!(matches!(
            partition_brute_with_cap(&m, 4),
            Err(ModelError::CapExceeded { needed: 8, cap: 4 })
        ));
    }

    #[test]
    fn empty_model_partition_is_one() {
        let m = Model::uniform(LabeledGraph::empty(), 2).unwrap();
        assert_eq!(partition_brute(&m).unwrap(), x("1"));
    }

    #[test]
    fn clamp_sums_recover_partition() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let m = Model::uniform(g, 3)
            .unwrap()
            .with_vertex_potential("a", vec![x("1/2"), x("3"), x("0")])
            .unwrap()
            .with_edge_potential("a", "b", (1..=9).map(|i| x(&i.to_string())).collect())
            .unwrap();
        let z = partition_brute(&m).unwrap();
        let mut sum = ExactNumber::zero();
        for a in 0..3 {
            sum += &partition_brute(&clamp(&m, "b", a).unwrap()).unwrap();
        }
        assert_eq!(sum, z);
    }

    #[test]
    fn biased_single_vertex_marginal() {
        let m = single_vertex(&["1", "3"]);
        assert_eq!(marginal(&m, "v").unwrap(), vec![x("1/4"), x("3/4")]);
    }

    #[test]
    fn uniform_model_marginal_is_uniform() {
        let g = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let m = Model::uniform(g, 2).unwrap();
        assert_eq!(marginal(&m, "b").unwrap(), vec![x("1/2"), x("1/2")]);
    }

    #[test]
    fn zero_model_has_no_marginal() {
        let m = single_vertex(&["0", "0"]);
        assert!(matches!(marginal(&m, "v"), Err(ModelError::ZeroPartition)));
    }

    #[test]
    fn biased_cycle_marginal_matches_direct_enumeration() {
        // 4-cycle, one biased vertex; oracle is an independent restricted
        // enumeration over the 16 assignments using rational arithmetic.
        let g =
            LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let m = Model::uniform(g, 2)
            .unwrap()
            .with_vertex_potential("a", vec![x("1"), x("5")])
            .unwrap()
            .with_edge_potential("a", "b", vec![x("2"), x("1"), x("1"), x("2")])
            .unwrap();

        let vertices = ["a", "b", "c", "d"];
        let weight = |states: &[usize; 4]| -> ExactNumber {
            let mut w = ExactNumber::one();
            for (i, v) in vertices.iter().enumerate() {
                w = &w * &m.vertex_potential(v)[states[i]];
            }
            for (i, u) in vertices.iter().enumerate() {
                for (j, v) in vertices.iter().enumerate().skip(i + 1) {
                    if m.graph().contains_edge(u, v) {
                        w = &w * m.edge_value(u, v, states[i], states[j]);
                    }
                }
            }
            w
        };
        let mut z = ExactNumber::zero();
        let mut za = [ExactNumber::zero(), ExactNumber::zero()];
        for code in 0..16usize {
            let states = [code & 1, (code >> 1) & 1, (code >> 2) & 1, (code >> 3) & 1];
            let w = weight(&states);
            za[states[0]] += &w;
            z += &w;
        }
        let expected: Vec<ExactNumber> = za.iter().map(|v| v / &z).collect();
        assert_eq!(marginal(&m, "a").unwrap(), expected);

        let mut total = ExactNumber::zero();
        for v in &za {
            total += v;
        }
        assert_eq!(partition_brute(&m).unwrap(), total);
    }
}
