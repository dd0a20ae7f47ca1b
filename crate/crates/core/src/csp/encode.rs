//! Constraint systems as partition-function problems.
//!
//! Every constraint contributes a factor that is 1 on satisfying assignments
//! and `epsilon` otherwise, so an assignment's total weight is
//! `epsilon^(violated constraints)`. With `epsilon` inside `(0, 1/q^n)`:
//!
//! - at least `d` of the `m` constraints are simultaneously satisfiable
//!   iff `Z >= epsilon^(m - d)`, and
//! - the number of fully satisfying assignments is `floor(Z)`, since the
//!   non-satisfying assignments contribute less than `q^n * epsilon < 1`
//!   in total.

use std::collections::BTreeMap;

use crate::model::{partition_brute, Model};
use crate::num::ExactNumber;

use super::{CspError, CspInstance};

/// An encoded instance: the model, the chosen epsilon, and the constraint
/// count `m` that fixes the threshold function `h(d) = epsilon^(m - d)`.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub model: Model,
    pub epsilon: ExactNumber,
    pub m: usize,
}

impl Encoding {
    /// Decision threshold for "at least `d` constraints satisfiable".
    /// Strictly increasing in `d` because `epsilon < 1`.
    pub fn h(&self, d: usize) -> Result<ExactNumber, CspError> {
        if d > self.m {
            return Err(CspError::DOutOfRange { d, m: self.m });
        }
        Ok(self.epsilon.pow((self.m - d) as u32))
    }
}

/// Midpoint of the admissible interval: `1 / (2 q^n)`.
pub fn default_epsilon(inst: &CspInstance) -> ExactNumber {
    let q_to_n = ExactNumber::from_u64(inst.cardinality() as u64).pow(inst.variable_count() as u32);
    ExactNumber::one()
        .checked_div(&(&ExactNumber::from_u64(2) * &q_to_n))
        .expect("positive denominator")
}

/// Builds the decision encoding. `epsilon` defaults to `1 / (2 q^n)` and
/// must lie strictly inside `(0, 1/q^n)`.
pub fn encode_max2csp(
    inst: &CspInstance,
    epsilon: Option<ExactNumber>,
) -> Result<Encoding, CspError> {
    let q = inst.cardinality();
    let n = inst.variable_count();
    let limit = ExactNumber::from_u64(q as u64)
        .pow(n as u32)
        .recip()
        .expect("q^n > 0");
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(inst));
    if epsilon.is_zero() || epsilon >= limit {
        return Err(CspError::BadEpsilon { eps: epsilon, limit });
    }

    let labels: Vec<String> = (0..n).map(|i| inst.variable_label(i)).collect();

    // Merge multiplicatively so an assignment weighs epsilon^(violations).
    let mut vertex_tables: BTreeMap<usize, Vec<ExactNumber>> = BTreeMap::new();
    for (v, allowed) in inst.unary() {
        let table = vertex_tables
            .entry(*v)
            .or_insert_with(|| vec![ExactNumber::one(); q]);
        for (state, slot) in table.iter_mut().enumerate() {
            if !allowed.contains(&state) {
                *slot *= &epsilon;
            }
        }
    }
    let mut edge_tables: BTreeMap<(usize, usize), Vec<ExactNumber>> = BTreeMap::new();
    for c in inst.pairwise() {
        let key = (c.i.min(c.j), c.i.max(c.j));
        let table = edge_tables
            .entry(key)
            .or_insert_with(|| vec![ExactNumber::one(); q * q]);
        for a in 0..q {
            for b in 0..q {
                // table is indexed by (key.0, key.1) states
                let (si, sj) = if key.0 == c.i { (a, b) } else { (b, a) };
                if !c.allowed.contains(&(si, sj)) {
                    table[a * q + b] *= &epsilon;
                }
            }
        }
    }

    let graph = crate::graph::LabeledGraph::new(
        labels.clone(),
        edge_tables
            .keys()
            .map(|(i, j)| (labels[*i].clone(), labels[*j].clone()))
            .collect::<Vec<_>>(),
    )
    .map_err(crate::model::ModelError::from)?;

    let mut model = Model::uniform(graph, q)?;
    for (v, table) in vertex_tables {
        model = model.with_vertex_potential(&labels[v], table)?;
    }
    for ((i, j), table) in edge_tables {
        model = model.with_edge_potential(&labels[i], &labels[j], table)?;
    }

    Ok(Encoding {
        model,
        epsilon,
        m: inst.constraint_count(),
    })
}

/// Exact decision: can at least `d` constraints be satisfied simultaneously?
pub fn decide_at_least(enc: &Encoding, d: usize) -> Result<bool, CspError> {
    let threshold = enc.h(d)?;
    let z = partition_brute(&enc.model)?;
    Ok(z >= threshold)
}

/// Counting encoding: with the default epsilon, `floor(Z)` of the returned
/// model is exactly the number of assignments satisfying all constraints.
pub fn encode_count(inst: &CspInstance) -> Result<Model, CspError> {
    Ok(encode_max2csp(inst, None)?.model)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::super::{brute_count, brute_maxsat, pair, CspInstance};
    use super::*;

    fn x(s: &str) -> ExactNumber {
        s.parse().unwrap()
    }

    fn one_clause() -> CspInstance {
        // x1 or x2
        CspInstance::new(2, 2, vec![], vec![pair(0, 1, &[(0, 1), (1, 0), (1, 1)])]).unwrap()
    }

    #[test]
    fn disjunction_partition_value() {
        let enc = encode_max2csp(&one_clause(), Some(x("1/8"))).unwrap();
        assert_eq!(partition_brute(&enc.model).unwrap(), x("25/8"));
        assert_eq!(enc.h(1).unwrap(), x("1"));
        assert!(decide_at_least(&enc, 1).unwrap());
    }

    #[test]
    fn empty_constraints_give_q_to_n() {
        let inst = CspInstance::new(3, 2, vec![], vec![]).unwrap();
        let enc = encode_max2csp(&inst, None).unwrap();
        assert_eq!(partition_brute(&enc.model).unwrap(), x("8"));
        assert_eq!(enc.h(0).unwrap(), x("1"));
        assert!(decide_at_least(&enc, 0).unwrap());
    }

    #[test]
    fn same_pair_clauses_merge_into_one_table() {
        let inst = CspInstance::new(
            2,
            2,
            vec![],
            vec![
                pair(0, 1, &[(0, 1), (1, 0), (1, 1)]),
                pair(0, 1, &[(0, 0), (0, 1), (1, 0)]),
            ],
        )
        .unwrap();
        let enc = encode_max2csp(&inst, Some(x("1/8"))).unwrap();
        let eps = x("1/8");
        assert_eq!(enc.model.edge_value("x1", "x2", 0, 0), &eps);
        assert_eq!(enc.model.edge_value("x1", "x2", 0, 1), &x("1"));
        assert_eq!(enc.model.edge_value("x1", "x2", 1, 0), &x("1"));
        assert_eq!(enc.model.edge_value("x1", "x2", 1, 1), &eps);
        assert_eq!(partition_brute(&enc.model).unwrap(), x("9/4"));
        assert!(decide_at_least(&enc, 2).unwrap());
    }

    #[test]
    fn zero_threshold_always_accepts() {
        let inst = CspInstance::new(
            2,
            2,
            vec![(0, [0].into_iter().collect())],
            vec![pair(0, 1, &[(1, 1)])],
        )
        .unwrap();
        let enc = encode_max2csp(&inst, None).unwrap();
        assert!(decide_at_least(&enc, 0).unwrap());
    }

    #[test]
    fn unsatisfiable_level_is_rejected_exactly() {
        // two contradictory unary constraints: max-sat is 1 of 2
        let inst = CspInstance::new(
            1,
            2,
            vec![
                (0, [0].into_iter().collect()),
                (0, [1].into_iter().collect()),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(brute_maxsat(&inst).unwrap(), 1);
        let enc = encode_max2csp(&inst, None).unwrap();
        assert!(decide_at_least(&enc, 1).unwrap());
        assert!(!decide_at_least(&enc, 2).unwrap());
        let z = partition_brute(&enc.model).unwrap();
        assert!(z < enc.h(2).unwrap());
    }

    #[test]
    fn epsilon_bounds_are_strict() {
        let inst = one_clause();
        assert!(matches!(
            encode_max2csp(&inst, Some(ExactNumber::zero())),
            Err(CspError::BadEpsilon { .. })
        ));
        assert!(matches!(
            encode_max2csp(&inst, Some(x("1/4"))),
            Err(CspError::BadEpsilon { .. })
        ));
        assert!(encode_max2csp(&inst, Some(x("1/5"))).is_ok());
    }

    #[test]
    fn d_out_of_range() {
        let enc = encode_max2csp(&one_clause(), None).unwrap();
        assert!(matches!(
            decide_at_least(&enc, 2),
            Err(CspError::DOutOfRange { d: 2, m: 1 })
        ));
    }

    #[test]
    fn count_one_clause() {
        let model = encode_count(&one_clause()).unwrap();
        let z = partition_brute(&model).unwrap();
        assert_eq!(z.floor(), BigUint::from(3u32));
        assert_eq!(brute_count(&one_clause()).unwrap(), 3);
    }

    #[test]
    fn count_contradiction_is_zero() {
        let inst = CspInstance::new(
            1,
            2,
            vec![
                (0, [0].into_iter().collect()),
                (0, [1].into_iter().collect()),
            ],
            vec![],
        )
        .unwrap();
        let model = encode_count(&inst).unwrap();
        assert_eq!(partition_brute(&model).unwrap().floor(), BigUint::from(0u32));
    }

    #[test]
    fn count_unconstrained_is_q_to_n() {
        let inst = CspInstance::new(3, 2, vec![], vec![]).unwrap();
        let model = encode_count(&inst).unwrap();
        assert_eq!(partition_brute(&model).unwrap().floor(), BigUint::from(8u32));
    }

    #[test]
    fn thresholds_increase_with_d() {
        let inst = CspInstance::new(
            2,
            3,
            vec![(1, [0, 2].into_iter().collect())],
            vec![pair(0, 1, &[(0, 0), (2, 1)]), pair(1, 0, &[(1, 1)])],
        )
        .unwrap();
        let enc = encode_max2csp(&inst, None).unwrap();
        for d in 1..=enc.m {
            assert!(enc.h(d).unwrap() > enc.h(d - 1).unwrap());
        }
    }

    #[test]
    fn partition_shrinks_with_epsilon() {
        let inst = one_clause();
        let loose = encode_max2csp(&inst, Some(x("1/5"))).unwrap();
        let tight = encode_max2csp(&inst, Some(x("1/50"))).unwrap();
        assert!(
            partition_brute(&tight.model).unwrap() < partition_brute(&loose.model).unwrap()
        );
    }
}
