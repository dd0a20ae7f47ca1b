//! Binary-scope constraint systems and their brute-force oracles.
//!
//! A [`CspInstance`] holds unary and pairwise allowed-assignment relations
//! over `n` variables of cardinality `q`. Several unary constraints may sit
//! on the same variable; each counts separately toward the constraint total.

mod dimacs;
mod encode;

pub use dimacs::parse_dimacs_2cnf;
pub use encode::{decide_at_least, default_epsilon, encode_count, encode_max2csp, Encoding};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::ModelError;
use crate::num::ExactNumber;

#[derive(Debug, Error)]
pub enum CspError {
    #[error("epsilon {eps} outside the open interval (0, {limit})")]
    BadEpsilon { eps: ExactNumber, limit: ExactNumber },
    #[error("d = {d} out of range 0..={m}")]
    DOutOfRange { d: usize, m: usize },
    #[error("clause {clause} has width {width}, only widths 1 and 2 are supported")]
    WideClause { clause: usize, width: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("enumeration needs {needed} assignments, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("bad instance: {0}")]
    BadInstance(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A pairwise constraint: the set of allowed `(state_i, state_j)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairConstraint {
    pub i: usize,
    pub j: usize,
    pub allowed: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    q: usize,
    unary: Vec<(usize, BTreeSet<usize>)>,
    pairwise: Vec<PairConstraint>,
}

impl CspInstance {
    pub fn new(
        n: usize,
        q: usize,
        unary: Vec<(usize, BTreeSet<usize>)>,
        pairwise: Vec<PairConstraint>,
    ) -> Result<Self, CspError> {
        if q < 2 {
            return Err(CspError::BadInstance(format!("cardinality {q} < 2")));
        }
        for (v, allowed) in &unary {
            if *v >= n {
                return Err(CspError::BadInstance(format!("variable {v} out of range")));
            }
            if allowed.iter().any(|&s| s >= q) {
                return Err(CspError::BadInstance(format!(
                    "unary constraint on variable {v} references a state >= {q}"
                )));
            }
        }
        for c in &pairwise {
            if c.i == c.j {
                return Err(CspError::BadInstance(format!(
                    "pairwise constraint repeats variable {}",
                    c.i
                )));
            }
            if c.i >= n || c.j >= n {
                return Err(CspError::BadInstance(
                    "pairwise constraint references a missing variable".into(),
                ));
            }
            if c.allowed.iter().any(|&(a, b)| a >= q || b >= q) {
                return Err(CspError::BadInstance(format!(
                    "pairwise constraint on ({}, {}) references a state >= {q}",
                    c.i, c.j
                )));
            }
        }
        Ok(CspInstance {
            n,
            q,
            unary,
            pairwise,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn cardinality(&self) -> usize {
        self.q
    }

    /// Total number of constraints, unary and pairwise alike.
    pub fn constraint_count(&self) -> usize {
        self.unary.len() + self.pairwise.len()
    }

    pub fn unary(&self) -> &[(usize, BTreeSet<usize>)] {
        &self.unary
    }

    pub fn pairwise(&self) -> &[PairConstraint] {
        &self.pairwise
    }

    /// Vertex label used for variable `i` in encoded models.
    pub fn variable_label(&self, i: usize) -> String {
        format!("x{}", i + 1)
    }

    pub fn satisfied_constraints(&self, assignment: &[usize]) -> usize {
        let mut count = 0;
        for (v, allowed) in &self.unary {
            if allowed.contains(&assignment[*v]) {
                count += 1;
            }
        }
        for c in &self.pairwise {
            if c.allowed.contains(&(assignment[c.i], assignment[c.j])) {
                count += 1;
            }
        }
        count
    }

    /// Canonical text dump for fingerprinting.
    pub fn canonical_dump(&self) -> String {
        let mut out = format!("csp {} {}\n", self.n, self.q);
        for (v, allowed) in &self.unary {
            let states: Vec<String> = allowed.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!("u {} {}\n", v, states.join(",")));
        }
        for c in &self.pairwise {
            let pairs: Vec<String> = c
                .allowed
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect();
            out.push_str(&format!("p {} {} {}\n", c.i, c.j, pairs.join(",")));
        }
        out
    }
}

pub const DEFAULT_CSP_CAP: u128 = 1 << 24;

fn check_cap(inst: &CspInstance, cap: u128) -> Result<u128, CspError> {
    let needed = (inst.q as u128)
        .checked_pow(inst.n as u32)
        .ok_or(CspError::CapExceeded {
            needed: u128::MAX,
            cap,
        })?;
    if needed > cap {
        return Err(CspError::CapExceeded { needed, cap });
    }
    Ok(needed)
}

fn for_each_assignment(inst: &CspInstance, mut f: impl FnMut(&[usize])) {
    let mut assignment = vec![0usize; inst.n];
    loop {
        f(&assignment);
        let mut k = 0;
        loop {
            if k == inst.n {
                return;
            }
            assignment[k] += 1;
            if assignment[k] < inst.q {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Exact maximum number of simultaneously satisfiable constraints.
pub fn brute_maxsat(inst: &CspInstance) -> Result<usize, CspError> {
    brute_maxsat_with_cap(inst, DEFAULT_CSP_CAP)
}

pub fn brute_maxsat_with_cap(inst: &CspInstance, cap: u128) -> Result<usize, CspError> {
    check_cap(inst, cap)?;
    let mut best = 0;
    for_each_assignment(inst, |a| {
        best = best.max(inst.satisfied_constraints(a));
    });
    Ok(best)
}

/// Exact count of assignments satisfying every constraint.
pub fn brute_count(inst: &CspInstance) -> Result<u64, CspError> {
    brute_count_with_cap(inst, DEFAULT_CSP_CAP)
}

pub fn brute_count_with_cap(inst: &CspInstance, cap: u128) -> Result<u64, CspError> {
    check_cap(inst, cap)?;
    let total = inst.constraint_count();
    let mut count = 0u64;
    for_each_assignment(inst, |a| {
        if inst.satisfied_constraints(a) == total {
            count += 1;
        }
    });
    Ok(count)
}

#[cfg(test)]
pub(crate) fn pair(i: usize, j: usize, allowed: &[(usize, usize)]) -> PairConstraint {
    PairConstraint {
        i,
        j,
        allowed: allowed.iter().copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance_maxsat_is_zero_of_zero() {
        let inst = CspInstance::new(3, 2, vec![], vec![]).unwrap();
        assert_eq!(inst.constraint_count(), 0);
        assert_eq!(brute_maxsat(&inst).unwrap(), 0);
        assert_eq!(brute_count(&inst).unwrap(), 8);
    }

    #[test]
    fn opposing_clauses_are_jointly_satisfiable() {
        // (x1 or x2) and (not x1 or not x2)
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
        assert_eq!(brute_maxsat(&inst).unwrap(), 2);
        assert_eq!(brute_count(&inst).unwrap(), 2);
    }

    #[test]
    fn contradictory_unary_pair() {
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
        assert_eq!(brute_count(&inst).unwrap(), 0);
    }

    #[test]
    fn construction_validates() {
        assert!(CspInstance::new(2, 1, vec![], vec![]).is_err());
        assert!(CspInstance::new(2, 2, vec![(5, BTreeSet::new())], vec![]).is_err());
        assert!(CspInstance::new(2, 2, vec![], vec![pair(0, 0, &[])]).is_err());
        assert!(CspInstance::new(2, 2, vec![], vec![pair(0, 1, &[(0, 5)])]).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let inst = CspInstance::new(10, 2, vec![], vec![]).unwrap();
        assert!(matches!(
            brute_maxsat_with_cap(&inst, 512),
            Err(CspError::CapExceeded { .. })
        ));
    }

    #[test]
    fn zero_variable_instance() {
        let inst = CspInstance::new(0, 2, vec![], vec![]).unwrap();
        assert_eq!(brute_count(&inst).unwrap(), 1);
        assert_eq!(brute_maxsat(&inst).unwrap(), 0);
    }
}
