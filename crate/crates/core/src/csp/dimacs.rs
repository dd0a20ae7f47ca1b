//! DIMACS CNF input restricted to clause width <= 2.
//!
//! Positive literal `i` means variable `x_i` takes state 1, negative means
//! state 0. Width-2 clauses become pairwise relations allowing three of the
//! four state pairs; unit clauses become unary relations. Duplicate literals
//! collapse, and a tautological clause `(l or not l)` becomes an always-true
//! unary constraint so the clause count stays faithful.

use std::collections::BTreeSet;

use super::{CspError, CspInstance, PairConstraint};

pub fn parse_dimacs_2cnf(text: &str) -> Result<CspInstance, CspError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut literals: Vec<i64> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if declared.is_some() {
                return Err(CspError::Malformed(format!(
                    "line {}: duplicate problem line",
                    lineno + 1
                )));
            }
            let mut toks = line.split_whitespace();
            let (_p, kind) = (toks.next(), toks.next());
            if kind != Some("cnf") {
                return Err(CspError::Malformed(format!(
                    "line {}: expected `p cnf <vars> <clauses>`",
                    lineno + 1
                )));
            }
            let nvars: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| CspError::Malformed(format!("line {}: bad variable count", lineno + 1)))?;
            let nclauses: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| CspError::Malformed(format!("line {}: bad clause count", lineno + 1)))?;
            declared = Some((nvars, nclauses));
            continue;
        }
        if declared.is_none() {
            return Err(CspError::Malformed(format!(
                "line {}: clause before problem line",
                lineno + 1
            )));
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| {
                CspError::Malformed(format!("line {}: bad literal `{tok}`", lineno + 1))
            })?;
            literals.push(lit);
        }
    }
    let (nvars, nclauses) =
        declared.ok_or_else(|| CspError::Malformed("missing problem line".into()))?;

    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for lit in literals {
        if lit == 0 {
            clauses.push(std::mem::take(&mut current));
        } else {
            current.push(lit);
        }
    }
    if !current.is_empty() {
        return Err(CspError::Malformed("last clause missing terminating 0".into()));
    }
    if clauses.len() != nclauses {
        return Err(CspError::Malformed(format!(
            "problem line declares {nclauses} clauses, found {}",
            clauses.len()
        )));
    }

    let mut unary: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    let mut pairwise: Vec<PairConstraint> = Vec::new();
    for (index, clause) in clauses.iter().enumerate() {
        let mut lits: Vec<i64> = clause.clone();
        lits.sort_unstable();
        lits.dedup();
        for &lit in &lits {
            let var = lit.unsigned_abs() as usize;
            if var == 0 || var > nvars {
                return Err(CspError::Malformed(format!(
                    "clause {}: literal {lit} out of range",
                    index + 1
                )));
            }
        }
        match lits.as_slice() {
            [] => {
                return Err(CspError::Malformed(format!(
                    "clause {} is empty",
                    index + 1
                )))
            }
            [l] => {
                let var = l.unsigned_abs() as usize - 1;
                let state = usize::from(*l > 0);
                unary.push((var, [state].into_iter().collect()));
            }
            [l1, l2] if l1.unsigned_abs() == l2.unsigned_abs() => {
                // (l or not l): always satisfied, still one constraint
                let var = l1.unsigned_abs() as usize - 1;
                unary.push((var, [0, 1].into_iter().collect()));
            }
            [l1, l2] => {
                let (i, j) = (l1.unsigned_abs() as usize - 1, l2.unsigned_abs() as usize - 1);
                let falsifying = (usize::from(*l1 < 0), usize::from(*l2 < 0));
                let allowed: BTreeSet<(usize, usize)> = (0..2)
                    .flat_map(|a| (0..2).map(move |b| (a, b)))
                    .filter(|p| *p != falsifying)
                    .collect();
                pairwise.push(PairConstraint { i, j, allowed });
            }
            wide => {
                return Err(CspError::WideClause {
                    clause: index + 1,
                    width: wide.len(),
                })
            }
        }
    }
    CspInstance::new(nvars, 2, unary, pairwise)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_disjunction() {
        let inst = parse_dimacs_2cnf("p cnf 2 1\n1 2 0\n").unwrap();
        assert_eq!(inst.variable_count(), 2);
        assert_eq!(inst.pairwise().len(), 1);
        let allowed: Vec<(usize, usize)> = inst.pairwise()[0].allowed.iter().copied().collect();
        assert_eq!(allowed, vec![(0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn unit_clause_is_unary() {
        let inst = parse_dimacs_2cnf("p cnf 1 1\n-1 0\n").unwrap();
        assert_eq!(inst.unary().len(), 1);
        let (var, allowed) = &inst.unary()[0];
        assert_eq!(*var, 0);
        assert_eq!(allowed.iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn two_clauses_share_a_pair() {
        let inst = parse_dimacs_2cnf("p cnf 2 2\n1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(inst.pairwise().len(), 2);
        assert_eq!(inst.constraint_count(), 2);
        let second: Vec<(usize, usize)> = inst.pairwise()[1].allowed.iter().copied().collect();
        assert_eq!(second, vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn comments_and_multiline_clauses() {
        let inst = parse_dimacs_2cnf("c header\np cnf 2 2\nc mid\n1\n2 0\n-2 0\n").unwrap();
        assert_eq!(inst.pairwise().len(), 1);
        assert_eq!(inst.unary().len(), 1);
    }

    #[test]
    fn tautology_collapses_to_always_true_unary() {
        let inst = parse_dimacs_2cnf("p cnf 1 1\n1 -1 0\n").unwrap();
        assert_eq!(inst.unary().len(), 1);
        assert_eq!(inst.unary()[0].1.len(), 2);
        assert_eq!(super::super::brute_maxsat(&inst).unwrap(), 1);
    }

    #[test]
    fn duplicate_literals_collapse() {
        let inst = parse_dimacs_2cnf("p cnf 1 1\n1 1 0\n").unwrap();
        assert_eq!(inst.unary().len(), 1);
        assert_eq!(inst.pairwise().len(), 0);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_dimacs_2cnf("p cnf 3 1\n1 2 3 0\n"),
            Err(CspError::WideClause { clause: 1, width: 3 })
        ));
        assert!(parse_dimacs_2cnf("1 2 0\n").is_err());
        assert!(parse_dimacs_2cnf("p cnf 2 1\n1 2\n").is_err());
        assert!(parse_dimacs_2cnf("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs_2cnf("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs_2cnf("p cnf 1 1\n0\n").is_err());
        assert!(parse_dimacs_2cnf("p sat 1 1\n1 0\n").is_err());
    }
}
