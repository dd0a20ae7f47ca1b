//! UAI-style model files.
//!
//! Layout: `MARKOV`, variable count, the cardinalities, factor count, one
//! scope line per factor (`arity idx...`), then each factor's table size and
//! row-major entries (last scope variable fastest). Two extensions: entries
//! may be integers, decimals, or `a/b` rationals, and a trailing
//! `labels l0 l1 ...` line maps variable indices to vertex labels. Repeated
//! factors on one scope merge by pointwise product.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Edge, GraphError, Label, LabeledGraph};
use crate::num::{ExactNumber, NumError};

use super::{Model, ModelError};

#[derive(Debug, Error)]
pub enum UaiError {
    #[error("expected {0}")]
    Expected(String),
    #[error("only MARKOV networks are supported, got `{0}`")]
    NotMarkov(String),
    #[error("all variables must share one cardinality; saw {0} and {1}")]
    MixedCardinality(usize, usize),
    #[error("factor scope must have 1 or 2 variables, got {0}")]
    BadArity(usize),
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("pairwise factor repeats variable {0}")]
    RepeatedVariable(usize),
    #[error("table declared {declared} entries for a scope needing {needed}")]
    TableSize { declared: usize, needed: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn write_uai(m: &Model) -> String {
    let labels: Vec<&Label> = m.graph().vertices().collect();
    let index: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let q = m.q();
    let n = labels.len();

    let mut out = String::new();
    let _ = writeln!(out, "MARKOV");
    let _ = writeln!(out, "{n}");
    let cards: Vec<String> = (0..n).map(|_| q.to_string()).collect();
    let _ = writeln!(out, "{}", cards.join(" "));
    let factor_count = n + m.graph().edge_count();
    let _ = writeln!(out, "{factor_count}");
    for (i, _) in labels.iter().enumerate() {
        let _ = writeln!(out, "1 {i}");
    }
    for e in m.graph().edges() {
        let _ = writeln!(out, "2 {} {}", index[e.lo().as_str()], index[e.hi().as_str()]);
    }
    for label in &labels {
        let table = m.vertex_potential(label);
        let _ = writeln!(out, "{}", table.len());
        let _ = writeln!(out, "{}", join_entries(table));
    }
    for e in m.graph().edges() {
        let table = m.edge_potential(e);
        let _ = writeln!(out, "{}", table.len());
        let _ = writeln!(out, "{}", join_entries(table));
    }
    if n > 0 {
        let names: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
        let _ = writeln!(out, "labels {}", names.join(" "));
    }
    out
}

fn join_entries(table: &[ExactNumber]) -> String {
    table
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct Tokens<'a> {
    iter: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str, UaiError> {
        self.iter
            .next()
            .ok_or_else(|| UaiError::Expected(what.into()))
    }

    fn peek(&mut self) -> Option<&'a str> {
        self.iter.peek().copied()
    }
}

pub fn parse_uai(text: &str) -> Result<Model, UaiError> {
    let mut toks = Tokens {
        iter: text.split_whitespace().peekable(),
    };

    let kind = toks.next("network type")?;
    if kind != "MARKOV" {
        return Err(UaiError::NotMarkov(kind.to_string()));
    }
    let n: usize = toks.next("variable count")?
        .parse()
        .map_err(|_| UaiError::Expected("variable count".into()))?;
    let mut q = 0usize;
    for _ in 0..n {
        let c: usize = toks.next("cardinality")?
            .parse()
            .map_err(|_| UaiError::Expected("cardinality".into()))?;
        if q == 0 {
            q = c;
        } else if q != c {
            return Err(UaiError::MixedCardinality(q, c));
        }
    }
    if n == 0 {
        q = 2;
    }
    let factor_count: usize = toks.next("factor count")?
        .parse()
        .map_err(|_| UaiError::Expected("factor count".into()))?;

    enum Scope {
        Unary(usize),
        Pair(usize, usize),
    }
    let mut scopes = Vec::with_capacity(factor_count);
    for _ in 0..factor_count {
        let arity: usize = toks.next("scope arity")?
            .parse()
            .map_err(|_| UaiError::Expected("scope arity".into()))?;
        match arity {
            1 => {
                let i = parse_var(toks.next("variable index")?, n)?;
                scopes.push(Scope::Unary(i));
            }
            2 => {
                let i = parse_var(toks.next("variable index")?, n)?;
                let j = parse_var(toks.next("variable index")?, n)?;
                if i == j {
                    return Err(UaiError::RepeatedVariable(i));
                }
                scopes.push(Scope::Pair(i, j));
            }
            other => return Err(UaiError::BadArity(other)),
        }
    }

    let mut unary_tables: Vec<(usize, Vec<ExactNumber>)> = Vec::new();
    let mut pair_tables: Vec<(usize, usize, Vec<ExactNumber>)> = Vec::new();
    for scope in &scopes {
        let declared: usize = toks.next("table size")?
            .parse()
            .map_err(|_| UaiError::Expected("table size".into()))?;
        let needed = match scope {
            Scope::Unary(_) => q,
            Scope::Pair(..) => q * q,
        };
        if declared != needed {
            return Err(UaiError::TableSize { declared, needed });
        }
        let mut entries = Vec::with_capacity(declared);
        for _ in 0..declared {
            entries.push(toks.next("table entry")?.parse::<ExactNumber>()?);
        }
        match scope {
            Scope::Unary(i) => unary_tables.push((*i, entries)),
            Scope::Pair(i, j) => pair_tables.push((*i, *j, entries)),
        }
    }

    let labels: Vec<Label> = match toks.peek() {
        Some("labels") => {
            let _ = toks.next("labels keyword")?;
            let mut names = Vec::with_capacity(n);
            for _ in 0..n {
                names.push(toks.next("label")?.to_string());
            }
            names
        }
        Some(other) => {
            return Err(UaiError::Expected(format!(
                "`labels` or end of file, got `{other}`"
            )))
        }
        None => (0..n).map(|i| format!("v{i}")).collect(),
    };
    if labels.len() != n {
        return Err(UaiError::Expected("one label per variable".into()));
    }

    let mut edge_pairs: Vec<(Label, Label)> = Vec::new();
    for (i, j, _) in &pair_tables {
        edge_pairs.push((labels[*i].clone(), labels[*j].clone()));
    }
    let graph = LabeledGraph::new(labels.clone(), edge_pairs)?;

    // Merge repeated factors by pointwise product; default to ones.
    let mut vertex_potentials: BTreeMap<Label, Vec<ExactNumber>> = labels
        .iter()
        .map(|l| (l.clone(), vec![ExactNumber::one(); q]))
        .collect();
    for (i, table) in unary_tables {
        let entry = vertex_potentials.get_mut(&labels[i]).expect("known label");
        for (slot, value) in entry.iter_mut().zip(&table) {
            *slot *= value;
        }
    }
    let mut edge_potentials: BTreeMap<Edge, Vec<ExactNumber>> = BTreeMap::new();
    for (i, j, table) in pair_tables {
        let (lu, lv) = (&labels[i], &labels[j]);
        let e = Edge::new(lu.clone(), lv.clone())?;
        // file order (i, j): reorient when i is not the canonical low end
        let canonical = if e.lo() == lu {
            table
        } else {
            super::transpose(&table, q)
        };
        let entry = edge_potentials
            .entry(e)
            .or_insert_with(|| vec![ExactNumber::one(); q * q]);
        for (slot, value) in entry.iter_mut().zip(&canonical) {
            *slot *= value;
        }
    }

    Ok(Model::new(graph, q, vertex_potentials, edge_potentials)?)
}

fn parse_var(tok: &str, n: usize) -> Result<usize, UaiError> {
    let i: usize = tok
        .parse()
        .map_err(|_| UaiError::Expected("variable index".into()))?;
    if i >= n {
        return Err(UaiError::BadVariable(i));
    }
    Ok(i)
}
