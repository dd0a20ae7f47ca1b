//! Constructive minor embeddings.
//!
//! A [`ChainEmbedding`] witnesses that `target` is a minor of `host`: each
//! target vertex owns a connected, pairwise-disjoint set of host vertices
//! (its chain), and every target edge is realized by at least one host edge
//! between the two chains. [`chains_to_minor_sequence`] turns a witness into
//! a replayable [`MinorSequence`](crate::graph::MinorSequence);
//! [`planar_to_grid_minor`] embeds a planar graph into a square grid;
//! [`find_grid_minor`] searches for a grid inside an arbitrary host.

mod chains;
mod drawing;
mod planarity;
mod search;

pub use chains::chains_to_minor_sequence;

pub use drawing::{planar_to_grid_minor, GridEmbedding};
pub use planarity::{is_planar, planar_embedding, Embedding};
pub use search::{
    find_grid_minor, find_minor_chains, find_minor_with_sequence, DEFAULT_SEARCH_BUDGET,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{GraphError, Label, LabeledGraph};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("invalid chains: {0}")]
    InvalidChains(String),
    #[error("graph is not planar")]
    NotPlanar,
    #[error("malformed chains file, line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A minor witness: disjoint connected host chains, one per target vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEmbedding {
    pub target: LabeledGraph,
    pub host: LabeledGraph,
    pub chains: BTreeMap<Label, BTreeSet<Label>>,
}

impl ChainEmbedding {
    /// Checks every invariant; `Err` names the first violation.
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |msg: String| Err(EmbedError::InvalidChains(msg));
        for v in self.target.vertices() {
            if !self.chains.contains_key(v) {
                return bad(format!("target vertex `{v}` has no chain"));
            }
        }
        for label in self.chains.keys() {
            if !self.target.contains_vertex(label) {
                return bad(format!("chain key `{label}` is not a target vertex"));
            }
        }
        let mut owner: BTreeMap<&Label, &Label> = BTreeMap::new();
        for (t, chain) in &self.chains {
            if chain.is_empty() {
                return bad(format!("chain for `{t}` is empty"));
            }
            for h in chain {
                if !self.host.contains_vertex(h) {
                    return bad(format!("chain for `{t}` uses missing host vertex `{h}`"));
                }
                if let Some(other) = owner.insert(h, t) {
                    return bad(format!(
                        "host vertex `{h}` is claimed by both `{other}` and `{t}`"
                    ));
                }
            }
            if !connected_in_host(&self.host, chain) {
                return bad(format!("chain for `{t}` is not connected in the host"));
            }
        }
        for e in self.target.edges() {
            let (ca, cb) = (&self.chains[e.lo()], &self.chains[e.hi()]);
            let linked = ca.iter().any(|h| {
                self.host
                    .neighbors(h)
                    .any(|nb| cb.contains(nb))
            });
            if !linked {
                return bad(format!("target edge {e} has no host edge between chains"));
            }
        }
        Ok(())
    }
}

/// Releases every chain cell that is not needed for connectivity or for
/// realizing a target edge. Freed cells become spares that the sequence
/// conversion can absorb next to mismatched singleton chains.
pub fn trim_chains(e: &ChainEmbedding) -> ChainEmbedding {
    let mut chains = e.chains.clone();
    let realized = |chain: &BTreeSet<Label>, other: &BTreeSet<Label>| -> bool {
        chain
            .iter()
            .any(|h| e.host.neighbors(h).any(|nb| other.contains(nb)))
    };
    loop {
        let mut changed = false;
        let targets: Vec<Label> = chains.keys().cloned().collect();
        for t in &targets {
            let members: Vec<Label> = chains[t].iter().cloned().collect();
            for h in members {
                if chains[t].len() < 2 {
                    break;
                }
                let mut candidate = chains[t].clone();
                candidate.remove(&h);
                if !connected_in_host(&e.host, &candidate) {
                    continue;
                }
                let still_realized = e.target.edges().filter(|te| te.touches(t)).all(|te| {
                    let other = te.other(t);
                    realized(&candidate, &chains[other])
                });
                if still_realized {
                    chains.insert(t.clone(), candidate);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    ChainEmbedding {
        target: e.target.clone(),
        host: e.host.clone(),
        chains,
    }
}

fn connected_in_host(host: &LabeledGraph, chain: &BTreeSet<Label>) -> bool {
    let start = match chain.iter().next() {
        Some(s) => s,
        None => return false,
    };
    let mut seen: BTreeSet<&Label> = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        for nb in host.neighbors(v) {
            if chain.contains(nb) && !seen.contains(nb) {
                stack.push(nb);
            }
        }
    }
    seen.len() == chain.len()
}

/// Chains file: one line per target vertex, `label: h1 h2 ...`.
pub fn write_chains(e: &ChainEmbedding) -> String {
    let mut out = String::new();
    for (t, chain) in &e.chains {
        let hosts: Vec<&str> = chain.iter().map(|h| h.as_str()).collect();
        let _ = writeln!(out, "{t}: {}", hosts.join(" "));
    }
    out
}

/// Parses a chains file against known target and host graphs and validates
/// the result.
pub fn parse_chains(
    text: &str,
    target: &LabeledGraph,
    host: &LabeledGraph,
) -> Result<ChainEmbedding, EmbedError> {
    let mut chains: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (label, rest) = line.split_once(':').ok_or_else(|| EmbedError::Malformed {
            line: lineno + 1,
            msg: "expected `label: h1 h2 ...`".into(),
        })?;
        let label = label.trim().to_string();
        let members: BTreeSet<Label> = rest
            .split_whitespace()
            .map(|s| s.to_string())
            .collect();
        if chains.insert(label.clone(), members).is_some() {
            return Err(EmbedError::Malformed {
                line: lineno + 1,
                msg: format!("duplicate chain for `{label}`"),
            });
        }
    }
    let embedding = ChainEmbedding {
        target: target.clone(),
        host: host.clone(),
        chains,
    };
    embedding.validate()?;
    Ok(embedding)
}

/// Singleton identity chains when the target is a labeled subgraph of the
/// host.
pub(crate) fn identity_chains(
    host: &LabeledGraph,
    target: &LabeledGraph,
) -> Option<ChainEmbedding> {
    for v in target.vertices() {
        if !host.contains_vertex(v) {
            return None;
        }
    }
    for e in target.edges() {
        if !host.contains_edge(e.lo(), e.hi()) {
            return None;
        }
    }
    let chains = target
        .vertices()
        .map(|v| (v.clone(), [v.clone()].into_iter().collect()))
        .collect();
    Some(ChainEmbedding {
        target: target.clone(),
        host: host.clone(),
        chains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    #[test]
    fn identity_embedding_validates() {
        let g = grid_graph(3);
        let e = identity_chains(&g, &g).unwrap();
        assert!(e.validate().is_ok());
    }

    #[test]
    fn validation_catches_each_invariant() {
        let host = grid_graph(2);
        let target = LabeledGraph::from_edges([("a", "b")]).unwrap();

        // missing chain
        let e = ChainEmbedding {
            target: target.clone(),
            host: host.clone(),
            chains: BTreeMap::new(),
        };
        assert!(matches!(e.validate(), Err(EmbedError::InvalidChains(_))));

        let chain = |items: &[&str]| items.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();

        // overlapping chains
        let e = ChainEmbedding {
            target: target.clone(),
            host: host.clone(),
            chains: [
                ("a".to_string(), chain(&["0,0"])),
                ("b".to_string(), chain(&["0,0"])),
            ]
            .into_iter()
            .collect(),
        };
        assert!(e.validate().is_err());

        // disconnected chain
        let e = ChainEmbedding {
            target: target.clone(),
            host: host.clone(),
            chains: [
                ("a".to_string(), chain(&["0,0", "1,1"])),
                ("b".to_string(), chain(&["0,1"])),
            ]
            .into_iter()
            .collect(),
        };
        let err = e.validate().unwrap_err().to_string();
        assert!(err.contains("not connected"), "{err}");

        // missing realization of a target edge
        let far_host = grid_graph(3);
        let e = ChainEmbedding {
            target: target.clone(),
            host: far_host,
            chains: [
                ("a".to_string(), chain(&["0,0"])),
                ("b".to_string(), chain(&["2,2"])),
            ]
            .into_iter()
            .collect(),
        };
        let err = e.validate().unwrap_err().to_string();
        assert!(err.contains("no host edge"), "{err}");

        // valid case
        let e = ChainEmbedding {
            target,
            host,
            chains: [
                ("a".to_string(), chain(&["0,0", "0,1"])),
                ("b".to_string(), chain(&["1,0", "1,1"])),
            ]
            .into_iter()
            .collect(),
        };
        assert!(e.validate().is_ok());
    }

    #[test]
    fn chains_file_round_trip() {
        let host = grid_graph(2);
        let target = LabeledGraph::from_edges([("a", "b")]).unwrap();
        let e = ChainEmbedding {
            target: target.clone(),
            host: host.clone(),
            chains: [
                (
                    "a".to_string(),
                    ["0,0".to_string(), "0,1".to_string()].into_iter().collect(),
                ),
                ("b".to_string(), ["1,0".to_string()].into_iter().collect()),
            ]
            .into_iter()
            .collect(),
        };
        let text = write_chains(&e);
        let back = parse_chains(&text, &target, &host).unwrap();
        assert_eq!(back, e);
        assert!(parse_chains("a 0,0\n", &target, &host).is_err());
    }
}
