//! The end-to-end reduction driver.
//!
//! A pipeline turns a planar 2-CNF into an inference problem on an arbitrary
//! host graph in nine recorded stages: parse, encode, embed the constraint
//! graph into a grid, lift the model onto the grid, find the grid inside the
//! host, convert that witness to a minor sequence, lift onto the host,
//! compute the partition function, and decide (or count). The decision path
//! runs on exact rationals throughout; each stage records fingerprints of
//! the artifact it consumed and produced, so a trace documents the whole
//! data flow. Lifts are re-verified by brute-force partition equality
//! whenever the graphs are small enough to enumerate.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

use gridlift::csp::{
    brute_count, brute_maxsat, encode_max2csp, parse_dimacs_2cnf, CspError, Encoding,
};
use gridlift::embed::{
    chains_to_minor_sequence, find_minor_with_sequence, is_planar, planar_to_grid_minor,
    EmbedError,
};
use gridlift::graph::{grid_graph, LabeledGraph};
use gridlift::lift::lift_model;
use gridlift::model::{
    partition_brute_with_cap, partition_junction_tree, Model, ModelError, NumericMode,
};
use gridlift::num::ExactNumber;

pub const DEFAULT_PIPELINE_BUDGET: u64 = 100_000;

/// Assignment-count ceiling for the final brute-force path; larger models
/// go to the junction tree (still exact).
const BRUTE_PARTITION_CAP: u128 = 1 << 16;

/// Vertex ceiling for the stage-local lift verification, with an
/// assignment cap to match (2^20 covers 20 binary variables).
const LIFT_CHECK_VERTEX_CAP: usize = 20;
const LIFT_CHECK_ASSIGNMENT_CAP: u128 = 1 << 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("the constraint graph is not planar; the pipeline accepts planar 2-CNF instances only")]
    NotPlanar { stage: String },
    #[error("no grid minor found in the host within budget")]
    GridEmbedNotFound { stage: String },
    #[error("enumeration cap exceeded: {message}")]
    CapExceeded { stage: String, message: String },
    #[error("{message}")]
    Stage { stage: String, message: String },
}

impl PipelineError {
    pub fn stage(&self) -> &str {
        match self {
            PipelineError::NotPlanar { stage }
            | PipelineError::GridEmbedNotFound { stage }
            | PipelineError::CapExceeded { stage, .. }
            | PipelineError::Stage { stage, .. } => stage,
        }
    }
}

fn stage_err(stage: &str) -> impl Fn(CspError) -> PipelineError + '_ {
    move |e| match e {
        CspError::CapExceeded { .. } => PipelineError::CapExceeded {
            stage: stage.to_string(),
            message: e.to_string(),
        },
        other => PipelineError::Stage {
            stage: stage.to_string(),
            message: other.to_string(),
        },
    }
}

fn model_err(stage: &str, e: ModelError) -> PipelineError {
    match e {
        ModelError::CapExceeded { .. } => PipelineError::CapExceeded {
            stage: stage.to_string(),
            message: e.to_string(),
        },
        other => PipelineError::Stage {
            stage: stage.to_string(),
            message: other.to_string(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Decision(bool),
    Count(BigUint),
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Decision(b) => write!(f, "{b}"),
            Outcome::Count(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StageRecord {
    pub name: &'static str,
    pub input_fingerprint: String,
    pub output_fingerprint: String,
    pub elapsed: Duration,
    pub size_metrics: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct PipelineTrace {
    pub stages: Vec<StageRecord>,
    pub final_decision: Outcome,
    pub oracle_decision: Option<Outcome>,
    /// Exact partition function of the final host model.
    pub z: ExactNumber,
    pub epsilon: ExactNumber,
    pub constraint_count: usize,
    pub grid_side: usize,
}

impl PipelineTrace {
    /// Exact decision at a different threshold, reusing the computed Z.
    pub fn decide_at(&self, d: usize) -> Option<bool> {
        if d > self.constraint_count {
            return None;
        }
        let h = self.epsilon.pow((self.constraint_count - d) as u32);
        Some(self.z >= h)
    }
}

fn fingerprint(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Recorder {
    stages: Vec<StageRecord>,
}

impl Recorder {
    fn record(
        &mut self,
        name: &'static str,
        input_dump: &str,
        output_dump: &str,
        started: Instant,
        metrics: &[(&str, String)],
    ) {
        self.stages.push(StageRecord {
            name,
            input_fingerprint: fingerprint(input_dump),
            output_fingerprint: fingerprint(output_dump),
            elapsed: started.elapsed(),
            size_metrics: metrics
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        });
    }
}

fn encoding_dump(enc: &Encoding) -> String {
    format!(
        "{}epsilon {}\nm {}\n",
        enc.model.canonical_dump(),
        enc.epsilon,
        enc.m
    )
}

/// Decision pipeline: is at least `d` of the CNF's clauses satisfiable,
/// answered through an inference problem on `host`?
pub fn run_pipeline(
    cnf: &str,
    host: &LabeledGraph,
    d: usize,
    budget: u64,
    seed: u64,
) -> Result<PipelineTrace, PipelineError> {
    run(cnf, host, Some(d), budget, seed)
}

/// Counting pipeline: the number of satisfying assignments, recovered as
/// the integer part of the host model's partition function.
pub fn run_count_pipeline(
    cnf: &str,
    host: &LabeledGraph,
    budget: u64,
    seed: u64,
) -> Result<PipelineTrace, PipelineError> {
    run(cnf, host, None, budget, seed)
}

fn run(
    cnf: &str,
    host: &LabeledGraph,
    decision_d: Option<usize>,
    budget: u64,
    seed: u64,
) -> Result<PipelineTrace, PipelineError> {
    let mut rec = Recorder { stages: Vec::new() };

    // parse
    let started = Instant::now();
    let inst = parse_dimacs_2cnf(cnf).map_err(stage_err("parse"))?;
    let inst_dump = inst.canonical_dump();
    rec.record(
        "parse",
        cnf,
        &inst_dump,
        started,
        &[
            ("variables", inst.variable_count().to_string()),
            ("constraints", inst.constraint_count().to_string()),
        ],
    );

    // encode
    let started = Instant::now();
    let enc = encode_max2csp(&inst, None).map_err(stage_err("encode"))?;
    if !is_planar(enc.model.graph()) {
        return Err(PipelineError::NotPlanar {
            stage: "encode".into(),
        });
    }
    let enc_dump = encoding_dump(&enc);
    rec.record(
        "encode",
        &inst_dump,
        &enc_dump,
        started,
        &[
            ("model_vertices", enc.model.graph().vertex_count().to_string()),
            ("model_edges", enc.model.graph().edge_count().to_string()),
        ],
    );

    // embed the constraint graph into a grid
    let started = Instant::now();
    let grid_embedding = planar_to_grid_minor(enc.model.graph()).map_err(|e| match e {
        EmbedError::NotPlanar => PipelineError::NotPlanar {
            stage: "planar-to-grid".into(),
        },
        other => PipelineError::Stage {
            stage: "planar-to-grid".into(),
            message: other.to_string(),
        },
    })?;
    let grid_side = grid_embedding.grid_side;
    let grid = grid_graph(grid_side);
    let seq_dump = gridlift::graph::io::write_minor_sequence(&grid_embedding.sequence);
    let embed_dump = format!("{enc_dump}grid_side {grid_side}\n{seq_dump}");
    rec.record(
        "planar-to-grid",
        &enc_dump,
        &embed_dump,
        started,
        &[
            ("grid_side", grid_side.to_string()),
            ("ops", grid_embedding.sequence.len().to_string()),
        ],
    );

    // lift onto the grid
    let started = Instant::now();
    let grid_model = lift_model(&grid, &grid_embedding.sequence, &enc.model)
        .map_err(|e| PipelineError::Stage {
            stage: "lift-to-grid".into(),
            message: e.to_string(),
        })?;
    let z_check_grid = verify_lift("lift-to-grid", &enc.model, &grid_model)?;
    let grid_model_dump = format!(
        "{}epsilon {}\nm {}\n",
        grid_model.canonical_dump(),
        enc.epsilon,
        enc.m
    );
    rec.record(
        "lift-to-grid",
        &embed_dump,
        &grid_model_dump,
        started,
        &[
            ("vertices", grid_model.graph().vertex_count().to_string()),
            ("z_check", z_check_grid.to_string()),
        ],
    );

    // find the grid inside the host
    let started = Instant::now();
    let (host_chains, host_seq) = find_minor_with_sequence(host, &grid, budget, seed)
        .ok_or_else(|| PipelineError::GridEmbedNotFound {
            stage: "find-grid-minor".into(),
        })?;
    let chains_dump = gridlift::embed::write_chains(&host_chains);
    let find_dump = format!("{grid_model_dump}{chains_dump}");
    rec.record(
        "find-grid-minor",
        &grid_model_dump,
        &find_dump,
        started,
        &[(
            "chain_cells",
            host_chains
                .chains
                .values()
                .map(|c| c.len())
                .sum::<usize>()
                .to_string(),
        )],
    );

    // convert the witness to a sequence
    let started = Instant::now();
    let host_seq_check = chains_to_minor_sequence(&host_chains).map_err(|e| {
        PipelineError::Stage {
            stage: "chains-to-sequence".into(),
            message: e.to_string(),
        }
    })?;
    debug_assert_eq!(host_seq_check, host_seq);
    let host_seq_dump = gridlift::graph::io::write_minor_sequence(&host_seq);
    let seq_stage_dump = format!("{grid_model_dump}{host_seq_dump}");
    rec.record(
        "chains-to-sequence",
        &find_dump,
        &seq_stage_dump,
        started,
        &[("ops", host_seq.len().to_string())],
    );

    // lift onto the host
    let started = Instant::now();
    let host_model =
        lift_model(host, &host_seq, &grid_model).map_err(|e| PipelineError::Stage {
            stage: "lift-to-host".into(),
            message: e.to_string(),
        })?;
    let z_check_host = verify_lift("lift-to-host", &grid_model, &host_model)?;
    let host_model_dump = format!(
        "{}epsilon {}\nm {}\n",
        host_model.canonical_dump(),
        enc.epsilon,
        enc.m
    );
    rec.record(
        "lift-to-host",
        &seq_stage_dump,
        &host_model_dump,
        started,
        &[
            ("vertices", host_model.graph().vertex_count().to_string()),
            ("z_check", z_check_host.to_string()),
        ],
    );

    // partition function, exact
    let started = Instant::now();
    let (z, method) = exact_partition("partition", &host_model)?;
    let z_dump = format!("z {z}\n");
    rec.record(
        "partition",
        &host_model_dump,
        &z_dump,
        started,
        &[("method", method.to_string())],
    );

    // decide or count, plus the independent oracle
    let started = Instant::now();
    let (final_decision, oracle_decision) = match decision_d {
        Some(d) => {
            if d > enc.m {
                return Err(PipelineError::Stage {
                    stage: "decide".into(),
                    message: format!("d = {d} out of range 0..={}", enc.m),
                });
            }
            let threshold = enc.epsilon.pow((enc.m - d) as u32);
            let decision = z >= threshold;
            let oracle = brute_maxsat(&inst).ok().map(|best| Outcome::Decision(best >= d));
            (Outcome::Decision(decision), oracle)
        }
        None => {
            let count = z.floor();
            let oracle = brute_count(&inst).ok().map(|c| Outcome::Count(BigUint::from(c)));
            (Outcome::Count(count), oracle)
        }
    };
    let out_dump = format!("outcome {final_decision}\n");
    rec.record(
        "decide",
        &z_dump,
        &out_dump,
        started,
        &[(
            "oracle",
            oracle_decision
                .as_ref()
                .map(|o| o.to_string())
                .unwrap_or_else(|| "skipped".into()),
        )],
    );

    if let Some(oracle) = &oracle_decision {
        if oracle != &final_decision {
            return Err(PipelineError::Stage {
                stage: "decide".into(),
                message: format!(
                    "pipeline outcome {final_decision} contradicts the brute-force oracle {oracle}"
                ),
            });
        }
    }

    Ok(PipelineTrace {
        stages: rec.stages,
        final_decision,
        oracle_decision,
        z,
        epsilon: enc.epsilon,
        constraint_count: enc.m,
        grid_side,
    })
}

/// Brute-force Z equality across a lift whenever both sides are small
/// enough to enumerate; returns whether the check ran.
fn verify_lift(stage: &str, before: &Model, after: &Model) -> Result<bool, PipelineError> {
    let small = |m: &Model| m.graph().vertex_count() <= LIFT_CHECK_VERTEX_CAP;
    if !(small(before) && small(after)) {
        return Ok(false);
    }
    let zb = partition_brute_with_cap(before, LIFT_CHECK_ASSIGNMENT_CAP)
        .map_err(|e| model_err(stage, e))?;
    let za = partition_brute_with_cap(after, LIFT_CHECK_ASSIGNMENT_CAP)
        .map_err(|e| model_err(stage, e))?;
    if zb != za {
        return Err(PipelineError::Stage {
            stage: stage.to_string(),
            message: format!("lift changed the partition function: {zb} != {za}"),
        });
    }
    Ok(true)
}

fn exact_partition(
    stage: &str,
    m: &Model,
) -> Result<(ExactNumber, &'static str), PipelineError> {
    let assignments = (m.q() as u128).checked_pow(m.graph().vertex_count() as u32);
    if assignments.map(|a| a <= BRUTE_PARTITION_CAP).unwrap_or(false) {
        let z = partition_brute_with_cap(m, BRUTE_PARTITION_CAP)
            .map_err(|e| model_err(stage, e))?;
        return Ok((z, "brute"));
    }
    let report =
        partition_junction_tree(m, NumericMode::Exact).map_err(|e| model_err(stage, e))?;
    let z = report
        .z
        .as_exact()
        .expect("exact mode yields exact values")
        .clone();
    Ok((z, "junction-tree"))
}
