use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gridlift::csp::{encode_count, encode_max2csp, parse_dimacs_2cnf};
use gridlift::embed::{find_grid_minor, planar_to_grid_minor, write_chains, EmbedError};
use gridlift::graph::io::{parse_graph, parse_minor_sequence, write_minor_sequence};
use gridlift::graph::LabeledGraph;
use gridlift::lift::lift_model;
use gridlift::model::io::{parse_uai, write_uai};
use gridlift::model::{partition_brute, partition_junction_tree, NumericMode};
use gridlift::num::ExactNumber;

use gridlift_cli::bench::{bench_scaling, write_tsv};
use gridlift_cli::pipeline::{run_count_pipeline, run_pipeline, PipelineError};

#[derive(Parser)]
#[command(
    name = "gridlift",
    about = "Partition-function-preserving reductions: CSP encodings, minor lifts, and grid embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeMode {
    Max,
    Count,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Brute,
    Jt,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a 2-CNF as a graphical model with a threshold sidecar
    Encode {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, value_enum)]
        mode: EncodeMode,
        /// Override the default epsilon of 1/(2 q^n), as `a/b`
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lift a model from a minor onto a host graph along a minor sequence
    Lift {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a planar graph as a grid minor, emitting the minor sequence
    EmbedGrid {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a g-by-g grid minor witness inside a host graph
    FindGrid {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = gridlift::embed::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the partition function of a model file
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        method: SolveMethod,
        /// Run the junction tree on exact rationals instead of floats
        #[arg(long)]
        exact: bool,
    },
    /// Run the full reduction pipeline against a host graph
    Pipeline {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        host: PathBuf,
        /// Decision threshold: at least this many satisfied clauses
        #[arg(long, conflicts_with = "count")]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = gridlift_cli::pipeline::DEFAULT_PIPELINE_BUDGET)]
        budget: u64,
        /// Count satisfying assignments instead of deciding
        #[arg(long)]
        count: bool,
    },
    /// Time junction-tree inference on random grid models
    Bench {
        /// Inclusive grid-side range, e.g. `2..6`
        #[arg(long)]
        grids: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output TSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CmdError {
    /// A named pipeline or reduction stage failed; exit code 2.
    Staged { stage: String, message: String },
    Other(anyhow::Error),
}

impl From<anyhow::Error> for CmdError {
    fn from(e: anyhow::Error) -> Self {
        CmdError::Other(e)
    }
}

impl From<PipelineError> for CmdError {
    fn from(e: PipelineError) -> Self {
        CmdError::Staged {
            stage: e.stage().to_string(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Staged { stage, message }) => {
            eprintln!("stage {stage}: {message}");
            ExitCode::from(2)
        }
        Err(CmdError::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

fn dispatch(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Encode {
            cnf,
            mode,
            epsilon,
            out,
        } => {
            let text = read(&cnf)?;
            let inst = parse_dimacs_2cnf(&text)
                .with_context(|| format!("parsing {}", cnf.display()))?;
            let eps = epsilon
                .map(|s| s.parse::<ExactNumber>())
                .transpose()
                .context("parsing --epsilon")?;
            let enc = match mode {
                EncodeMode::Max => encode_max2csp(&inst, eps).context("encoding")?,
                EncodeMode::Count => {
                    let model = encode_count(&inst).context("encoding")?;
                    // the sidecar still records the epsilon baked into the model
                    let reference = encode_max2csp(&inst, None).context("encoding")?;
                    debug_assert_eq!(model, reference.model);
                    reference
                }
            };
            write(&out, &write_uai(&enc.model))?;
            let sidecar = PathBuf::from(format!("{}.thresh", out.display()));
            write(&sidecar, &format!("epsilon {}\nm {}\n", enc.epsilon, enc.m))?;
            println!(
                "encoded {} variables, {} constraints; epsilon {}",
                inst.variable_count(),
                inst.constraint_count(),
                enc.epsilon
            );
            Ok(())
        }
        Command::Lift {
            model,
            host,
            seq,
            out,
        } => {
            let m = parse_uai(&read(&model)?)
                .with_context(|| format!("parsing {}", model.display()))?;
            let host_graph = load_graph(&host)?;
            let sequence = parse_minor_sequence(&read(&seq)?)
                .with_context(|| format!("parsing {}", seq.display()))?;
            let lifted = lift_model(&host_graph, &sequence, &m).map_err(|e| CmdError::Staged {
                stage: "lift".into(),
                message: e.to_string(),
            })?;
            write(&out, &write_uai(&lifted))?;
            println!(
                "lifted onto {} vertices / {} edges",
                host_graph.vertex_count(),
                host_graph.edge_count()
            );
            Ok(())
        }
        Command::EmbedGrid { graph, out } => {
            let g = load_graph(&graph)?;
            let result = planar_to_grid_minor(&g).map_err(|e| match e {
                EmbedError::NotPlanar => CmdError::Staged {
                    stage: "embed-grid".into(),
                    message: "graph is not planar".into(),
                },
                other => CmdError::Staged {
                    stage: "embed-grid".into(),
                    message: other.to_string(),
                },
            })?;
            write(&out, &write_minor_sequence(&result.sequence))?;
            println!("gridSide {}", result.grid_side);
            Ok(())
        }
        Command::FindGrid {
            host,
            g,
            budget,
            seed,
            out,
        } => {
            let host_graph = load_graph(&host)?;
            match find_grid_minor(&host_graph, g, budget, seed) {
                Some(embedding) => {
                    write(&out, &write_chains(&embedding))?;
                    println!("found {}x{} grid minor", g, g);
                    Ok(())
                }
                None => Err(CmdError::Staged {
                    stage: "find-grid".into(),
                    message: format!("no {g}x{g} grid minor found within budget {budget}"),
                }),
            }
        }
        Command::Solve {
            model,
            method,
            exact,
        } => {
            let m = parse_uai(&read(&model)?)
                .with_context(|| format!("parsing {}", model.display()))?;
            match method {
                SolveMethod::Brute => {
                    let z = partition_brute(&m).map_err(|e| CmdError::Staged {
                        stage: "solve".into(),
                        message: e.to_string(),
                    })?;
                    println!("Z = {z}");
                    println!("method brute (exact)");
                }
                SolveMethod::Jt => {
                    let mode = if exact {
                        NumericMode::Exact
                    } else {
                        NumericMode::Float
                    };
                    let report =
                        partition_junction_tree(&m, mode).map_err(|e| CmdError::Staged {
                            stage: "solve".into(),
                            message: e.to_string(),
                        })?;
                    match report.z {
                        gridlift::model::ZValue::Exact(z) => println!("Z = {z}"),
                        gridlift::model::ZValue::Float(z) => println!("Z = {z:e}"),
                    }
                    println!(
                        "method junction-tree peak_clique {} elapsed {:?}",
                        report.peak_clique_size, report.elapsed
                    );
                }
            }
            Ok(())
        }
        Command::Pipeline {
            cnf,
            host,
            d,
            seed,
            budget,
            count,
        } => {
            let text = read(&cnf)?;
            let host_graph = load_graph(&host)?;
            let trace = if count {
                run_count_pipeline(&text, &host_graph, budget, seed)?
            } else {
                let d = d.ok_or_else(|| {
                    CmdError::Other(anyhow::anyhow!("--d is required unless --count is set"))
                })?;
                run_pipeline(&text, &host_graph, d, budget, seed)?
            };
            for stage in &trace.stages {
                let metrics: Vec<String> = stage
                    .size_metrics
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                println!(
                    "stage {:<18} {:>9.1?}  {}",
                    stage.name,
                    stage.elapsed,
                    metrics.join(" ")
                );
            }
            println!("grid side {}", trace.grid_side);
            println!("Z = {}", trace.z);
            match &trace.oracle_decision {
                Some(oracle) => println!("result {} (oracle {})", trace.final_decision, oracle),
                None => println!("result {} (oracle skipped)", trace.final_decision),
            }
            Ok(())
        }
        Command::Bench {
            grids,
            reps,
            seed,
            out,
        } => {
            let (g_min, g_max) = parse_range(&grids)?;
            let rows = bench_scaling(g_min, g_max, reps, seed).map_err(|e| CmdError::Staged {
                stage: "bench".into(),
                message: e.to_string(),
            })?;
            let tsv = write_tsv(&rows);
            match out {
                Some(path) => write(&path, &tsv)?,
                None => print!("{tsv}"),
            }
            Ok(())
        }
    }
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once("..")
        .with_context(|| format!("expected `min..max`, got `{text}`"))?;
    let g_min: usize = a.trim().parse().context("parsing range start")?;
    let g_max: usize = b.trim().parse().context("parsing range end")?;
    if g_min < 1 || g_min > g_max {
        bail!("invalid grid range {g_min}..{g_max}");
    }
    Ok((g_min, g_max))
}
