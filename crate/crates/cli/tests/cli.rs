//! Exercises the compiled binary: file formats, exit codes, stderr tags.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gridlift::graph::io::{parse_minor_sequence, write_graph};
use gridlift::graph::{grid_graph, validate_minor_sequence, LabeledGraph};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridlift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn write_file(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn encode_then_solve_reports_the_expected_partition() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let model = dir.path().join("m.uai");
    write_file(&cnf, "p cnf 2 1\n1 2 0\n");

    let out = run(&[
        "encode",
        "--cnf",
        cnf.to_str().unwrap(),
        "--mode",
        "max",
        "--epsilon",
        "1/8",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let sidecar = fs::read_to_string(dir.path().join("m.uai.thresh")).unwrap();
    assert!(sidecar.contains("epsilon 1/8"));
    assert!(sidecar.contains("m 1"));

    let solve = run(&["solve", "--model", model.to_str().unwrap(), "--method", "brute"]);
    assert!(solve.status.success());
    assert!(stdout(&solve).contains("Z = 25/8"), "{}", stdout(&solve));
}

#[test]
fn junction_tree_solver_exact_and_float() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let model = dir.path().join("m.uai");
    write_file(&cnf, "p cnf 2 2\n1 2 0\n-1 -2 0\n");
    let out = run(&[
        "encode",
        "--cnf",
        cnf.to_str().unwrap(),
        "--mode",
        "max",
        "--epsilon",
        "1/8",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let exact = run(&[
        "solve",
        "--model",
        model.to_str().unwrap(),
        "--method",
        "jt",
        "--exact",
    ]);
    assert!(exact.status.success());
    assert!(stdout(&exact).contains("Z = 9/4"), "{}", stdout(&exact));

    let float = run(&["solve", "--model", model.to_str().unwrap(), "--method", "jt"]);
    assert!(float.status.success());
    assert!(stdout(&float).contains("Z = 2.25"), "{}", stdout(&float));
}

#[test]
fn embed_grid_emits_a_replayable_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g.graph");
    let seq_path = dir.path().join("g.mseq");
    let g = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
    write_file(&graph_path, &write_graph(&g));

    let out = run(&[
        "embed-grid",
        "--graph",
        graph_path.to_str().unwrap(),
        "--out",
        seq_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let side: usize = stdout(&out)
        .trim()
        .strip_prefix("gridSide ")
        .unwrap()
        .parse()
        .unwrap();
    let seq = parse_minor_sequence(&fs::read_to_string(&seq_path).unwrap()).unwrap();
    assert!(validate_minor_sequence(&grid_graph(side), &seq, &g));
}

#[test]
fn embed_grid_rejects_nonplanar_input_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("k5.graph");
    let names = ["a", "b", "c", "d", "e"];
    let mut edges = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            edges.push((names[i], names[j]));
        }
    }
    let k5 = LabeledGraph::from_edges(edges).unwrap();
    write_file(&graph_path, &write_graph(&k5));

    let out = run(&[
        "embed-grid",
        "--graph",
        graph_path.to_str().unwrap(),
        "--out",
        dir.path().join("x.mseq").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("stage embed-grid"), "{}", stderr(&out));
}

#[test]
fn find_grid_writes_chains_or_fails_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let host_path = dir.path().join("host.graph");
    write_file(&host_path, &write_graph(&grid_graph(4)));
    let chains_path = dir.path().join("e.chains");

    let out = run(&[
        "find-grid",
        "--host",
        host_path.to_str().unwrap(),
        "--g",
        "3",
        "--seed",
        "1",
        "--out",
        chains_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&chains_path).unwrap();
    let parsed = gridlift::embed::parse_chains(&text, &grid_graph(3), &grid_graph(4)).unwrap();
    assert_eq!(parsed.chains.len(), 9);

    // a path host has no cycle minor at all
    let path_host = dir.path().join("path.graph");
    let path = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
    write_file(&path_host, &write_graph(&path));
    let missing = run(&[
        "find-grid",
        "--host",
        path_host.to_str().unwrap(),
        "--g",
        "2",
        "--budget",
        "5000",
        "--out",
        dir.path().join("none.chains").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("stage find-grid"));
}

#[test]
fn lift_through_files_preserves_the_partition() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    write_file(&cnf, "p cnf 2 1\n1 2 0\n");
    let model = dir.path().join("m.uai");
    let out = run(&[
        "encode",
        "--cnf",
        cnf.to_str().unwrap(),
        "--mode",
        "max",
        "--epsilon",
        "1/8",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // embed the two-variable constraint graph into its grid
    let graph_path = dir.path().join("g.graph");
    let g = LabeledGraph::from_edges([("x1", "x2")]).unwrap();
    write_file(&graph_path, &write_graph(&g));
    let seq_path = dir.path().join("g.mseq");
    let embed = run(&[
        "embed-grid",
        "--graph",
        graph_path.to_str().unwrap(),
        "--out",
        seq_path.to_str().unwrap(),
    ]);
    assert!(embed.status.success());
    let side: usize = stdout(&embed)
        .trim()
        .strip_prefix("gridSide ")
        .unwrap()
        .parse()
        .unwrap();

    let host_path = dir.path().join("host.graph");
    write_file(&host_path, &write_graph(&grid_graph(side)));
    let lifted = dir.path().join("lifted.uai");
    let lift = run(&[
        "lift",
        "--model",
        model.to_str().unwrap(),
        "--host",
        host_path.to_str().unwrap(),
        "--seq",
        seq_path.to_str().unwrap(),
        "--out",
        lifted.to_str().unwrap(),
    ]);
    assert!(lift.status.success(), "{}", stderr(&lift));

    let solve = run(&["solve", "--model", lifted.to_str().unwrap(), "--method", "brute"]);
    assert!(stdout(&solve).contains("Z = 25/8"), "{}", stdout(&solve));
}

#[test]
fn pipeline_command_end_to_end_and_staged_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    write_file(&cnf, "p cnf 2 1\n1 2 0\n");
    let host_path = dir.path().join("host.graph");
    write_file(&host_path, &write_graph(&grid_graph(4)));

    let out = run(&[
        "pipeline",
        "--cnf",
        cnf.to_str().unwrap(),
        "--host",
        host_path.to_str().unwrap(),
        "--d",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("result true (oracle true)"), "{}", stdout(&out));

    let count = run(&[
        "pipeline",
        "--cnf",
        cnf.to_str().unwrap(),
        "--host",
        host_path.to_str().unwrap(),
        "--count",
    ]);
    assert!(count.status.success());
    assert!(stdout(&count).contains("result 3 (oracle 3)"), "{}", stdout(&count));

    // staged failure: a path host cannot hold any grid
    let path_host = dir.path().join("path.graph");
    let path = LabeledGraph::from_edges([("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
    write_file(&path_host, &write_graph(&path));
    let failed = run(&[
        "pipeline",
        "--cnf",
        cnf.to_str().unwrap(),
        "--host",
        path_host.to_str().unwrap(),
        "--d",
        "1",
        "--budget",
        "5000",
    ]);
    assert_eq!(failed.status.code(), Some(2));
    assert!(
        stderr(&failed).contains("stage find-grid-minor"),
        "{}",
        stderr(&failed)
    );
}

#[test]
fn bench_writes_a_tab_separated_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.tsv");
    let out = run(&[
        "bench",
        "--grids",
        "2..3",
        "--reps",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tsv = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "g\twidth_proxy\tmedian_us\tpeak_clique_size\treps");
    assert_eq!(lines.len(), 3);
}

#[test]
fn malformed_input_is_a_plain_error_not_a_staged_one() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("bad.cnf");
    write_file(&cnf, "p cnf 3 1\n1 2 3 0\n");
    let out = run(&[
        "encode",
        "--cnf",
        cnf.to_str().unwrap(),
        "--mode",
        "max",
        "--out",
        dir.path().join("m.uai").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("width"), "{}", stderr(&out));
}
