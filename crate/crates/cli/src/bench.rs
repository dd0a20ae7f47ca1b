//! Junction-tree scaling harness.
//!
//! Random binary models on growing square grids, timed on the float path.
//! The table reports the min-fill width as a treewidth proxy and the peak
//! clique size, which is what the runtime is exponential in.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use gridlift::graph::{grid_graph, treewidth_upper};
use gridlift::model::{partition_junction_tree, ModelError, NumericMode};
use gridlift::random::random_model;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub g: usize,
    pub width_proxy: usize,
    pub median: Duration,
    pub peak_clique_size: usize,
    pub reps: usize,
}

pub fn bench_scaling(
    g_min: usize,
    g_max: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRow>, ModelError> {
    assert!(g_min >= 1 && g_min <= g_max);
    let reps = reps.max(1);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for g in g_min..=g_max {
        let grid = grid_graph(g);
        let width_proxy = treewidth_upper(&grid)?.width;
        let mut times = Vec::with_capacity(reps);
        let mut peak = 0usize;
        for _ in 0..reps {
            let model = random_model(&mut rng, &grid, 2);
            let started = Instant::now();
            let report = partition_junction_tree(&model, NumericMode::Float)?;
            times.push(started.elapsed());
            peak = peak.max(report.peak_clique_size);
        }
        times.sort();
        rows.push(BenchRow {
            g,
            width_proxy,
            median: times[times.len() / 2],
            peak_clique_size: peak,
            reps,
        });
    }
    Ok(rows)
}

/// Tab-separated table with a header row; times in microseconds.
pub fn write_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("g\twidth_proxy\tmedian_us\tpeak_clique_size\treps\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.g,
            row.width_proxy,
            row.median.as_micros(),
            row.peak_clique_size,
            row.reps
        ));
    }
    out
}
