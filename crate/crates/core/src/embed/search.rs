//! Randomized chain-growth search for minor witnesses.
//!
//! Target vertices are placed one at a time in a shuffled order: each new
//! chain starts from a host vertex minimizing the total shortest-path
//! distance (through unclaimed vertices) to the chains of its already-placed
//! neighbors, and claims those connecting paths. Dead ends trigger a full
//! restart with a fresh shuffle. The budget counts chain placements; a
//! `None` outcome is honest failure to find, never proof of absence. Every
//! returned embedding has passed invariant validation first.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::graph::{grid_graph, Label, LabeledGraph};

use super::{identity_chains, ChainEmbedding};

pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000;

/// Searches for the g-by-g grid as a minor of `host`.
pub fn find_grid_minor(
    host: &LabeledGraph,
    g: usize,
    budget: u64,
    seed: u64,
) -> Option<ChainEmbedding> {
    find_minor_chains(host, &grid_graph(g), budget, seed)
}

/// General chain search: find `target` as a minor of `host`.
pub fn find_minor_chains(
    host: &LabeledGraph,
    target: &LabeledGraph,
    budget: u64,
    seed: u64,
) -> Option<ChainEmbedding> {
    search(host, target, budget, seed, |e| e.validate().is_ok())
}

/// Chain search that only accepts witnesses convertible into a replayable
/// minor sequence. A witness whose mismatched singleton chains cover the
/// whole host admits no label-exact sequence, so callers that need to
/// replay should search with this entry point.
pub fn find_minor_with_sequence(
    host: &LabeledGraph,
    target: &LabeledGraph,
    budget: u64,
    seed: u64,
) -> Option<(ChainEmbedding, crate::graph::MinorSequence)> {
    let embedding = search(host, target, budget, seed, |e| {
        e.validate().is_ok() && convert_possibly_trimmed(e).is_some()
    })?;
    convert_possibly_trimmed(&embedding)
}

/// Converts as given, or after trimming redundant cells to free absorption
/// spares next to mismatched singletons.
fn convert_possibly_trimmed(
    e: &ChainEmbedding,
) -> Option<(ChainEmbedding, crate::graph::MinorSequence)> {
    if let Ok(seq) = super::chains_to_minor_sequence(e) {
        return Some((e.clone(), seq));
    }
    let trimmed = super::trim_chains(e);
    let seq = super::chains_to_minor_sequence(&trimmed).ok()?;
    Some((trimmed, seq))
}

fn search(
    host: &LabeledGraph,
    target: &LabeledGraph,
    budget: u64,
    seed: u64,
    accept: impl Fn(&ChainEmbedding) -> bool,
) -> Option<ChainEmbedding> {
    if target.is_empty() {
        return Some(ChainEmbedding {
            target: target.clone(),
            host: host.clone(),
            chains: BTreeMap::new(),
        });
    }
    if let Some(e) = identity_chains(host, target) {
        if accept(&e) {
            return Some(e);
        }
    }
    if host.vertex_count() < target.vertex_count() || host.edge_count() < target.edge_count() {
        return None;
    }

    let (host_labels, host_adj_sets) = host.adjacency_indexed();
    let host_adj: Vec<Vec<usize>> = host_adj_sets
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let (target_labels, target_adj_sets) = target.adjacency_indexed();
    let target_adj: Vec<Vec<usize>> = target_adj_sets
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..target_labels.len()).collect();

    let mut attempts: u64 = 0;
    let mut first_restart = true;
    while attempts < budget {
        // the first restart keeps the natural (sorted-label) order, which
        // already succeeds on regular hosts; later restarts shuffle
        if first_restart {
            first_restart = false;
        } else {
            order.shuffle(&mut rng);
        }
        if let Some(chains) =
            try_placement(&host_adj, &target_adj, &order, &mut rng, &mut attempts, budget)
        {
            let named: BTreeMap<Label, BTreeSet<Label>> = chains
                .into_iter()
                .enumerate()
                .map(|(t, members)| {
                    let set: BTreeSet<Label> = members
                        .into_iter()
                        .map(|h| host_labels[h].clone())
                        .collect();
                    (target_labels[t].clone(), set)
                })
                .collect();
            let embedding = ChainEmbedding {
                target: target.clone(),
                host: host.clone(),
                chains: named,
            };
            if accept(&embedding) {
                return Some(embedding);
            }
        }
    }
    None
}

const UNSET: u32 = u32::MAX;

fn try_placement(
    host_adj: &[Vec<usize>],
    target_adj: &[Vec<usize>],
    order: &[usize],
    rng: &mut ChaCha12Rng,
    attempts: &mut u64,
    budget: u64,
) -> Option<Vec<Vec<usize>>> {
    let hn = host_adj.len();
    let tn = target_adj.len();
    let mut chains: Vec<Vec<usize>> = vec![Vec::new(); tn];
    let mut placed = vec![false; tn];
    let mut claimed = vec![false; hn];

    for &t in order {
        *attempts += 1;
        if *attempts > budget {
            return None;
        }
        let placed_neighbors: Vec<usize> = target_adj[t]
            .iter()
            .copied()
            .filter(|&nb| placed[nb])
            .collect();

        if placed_neighbors.is_empty() {
            let free: Vec<usize> = (0..hn).filter(|&h| !claimed[h]).collect();
            if free.is_empty() {
                return None;
            }
            let root = free[rng.random_range(0..free.len())];
            claimed[root] = true;
            chains[t].push(root);
            placed[t] = true;
            continue;
        }

        // BFS distances through unclaimed host vertices per placed neighbor
        let mut dists: Vec<(Vec<u32>, Vec<u32>)> = Vec::with_capacity(placed_neighbors.len());
        for &nb in &placed_neighbors {
            dists.push(bfs_from_chain(host_adj, &chains[nb], &claimed));
        }

        let mut best: Vec<usize> = Vec::new();
        let mut best_cost = u64::MAX;
        for h in (0..hn).filter(|&h| !claimed[h]) {
            let mut cost: u64 = 0;
            let mut reachable = true;
            for (dist, _) in &dists {
                if dist[h] == UNSET {
                    reachable = false;
                    break;
                }
                cost += dist[h] as u64;
            }
            if !reachable {
                continue;
            }
            if cost < best_cost {
                best_cost = cost;
                best.clear();
            }
            if cost == best_cost {
                best.push(h);
            }
        }
        if best.is_empty() {
            return None; // this ordering painted itself into a corner
        }
        let root = best[rng.random_range(0..best.len())];

        let mut members = vec![root];
        claimed[root] = true;
        for (dist, parent) in &dists {
            let mut cursor = root;
            while parent[cursor] != UNSET {
                cursor = parent[cursor] as usize;
                if !claimed[cursor] {
                    claimed[cursor] = true;
                    members.push(cursor);
                }
            }
            debug_assert!(dist[members[0]] != UNSET);
        }
        chains[t] = members;
        placed[t] = true;
    }
    Some(chains)
}

/// Distances from the unclaimed frontier of `chain` through unclaimed
/// vertices; parents trace back toward the chain (`UNSET` at the frontier).
fn bfs_from_chain(
    host_adj: &[Vec<usize>],
    chain: &[usize],
    claimed: &[bool],
) -> (Vec<u32>, Vec<u32>) {
    let n = host_adj.len();
    let mut dist = vec![UNSET; n];
    let mut parent = vec![UNSET; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &member in chain {
        for &nb in &host_adj[member] {
            if !claimed[nb] && dist[nb] == UNSET {
                dist[nb] = 1;
                queue.push_back(nb);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &nb in &host_adj[v] {
            if !claimed[nb] && dist[nb] == UNSET {
                dist[nb] = dist[v] + 1;
                parent[nb] = v as u32;
                queue.push_back(nb);
            }
        }
    }
    (dist, parent)
}
