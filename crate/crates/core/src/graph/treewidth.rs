//! Treewidth via elimination orders.
//!
//! `treewidth_exact` runs a memoized branch-and-bound over elimination
//! orders, seeded with the min-fill upper bound and pruned with greedy
//! clique lower bounds. `treewidth_upper` is the plain min-fill heuristic.
//! Both return a certifying elimination order: simulating the order yields
//! exactly `width + 1` as the largest fill-in clique.

use std::collections::HashMap;

use super::{GraphError, Label, LabeledGraph};

pub const DEFAULT_TREEWIDTH_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreewidthResult {
    pub width: usize,
    pub elimination_order: Vec<Label>,
    /// True when the search certified optimality; false when the budget ran
    /// out (the result is then a valid upper bound) or for heuristic results.
    pub exact: bool,
}

/// Max clique size seen while eliminating `order` (with fill-in), minus one.
/// Returns `None` if `order` is not a permutation of the vertices.
pub fn elimination_width(g: &LabeledGraph, order: &[Label]) -> Option<usize> {
    let (labels, adj_sets) = g.adjacency_indexed();
    if order.len() != labels.len() {
        return None;
    }
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let n = labels.len();
    if n > 63 {
        return None;
    }
    let mut adj = sets_to_masks(&adj_sets);
    let mut remaining: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let mut width = 0usize;
    for label in order {
        let &v = index.get(label.as_str())?;
        if remaining & (1 << v) == 0 {
            return None; // repeated vertex
        }
        let nbrs = adj[v] & remaining & !(1 << v);
        width = width.max(nbrs.count_ones() as usize);
        connect_clique(&mut adj, nbrs);
        remaining &= !(1 << v);
    }
    Some(width)
}

fn sets_to_masks(adj_sets: &[std::collections::BTreeSet<usize>]) -> Vec<u64> {
    adj_sets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &j| m | (1 << j)))
        .collect()
}

fn connect_clique(adj: &mut [u64], members: u64) {
    let mut rest = members;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        adj[v] |= members & !(1u64 << v);
    }
}

/// Min-fill heuristic upper bound with a certifying order.
/// Ties break toward the lowest label.
pub fn treewidth_upper(g: &LabeledGraph) -> Result<TreewidthResult, GraphError> {
    if g.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    if g.vertex_count() > 63 {
        return Err(GraphError::TooLarge(g.vertex_count()));
    }
    let (labels, adj_sets) = g.adjacency_indexed();
    let mut adj = sets_to_masks(&adj_sets);
    let n = labels.len();
    let mut remaining: u64 = (1u64 << n) - 1;
    let mut order = Vec::with_capacity(n);
    let mut width = 0usize;
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None; // (fill, vertex)
        let mut rest = remaining;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let fill = fill_count(&adj, remaining, v);
            // labels are in canonical order, so lower index = lower label
            if best.map(|(bf, _)| fill < bf).unwrap_or(true) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.expect("nonempty remaining set");
        let nbrs = adj[v] & remaining & !(1 << v);
        width = width.max(nbrs.count_ones() as usize);
        connect_clique(&mut adj, nbrs);
        remaining &= !(1 << v);
        order.push(labels[v].clone());
    }
    Ok(TreewidthResult {
        width,
        elimination_order: order,
        exact: false,
    })
}

fn fill_count(adj: &[u64], remaining: u64, v: usize) -> usize {
    let nbrs = adj[v] & remaining & !(1u64 << v);
    let mut fill = 0usize;
    let mut rest = nbrs;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        fill += (nbrs & !adj[a] & !(1u64 << a) & (u64::MAX << (a + 1))).count_ones() as usize;
    }
    fill
}

/// Greedy clique in the remaining graph; returns its size.
fn greedy_clique(adj: &[u64], remaining: u64) -> usize {
    let mut best = 0usize;
    let mut rest = remaining;
    while rest != 0 {
        let seed = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let mut clique = 1u64 << seed;
        let mut candidates = adj[seed] & remaining;
        while candidates != 0 {
            // pick the candidate with most neighbors among candidates
            let mut pick = None;
            let mut pick_deg = 0;
            let mut c = candidates;
            while c != 0 {
                let v = c.trailing_zeros() as usize;
                c &= c - 1;
                let d = (adj[v] & candidates).count_ones();
                if pick.is_none() || d > pick_deg {
                    pick = Some(v);
                    pick_deg = d;
                }
            }
            let v = pick.unwrap();
            clique |= 1u64 << v;
            candidates &= adj[v] & !(1u64 << v);
        }
        best = best.max(clique.count_ones() as usize);
    }
    best
}

enum Eval {
    Exact(usize),
    Pruned,
}

struct Search {
    base_adj: Vec<u64>,
    all: u64,
    exact_memo: HashMap<u64, usize>,
    lb_memo: HashMap<u64, usize>,
    budget: u64,
    expansions: u64,
    exhausted: bool,
}

impl Search {
    /// Adjacency of the graph after eliminating `done` (fill edges included).
    /// Depends only on the set, not the elimination order.
    fn current_adj(&self, done: u64) -> Vec<u64> {
        let mut adj = self.base_adj.clone();
        let mut rest = done;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nbrs = adj[v] & !(1u64 << v);
            connect_clique(&mut adj, nbrs);
        }
        adj
    }

    fn solve(&mut self, done: u64, adj: &[u64], cutoff: usize) -> Eval {
        if let Some(&w) = self.exact_memo.get(&done) {
            return if w < cutoff { Eval::Exact(w) } else { Eval::Pruned };
        }
        if self.lb_memo.get(&done).map(|&lb| lb >= cutoff).unwrap_or(false) {
            return Eval::Pruned;
        }
        let remaining = self.all & !done;
        if remaining == 0 {
            self.exact_memo.insert(done, 0);
            return if cutoff > 0 { Eval::Exact(0) } else { Eval::Pruned };
        }
        if self.exhausted {
            return Eval::Pruned;
        }
        self.expansions += 1;
        if self.expansions > self.budget {
            self.exhausted = true;
            return Eval::Pruned;
        }
        let clique_lb = greedy_clique(adj, remaining).saturating_sub(1);
        if clique_lb >= cutoff {
            let e = self.lb_memo.entry(done).or_insert(0);
            *e = (*e).max(cutoff);
            return Eval::Pruned;
        }

        // A simplicial vertex can always go first.
        let mut rest = remaining;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nbrs = adj[v] & remaining & !(1u64 << v);
            if is_clique(adj, nbrs) {
                let d = nbrs.count_ones() as usize;
                if d >= cutoff {
                    let e = self.lb_memo.entry(done).or_insert(0);
                    *e = (*e).max(cutoff);
                    return Eval::Pruned;
                }
                let child = self.eliminate_and_solve(done, adj, v, cutoff);
                return match child {
                    Eval::Exact(w) => {
                        let val = w.max(d);
                        self.exact_memo.insert(done, val);
                        Eval::Exact(val)
                    }
                    Eval::Pruned => {
                        if !self.exhausted {
                            let e = self.lb_memo.entry(done).or_insert(0);
                            *e = (*e).max(cutoff);
                        }
                        Eval::Pruned
                    }
                };
            }
        }

        let mut candidates: Vec<(usize, usize)> = Vec::new();
        let mut rest = remaining;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (adj[v] & remaining & !(1u64 << v)).count_ones() as usize;
            candidates.push((d, v));
        }
        candidates.sort_unstable();

        let mut best = usize::MAX;
        let mut complete = true;
        for (d, v) in candidates {
            let bound = cutoff.min(best);
            if d >= bound {
                continue;
            }
            match self.eliminate_and_solve(done, adj, v, bound) {
                Eval::Exact(w) => best = best.min(w.max(d)),
                Eval::Pruned => {
                    if self.exhausted {
                        complete = false;
                    }
                }
            }
        }
        if best < cutoff {
            self.exact_memo.insert(done, best);
            Eval::Exact(best)
        } else {
            if complete && !self.exhausted {
                let e = self.lb_memo.entry(done).or_insert(0);
                *e = (*e).max(cutoff);
            }
            Eval::Pruned
        }
    }

    fn eliminate_and_solve(&mut self, done: u64, adj: &[u64], v: usize, cutoff: usize) -> Eval {
        let mut next_adj = adj.to_vec();
        let nbrs = adj[v] & self.all & !done & !(1u64 << v);
        connect_clique(&mut next_adj, nbrs);
        self.solve(done | (1u64 << v), &next_adj, cutoff)
    }

    /// Rebuilds an optimal order by walking the exact memo.
    fn reconstruct(&self, labels: &[Label]) -> Option<Vec<Label>> {
        let mut done = 0u64;
        let mut order = Vec::with_capacity(labels.len());
        let mut target = *self.exact_memo.get(&0)?;
        while done != self.all {
            let adj = self.current_adj(done);
            let remaining = self.all & !done;
            let mut found = false;
            let mut rest = remaining;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let d = (adj[v] & remaining & !(1u64 << v)).count_ones() as usize;
                if d > target {
                    continue;
                }
                if let Some(&w) = self.exact_memo.get(&(done | (1u64 << v))) {
                    if w.max(d) <= target {
                        order.push(labels[v].clone());
                        done |= 1u64 << v;
                        target = w; // the child's value is what remains to certify
                        found = true;
                        break;
                    }
                }
            }
            if !found {
                return None;
            }
        }
        Some(order)
    }
}

pub fn treewidth_exact(g: &LabeledGraph) -> Result<TreewidthResult, GraphError> {
    treewidth_exact_with_budget(g, DEFAULT_TREEWIDTH_BUDGET)
}

/// Exact treewidth by branch-and-bound over elimination orders.
///
/// On budget exhaustion the min-fill upper bound is returned with
/// `exact = false`.
pub fn treewidth_exact_with_budget(
    g: &LabeledGraph,
    budget: u64,
) -> Result<TreewidthResult, GraphError> {
    if g.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    if g.vertex_count() > 63 {
        return Err(GraphError::TooLarge(g.vertex_count()));
    }
    let upper = treewidth_upper(g)?;
    let (labels, adj_sets) = g.adjacency_indexed();
    let n = labels.len();
    let base_adj = sets_to_masks(&adj_sets);
    let all = (1u64 << n) - 1;

    let mut search = Search {
        base_adj: base_adj.clone(),
        all,
        exact_memo: HashMap::new(),
        lb_memo: HashMap::new(),
        budget,
        expansions: 0,
        exhausted: false,
    };

    // The min-fill width is achievable, so values >= it need no exploration.
    let adj0 = base_adj;
    match search.solve(0, &adj0, upper.width) {
        Eval::Exact(w) => {
            let order = search
                .reconstruct(&labels)
                .expect("exact memo must reconstruct an order");
            debug_assert_eq!(elimination_width(g, &order), Some(w));
            Ok(TreewidthResult {
                width: w,
                elimination_order: order,
                exact: true,
            })
        }
        Eval::Pruned => {
            if search.exhausted {
                Ok(TreewidthResult {
                    width: upper.width,
                    elimination_order: upper.elimination_order,
                    exact: false,
                })
            } else {
                // Fully searched: nothing beats the min-fill order.
                Ok(TreewidthResult {
                    width: upper.width,
                    elimination_order: upper.elimination_order,
                    exact: true,
                })
            }
        }
    }
}

fn is_clique(adj: &[u64], members: u64) -> bool {
    let mut rest = members;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if members & !adj[v] & !(1u64 << v) != 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::minor::numbered_grid3;
    use super::super::{grid_graph, LabeledGraph};
    use super::*;

    fn path(n: usize) -> LabeledGraph {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let edges: Vec<(&str, &str)> = (1..n)
            .map(|i| (names[i - 1].as_str(), names[i].as_str()))
            .collect();
        LabeledGraph::from_edges(edges).unwrap()
    }

    fn complete(n: usize) -> LabeledGraph {
        let names: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((names[i].as_str(), names[j].as_str()));
            }
        }
        LabeledGraph::from_edges(edges).unwrap()
    }

    #[test]
    fn trees_have_width_one() {
        let star = LabeledGraph::from_edges([("c", "a"), ("c", "b"), ("c", "d")]).unwrap();
        for g in [path(10), star] {
            let r = treewidth_exact(&g).unwrap();
            assert_eq!(r.width, 1);
            assert!(r.exact);
            assert_eq!(elimination_width(&g, &r.elimination_order), Some(1));
        }
    }

    #[test]
    fn reference_grid_has_width_three() {
        let r = treewidth_exact(&numbered_grid3()).unwrap();
        assert_eq!(r.width, 3);
        assert!(r.exact);
    }

    #[test]
    fn small_grids() {
        assert_eq!(treewidth_exact(&grid_graph(1)).unwrap().width, 0);
        assert_eq!(treewidth_exact(&grid_graph(2)).unwrap().width, 2);
        assert_eq!(treewidth_exact(&grid_graph(3)).unwrap().width, 3);
        assert_eq!(treewidth_exact(&grid_graph(4)).unwrap().width, 4);
    }

    #[test]
    fn complete_graph_upper_bound() {
        let r = treewidth_upper(&complete(5)).unwrap();
        assert_eq!(r.width, 4);
        assert_eq!(elimination_width(&complete(5), &r.elimination_order), Some(4));
    }

    #[test]
    fn path_upper_bound_is_tight() {
        let r = treewidth_upper(&path(10)).unwrap();
        assert_eq!(r.width, 1);
    }

    #[test]
    fn four_by_four_upper_vs_exact() {
        let g = grid_graph(4);
        let upper = treewidth_upper(&g).unwrap();
        let exact = treewidth_exact(&g).unwrap();
        assert!(exact.exact);
        assert_eq!(exact.width, 4);
        assert!((4..=6).contains(&upper.width));
        assert!(upper.width >= exact.width);
    }

    #[test]
    fn budget_exhaustion_returns_upper_bound() {
        let g = grid_graph(4);
        let r = treewidth_exact_with_budget(&g, 3).unwrap();
        assert!(!r.exact);
        assert!(r.width >= 4);
        assert_eq!(
            elimination_width(&g, &r.elimination_order),
            Some(r.width)
        );
    }

    #[test]
    fn empty_graph_is_rejected() {
        assert!(matches!(
            treewidth_exact(&LabeledGraph::empty()),
            Err(GraphError::EmptyGraph)
        ));
    }

    #[test]
    fn order_certifies_width() {
        let g = numbered_grid3();
        let r = treewidth_exact(&g).unwrap();
        assert_eq!(elimination_width(&g, &r.elimination_order), Some(r.width));
    }
}
