//! Junction-tree inference for the partition function.
//!
//! Triangulation comes from the min-fill order (lowest label on ties), the
//! clique tree is a maximum-weight spanning tree on sepset sizes, and the
//! running-intersection property is verified before any message passes.
//! One collect pass toward the root yields Z.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::graph::{treewidth_upper, Label};
use crate::num::ExactNumber;

use super::{Model, ModelError};

/// Default ceiling on the total number of clique-table entries (2^24).
pub const DEFAULT_TABLE_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericMode {
    /// Exact rationals; the result equals brute-force enumeration.
    Exact,
    /// Double precision; benchmark path.
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceMethod {
    Brute,
    JunctionTree,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZValue {
    Exact(ExactNumber),
    Float(f64),
}

impl ZValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ZValue::Exact(z) => z.to_f64(),
            ZValue::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactNumber> {
        match self {
            ZValue::Exact(z) => Some(z),
            ZValue::Float(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferenceReport {
    pub z: ZValue,
    pub method: InferenceMethod,
    pub peak_clique_size: usize,
    pub elapsed: Duration,
}

pub fn partition_junction_tree(
    m: &Model,
    mode: NumericMode,
) -> Result<InferenceReport, ModelError> {
    partition_junction_tree_with_budget(m, mode, DEFAULT_TABLE_BUDGET)
}

pub fn partition_junction_tree_with_budget(
    m: &Model,
    mode: NumericMode,
    table_budget: u128,
) -> Result<InferenceReport, ModelError> {
    let start = Instant::now();
    if m.graph().is_empty() {
        let z = match mode {
            NumericMode::Exact => ZValue::Exact(ExactNumber::one()),
            NumericMode::Float => ZValue::Float(1.0),
        };
        return Ok(InferenceReport {
            z,
            method: InferenceMethod::JunctionTree,
            peak_clique_size: 0,
            elapsed: start.elapsed(),
        });
    }

    let tree = JunctionTree::build(m, table_budget)?;
    let z = match mode {
        NumericMode::Exact => {
            let values = ExactOps;
            ZValue::Exact(tree.collect_partition(m, &values))
        }
        NumericMode::Float => {
            let values = FloatOps;
            ZValue::Float(tree.collect_partition(m, &values))
        }
    };
    Ok(InferenceReport {
        z,
        method: InferenceMethod::JunctionTree,
        peak_clique_size: tree.peak_clique_size,
        elapsed: start.elapsed(),
    })
}

/// Semiring hooks shared by the exact and float paths.
trait ValueOps {
    type V: Clone;
    fn one(&self) -> Self::V;
    fn zero(&self) -> Self::V;
    fn from_exact(&self, x: &ExactNumber) -> Self::V;
    fn mul_assign(&self, a: &mut Self::V, b: &Self::V);
    fn add_assign(&self, a: &mut Self::V, b: &Self::V);
}

struct ExactOps;

impl ValueOps for ExactOps {
    type V = ExactNumber;
    fn one(&self) -> ExactNumber {
        ExactNumber::one()
    }
    fn zero(&self) -> ExactNumber {
        ExactNumber::zero()
    }
    fn from_exact(&self, x: &ExactNumber) -> ExactNumber {
        x.clone()
    }
    fn mul_assign(&self, a: &mut ExactNumber, b: &ExactNumber) {
        *a *= b;
    }
    fn add_assign(&self, a: &mut ExactNumber, b: &ExactNumber) {
        *a += b;
    }
}

struct FloatOps;

impl ValueOps for FloatOps {
    type V = f64;
    fn one(&self) -> f64 {
        1.0
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn from_exact(&self, x: &ExactNumber) -> f64 {
        x.to_f64()
    }
    fn mul_assign(&self, a: &mut f64, b: &f64) {
        *a *= b;
    }
    fn add_assign(&self, a: &mut f64, b: &f64) {
        *a += b;
    }
}

struct JunctionTree {
    /// Vertex labels in canonical order; clique members index into this.
    labels: Vec<Label>,
    q: usize,
    /// Sorted member indices per clique.
    cliques: Vec<Vec<usize>>,
    /// `parent[i]` with the sepset to the parent; root has `None`.
    parent: Vec<Option<(usize, Vec<usize>)>>,
    /// Children before parents.
    traversal: Vec<usize>,
    /// Factor assignments: vertex index -> clique, edge -> clique.
    vertex_home: Vec<usize>,
    edge_home: Vec<(usize, usize, usize)>, // (u index, v index, clique)
    peak_clique_size: usize,
}

impl JunctionTree {
    fn build(m: &Model, table_budget: u128) -> Result<Self, ModelError> {
        let g = m.graph();
        let q = m.q();
        let order = treewidth_upper(g)?.elimination_order;
        let (labels, adj_sets) = g.adjacency_indexed();
        let index_of = |l: &str| labels.binary_search_by(|x| x.as_str().cmp(l)).unwrap();

        // Elimination cliques along the min-fill order.
        let mut adj: Vec<BTreeSet<usize>> = adj_sets;
        let mut eliminated = vec![false; labels.len()];
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for label in &order {
            let v = index_of(label);
            let mut clique: Vec<usize> = adj[v]
                .iter()
                .copied()
                .filter(|&w| !eliminated[w])
                .collect();
            clique.push(v);
            clique.sort_unstable();
            let members: Vec<usize> = clique.clone();
            for &a in &members {
                for &b in &members {
                    if a != b && a != v && b != v {
                        adj[a].insert(b);
                    }
                }
            }
            eliminated[v] = true;
            cliques.push(clique);
        }
        // Keep maximal cliques only, preserving creation order.
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for c in cliques {
            let dominated = maximal
                .iter()
                .any(|other| c.iter().all(|v| other.binary_search(v).is_ok()));
            if !dominated {
                maximal.retain(|other| !other.iter().all(|v| c.binary_search(v).is_ok()));
                maximal.push(c);
            }
        }
        let cliques = maximal;
        let peak = cliques.iter().map(|c| c.len()).max().unwrap_or(0);

        let mut needed: u128 = 0;
        for c in &cliques {
            let size = (q as u128)
                .checked_pow(c.len() as u32)
                .unwrap_or(u128::MAX);
            needed = needed.saturating_add(size);
        }
        if needed > table_budget {
            return Err(ModelError::MemoryBudgetExceeded {
                needed,
                budget: table_budget,
            });
        }

        // Maximum-weight spanning tree over candidate links (Kruskal on
        // sepset size, descending; ties by index for determinism).
        let k = cliques.len();
        let mut links: Vec<(usize, usize, usize)> = Vec::new(); // (weight, i, j)
        for i in 0..k {
            for j in i + 1..k {
                let w = intersect_sorted(&cliques[i], &cliques[j]).len();
                links.push((w, i, j));
            }
        }
        links.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut dsu: Vec<usize> = (0..k).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let r = find(dsu, dsu[x]);
                dsu[x] = r;
            }
            dsu[x]
        }
        let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (_, i, j) in links {
            let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
            if ri != rj {
                dsu[ri] = rj;
                tree_adj[i].push(j);
                tree_adj[j].push(i);
            }
        }

        // Root at clique 0; children-first traversal.
        let mut parent: Vec<Option<(usize, Vec<usize>)>> = vec![None; k];
        let mut traversal = Vec::with_capacity(k);
        let mut visited = vec![false; k];
        if k > 0 {
            let mut stack = vec![0usize];
            let mut dfs_order = Vec::new();
            visited[0] = true;
            while let Some(c) = stack.pop() {
                dfs_order.push(c);
                for &nb in &tree_adj[c] {
                    if !visited[nb] {
                        visited[nb] = true;
                        parent[nb] = Some((c, intersect_sorted(&cliques[nb], &cliques[c])));
                        stack.push(nb);
                    }
                }
            }
            traversal = dfs_order.into_iter().rev().collect();
        }

        // Running-intersection check: the cliques holding any given vertex
        // must form a connected subtree.
        for v in 0..labels.len() {
            let holders: Vec<usize> = (0..k)
                .filter(|&c| cliques[c].binary_search(&v).is_ok())
                .collect();
            if holders.len() > 1 {
                let mut reached: BTreeSet<usize> = BTreeSet::new();
                let mut stack = vec![holders[0]];
                while let Some(c) = stack.pop() {
                    if !reached.insert(c) {
                        continue;
                    }
                    for &nb in &tree_adj[c] {
                        let sep = intersect_sorted(&cliques[c], &cliques[nb]);
                        if sep.binary_search(&v).is_ok() && !reached.contains(&nb) {
                            stack.push(nb);
                        }
                    }
                }
                assert!(
                    holders.iter().all(|c| reached.contains(c)),
                    "running intersection property violated for vertex {}",
                    labels[v]
                );
            }
        }

        // Assign each factor to the first clique covering its scope.
        let mut vertex_home = vec![usize::MAX; labels.len()];
        for v in 0..labels.len() {
            vertex_home[v] = (0..k)
                .find(|&c| cliques[c].binary_search(&v).is_ok())
                .expect("every vertex appears in an elimination clique");
        }
        let mut edge_home = Vec::new();
        for e in g.edges() {
            let u = index_of(e.lo());
            let v = index_of(e.hi());
            let c = (0..k)
                .find(|&c| {
                    cliques[c].binary_search(&u).is_ok() && cliques[c].binary_search(&v).is_ok()
                })
                .expect("every edge is covered by an elimination clique");
            edge_home.push((u, v, c));
        }

        Ok(JunctionTree {
            labels,
            q,
            cliques,
            parent,
            traversal,
            vertex_home,
            edge_home,
            peak_clique_size: peak,
        })
    }

    fn collect_partition<O: ValueOps>(&self, m: &Model, ops: &O) -> O::V {
        let q = self.q;
        // Initialize clique tables with assigned factors.
        let mut tables: Vec<Vec<O::V>> = self
            .cliques
            .iter()
            .map(|c| vec![ops.one(); q.pow(c.len() as u32)])
            .collect();

        for (v, &home) in self.vertex_home.iter().enumerate() {
            let pot = m.vertex_potential(&self.labels[v]);
            let pos = self.cliques[home].binary_search(&v).unwrap();
            multiply_unary(&mut tables[home], self.cliques[home].len(), q, pos, pot, ops);
        }
        for &(u, v, home) in &self.edge_home {
            let clique = &self.cliques[home];
            let pu = clique.binary_search(&u).unwrap();
            let pv = clique.binary_search(&v).unwrap();
            let table: Vec<ExactNumber> = {
                let (lu, lv) = (&self.labels[u], &self.labels[v]);
                (0..q * q)
                    .map(|i| m.edge_value(lu, lv, i / q, i % q).clone())
                    .collect()
            };
            multiply_binary(&mut tables[home], clique.len(), q, pu, pv, &table, ops);
        }

        // Collect messages toward the root; sum each root table at the end.
        let mut result = ops.one();
        for &c in &self.traversal {
            match &self.parent[c] {
                Some((p, sepset)) => {
                    let message = marginalize(
                        &tables[c],
                        &self.cliques[c],
                        sepset,
                        q,
                        ops,
                    );
                    let positions: Vec<usize> = sepset
                        .iter()
                        .map(|v| self.cliques[*p].binary_search(v).unwrap())
                        .collect();
                    multiply_subset(&mut tables[*p], self.cliques[*p].len(), q, &positions, &message, ops);
                }
                None => {
                    // Root of its tree (forests multiply across roots).
                    let mut sum = ops.zero();
                    for entry in &tables[c] {
                        ops.add_assign(&mut sum, entry);
                    }
                    ops.mul_assign(&mut result, &sum);
                }
            }
        }
        result
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

fn multiply_unary<O: ValueOps>(
    table: &mut [O::V],
    arity: usize,
    q: usize,
    pos: usize,
    pot: &[ExactNumber],
    ops: &O,
) {
    let stride = q.pow((arity - 1 - pos) as u32);
    for (idx, entry) in table.iter_mut().enumerate() {
        let state = (idx / stride) % q;
        ops.mul_assign(entry, &ops.from_exact(&pot[state]));
    }
}

fn multiply_binary<O: ValueOps>(
    table: &mut [O::V],
    arity: usize,
    q: usize,
    pu: usize,
    pv: usize,
    pot: &[ExactNumber],
    ops: &O,
) {
    let su = q.pow((arity - 1 - pu) as u32);
    let sv = q.pow((arity - 1 - pv) as u32);
    for (idx, entry) in table.iter_mut().enumerate() {
        let a = (idx / su) % q;
        let b = (idx / sv) % q;
        ops.mul_assign(entry, &ops.from_exact(&pot[a * q + b]));
    }
}

fn multiply_subset<O: ValueOps>(
    table: &mut [O::V],
    arity: usize,
    q: usize,
    positions: &[usize],
    factor: &[O::V],
    ops: &O,
) {
    let strides: Vec<usize> = positions
        .iter()
        .map(|&p| q.pow((arity - 1 - p) as u32))
        .collect();
    for (idx, entry) in table.iter_mut().enumerate() {
        let mut fidx = 0usize;
        for s in &strides {
            fidx = fidx * q + (idx / s) % q;
        }
        ops.mul_assign(entry, &factor[fidx]);
    }
}

fn marginalize<O: ValueOps>(
    table: &[O::V],
    clique: &[usize],
    keep: &[usize],
    q: usize,
    ops: &O,
) -> Vec<O::V> {
    let arity = clique.len();
    let positions: Vec<usize> = keep
        .iter()
        .map(|v| clique.binary_search(v).unwrap())
        .collect();
    let strides: Vec<usize> = positions
        .iter()
        .map(|&p| q.pow((arity - 1 - p) as u32))
        .collect();
    let mut out = vec![ops.zero(); q.pow(keep.len() as u32)];
    for (idx, entry) in table.iter().enumerate() {
        let mut oidx = 0usize;
        for s in &strides {
            oidx = oidx * q + (idx / s) % q;
        }
        ops.add_assign(&mut out[oidx], entry);
    }
    out
}
