//! Left-right planarity test with combinatorial embedding extraction.
//!
//! The testing phase maintains a stack of conflict pairs of return-edge
//! intervals per DFS subtree; a graph is planar iff the constraints stay
//! one-sided. The embedding phase replays the recorded sides into a
//! clockwise rotation system per vertex.
//!
//! Every produced rotation system is verified against Euler's formula
//! (per connected component, `V - E + F = 2` with faces traced from the
//! rotation), so an embedding bug fails loudly instead of corrupting the
//! drawings built on top of it.

use std::collections::HashMap;

use crate::graph::{Label, LabeledGraph};

type DirEdge = (usize, usize);

/// A clockwise rotation system: `rotation[v]` lists the neighbors of `v` in
/// clockwise order.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub labels: Vec<Label>,
    pub rotation: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    fn position(&self, v: usize, w: usize) -> usize {
        self.rotation[v]
            .iter()
            .position(|&x| x == w)
            .expect("half-edge present in rotation")
    }

    /// Successor of the half-edge `(v, w)` along its face:
    /// `(w, x)` where `x` precedes `v` in the clockwise order at `w`.
    pub fn next_face_half_edge(&self, v: usize, w: usize) -> DirEdge {
        let pos = self.position(w, v);
        let len = self.rotation[w].len();
        (w, self.rotation[w][(pos + len - 1) % len])
    }

    /// All faces as cycles of directed half-edges.
    pub fn faces(&self) -> Vec<Vec<DirEdge>> {
        let mut seen: HashMap<DirEdge, bool> = HashMap::new();
        let mut faces = Vec::new();
        for v in 0..self.rotation.len() {
            for &w in &self.rotation[v] {
                if seen.contains_key(&(v, w)) {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (v, w);
                loop {
                    face.push((a, b));
                    seen.insert((a, b), true);
                    let (na, nb) = self.next_face_half_edge(a, b);
                    a = na;
                    b = nb;
                    if (a, b) == (v, w) {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }
}

/// Planarity check plus embedding; `None` when the graph is not planar.
pub fn planar_embedding(g: &LabeledGraph) -> Option<Embedding> {
    let (labels, adj_sets) = g.adjacency_indexed();
    let n = labels.len();
    let m = g.edge_count();
    if n > 2 && m > 3 * n - 6 {
        return None;
    }
    let adj: Vec<Vec<usize>> = adj_sets
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();

    let mut lr = Lr::new(adj);
    let rotation = lr.run()?;
    let embedding = Embedding { labels, rotation };
    verify_euler(g, &embedding);
    Some(embedding)
}

pub fn is_planar(g: &LabeledGraph) -> bool {
    planar_embedding(g).is_some()
}

fn verify_euler(g: &LabeledGraph, embedding: &Embedding) {
    let faces = embedding.faces();
    let mut face_component: Vec<usize> = Vec::new();
    // map vertices to components
    let comps = g.connected_components();
    let mut comp_of: HashMap<&str, usize> = HashMap::new();
    for (i, comp) in comps.iter().enumerate() {
        for v in comp {
            comp_of.insert(v.as_str(), i);
        }
    }
    for face in &faces {
        let v = face[0].0;
        face_component.push(comp_of[embedding.labels[v].as_str()]);
    }
    for (i, comp) in comps.iter().enumerate() {
        let vc = comp.len();
        let ec = g
            .edges()
            .filter(|e| comp.contains(e.lo()))
            .count();
        if ec == 0 {
            continue;
        }
        let fc = face_component.iter().filter(|&&c| c == i).count();
        assert!(
            vc + fc == ec + 2,
            "embedding violates Euler's formula on a component: V={vc} E={ec} F={fc}"
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Interval {
    low: Option<DirEdge>,
    high: Option<DirEdge>,
}

impl Interval {
    fn new(low: Option<DirEdge>, high: Option<DirEdge>) -> Self {
        Interval { low, high }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct Lr {
    adj: Vec<Vec<usize>>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<DirEdge>>,
    roots: Vec<usize>,
    dg_out: Vec<Vec<usize>>,
    oriented: HashMap<DirEdge, bool>,
    lowpt: HashMap<DirEdge, usize>,
    lowpt2: HashMap<DirEdge, usize>,
    nesting_depth: HashMap<DirEdge, i64>,
    ordered_adjs: Vec<Vec<usize>>,
    stack: Vec<ConflictPair>,
    stack_bottom: HashMap<DirEdge, usize>,
    lowpt_edge: HashMap<DirEdge, DirEdge>,
    refs: HashMap<DirEdge, Option<DirEdge>>,
    side: HashMap<DirEdge, i8>,
}

impl Lr {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        Lr {
            adj,
            height: vec![None; n],
            parent_edge: vec![None; n],
            roots: Vec::new(),
            dg_out: vec![Vec::new(); n],
            oriented: HashMap::new(),
            lowpt: HashMap::new(),
            lowpt2: HashMap::new(),
            nesting_depth: HashMap::new(),
            ordered_adjs: vec![Vec::new(); n],
            stack: Vec::new(),
            stack_bottom: HashMap::new(),
            lowpt_edge: HashMap::new(),
            refs: HashMap::new(),
            side: HashMap::new(),
        }
    }

    fn run(&mut self) -> Option<Vec<Vec<usize>>> {
        let n = self.adj.len();
        for v in 0..n {
            if self.height[v].is_none() {
                self.height[v] = Some(0);
                self.roots.push(v);
                self.dfs_orientation(v);
            }
        }
        for v in 0..n {
            let mut out = self.dg_out[v].clone();
            out.sort_by_key(|&w| self.nesting_depth[&(v, w)]);
            self.ordered_adjs[v] = out;
        }
        for r in self.roots.clone() {
            if !self.dfs_testing(r) {
                return None;
            }
        }

        let edges: Vec<DirEdge> = self.oriented.keys().copied().collect();
        for e in edges {
            let s = self.sign(e) as i64;
            if let Some(d) = self.nesting_depth.get_mut(&e) {
                *d *= s;
            }
        }
        let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let mut out = self.dg_out[v].clone();
            out.sort_by_key(|&w| self.nesting_depth[&(v, w)]);
            self.ordered_adjs[v] = out.clone();
            rotation[v] = out; // clockwise, outgoing edges in nesting order
        }
        let mut left_ref = vec![usize::MAX; n];
        let mut right_ref = vec![usize::MAX; n];
        for r in self.roots.clone() {
            self.dfs_embedding(r, &mut rotation, &mut left_ref, &mut right_ref);
        }
        Some(rotation)
    }

    fn dfs_orientation(&mut self, v: usize) {
        let e = self.parent_edge[v];
        let hv = self.height[v].expect("set before descent");
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            if self.oriented.contains_key(&(v, w)) || self.oriented.contains_key(&(w, v)) {
                continue;
            }
            let vw = (v, w);
            self.oriented.insert(vw, true);
            self.dg_out[v].push(w);
            self.lowpt.insert(vw, hv);
            self.lowpt2.insert(vw, hv);
            if self.height[w].is_none() {
                // tree edge
                self.parent_edge[w] = Some(vw);
                self.height[w] = Some(hv + 1);
                self.dfs_orientation(w);
            } else {
                // back edge
                self.lowpt.insert(vw, self.height[w].unwrap());
            }
            // nesting depth: chordal edges nest deeper
            let mut depth = 2 * self.lowpt[&vw] as i64;
            if self.lowpt2[&vw] < hv {
                depth += 1;
            }
            self.nesting_depth.insert(vw, depth);
            if let Some(pe) = e {
                let (lv, l2v) = (self.lowpt[&vw], self.lowpt2[&vw]);
                let (le, l2e) = (self.lowpt[&pe], self.lowpt2[&pe]);
                if lv < le {
                    self.lowpt2.insert(pe, le.min(l2v));
                    self.lowpt.insert(pe, lv);
                } else if lv > le {
                    self.lowpt2.insert(pe, l2e.min(lv));
                } else {
                    self.lowpt2.insert(pe, l2e.min(l2v));
                }
            }
        }
    }

    fn dfs_testing(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let hv = self.height[v].expect("oriented");
        let ordered = self.ordered_adjs[v].clone();
        for (idx, &w) in ordered.iter().enumerate() {
            let ei = (v, w);
            self.stack_bottom.insert(ei, self.stack.len());
            if Some(ei) == self.parent_edge[w] {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge.insert(ei, ei);
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval::new(Some(ei), Some(ei)),
                });
            }
            if self.lowpt[&ei] < hv {
                // ei has a return edge below v
                if idx == 0 {
                    let le = self.lowpt_edge[&ei];
                    self.lowpt_edge.insert(e.expect("non-root has parent"), le);
                } else if !self.add_constraints(ei, e.expect("non-root has parent")) {
                    return false;
                }
            }
        }
        if let Some(pe) = e {
            self.remove_back_edges(pe);
        }
        true
    }

    fn conflicting(&self, i: &Interval, b: DirEdge) -> bool {
        match i.high {
            Some(h) => self.lowpt[&h] > self.lowpt[&b],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.left.low, p.right.low) {
            (None, Some(r)) => self.lowpt[&r],
            (Some(l), None) => self.lowpt[&l],
            (Some(l), Some(r)) => self.lowpt[&l].min(self.lowpt[&r]),
            (None, None) => unreachable!("conflict pairs are never fully empty on the stack"),
        }
    }

    fn add_constraints(&mut self, ei: DirEdge, e: DirEdge) -> bool {
        let mut p = ConflictPair::default();
        let bottom = self.stack_bottom[&ei];
        // merge return edges of ei into p.right
        loop {
            let mut q = self.stack.pop().expect("own return edges on the stack");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false; // not planar
            }
            let q_low = q.right.low.expect("nonempty interval");
            if self.lowpt[&q_low] > self.lowpt[&e] {
                if p.right.is_empty() {
                    p.right.high = q.right.high;
                } else {
                    self.refs
                        .insert(p.right.low.expect("set below"), q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                // align to the parent's lowpoint edge
                self.refs.insert(q_low, Some(self.lowpt_edge[&e]));
            }
            if self.stack.len() == bottom {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while {
            let top = self.stack.last().expect("stack bottom is a sentinel");
            self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)
        } {
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false; // not planar
            }
            self.refs
                .insert(p.right.low.expect("merged above"), q.right.high);
            if let Some(qr_low) = q.right.low {
                p.right.low = Some(qr_low);
            }
            if p.left.is_empty() {
                p.left.high = q.left.high;
            } else {
                self.refs
                    .insert(p.left.low.expect("set below"), q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: DirEdge) {
        let u = e.0;
        let hu = self.height[u].expect("oriented");
        // drop entire conflict pairs returning to the parent
        while let Some(top) = self.stack.last() {
            if self.lowest(top) == hu {
                let p = self.stack.pop().unwrap();
                if let Some(pl_low) = p.left.low {
                    self.side.insert(pl_low, -1);
                }
            } else {
                break;
            }
        }
        // trim one more conflict pair
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if h.1 == u {
                    p.left.high = self.refs.get(&h).copied().flatten();
                } else {
                    break;
                }
            }
            if p.left.high.is_none() {
                if let Some(pl_low) = p.left.low {
                    self.refs.insert(pl_low, p.right.low);
                    self.side.insert(pl_low, -1);
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if h.1 == u {
                    p.right.high = self.refs.get(&h).copied().flatten();
                } else {
                    break;
                }
            }
            if p.right.high.is_none() {
                if let Some(pr_low) = p.right.low {
                    self.refs.insert(pr_low, p.left.low);
                    self.side.insert(pr_low, -1);
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        // the parent edge takes the side of its highest return edge
        if self.lowpt[&e] < hu {
            let top = self.stack.last().expect("return edge implies stack entry");
            let hl = top.left.high;
            let hr = top.right.high;
            let pick = match (hl, hr) {
                (Some(l), Some(r)) => {
                    if self.lowpt[&l] > self.lowpt[&r] {
                        Some(l)
                    } else {
                        Some(r)
                    }
                }
                (Some(l), None) => Some(l),
                (None, r) => r,
            };
            self.refs.insert(e, pick);
        }
    }

    fn sign(&mut self, e: DirEdge) -> i8 {
        // iterative to avoid deep ref chains
        let mut chain = vec![e];
        while let Some(Some(r)) = self.refs.get(chain.last().unwrap()).copied() {
            chain.push(r);
        }
        let mut s = *self.side.get(chain.last().unwrap()).unwrap_or(&1);
        for &edge in chain.iter().rev().skip(1) {
            let own = *self.side.get(&edge).unwrap_or(&1);
            s *= own;
            self.side.insert(edge, s);
            self.refs.insert(edge, None);
        }
        // ensure base edge's side is recorded
        let base = chain[0];
        let final_side = *self.side.get(&base).unwrap_or(&1);
        final_side
    }

    fn dfs_embedding(
        &mut self,
        v: usize,
        rotation: &mut Vec<Vec<usize>>,
        left_ref: &mut Vec<usize>,
        right_ref: &mut Vec<usize>,
    ) {
        for w in self.ordered_adjs[v].clone() {
            let ei = (v, w);
            if Some(ei) == self.parent_edge[w] {
                // tree edge: parent half-edge becomes first at the child
                rotation[w].insert(0, v);
                left_ref[v] = w;
                right_ref[v] = w;
                self.dfs_embedding(w, rotation, left_ref, right_ref);
            } else {
                // back edge
                let side = *self.side.get(&ei).unwrap_or(&1);
                if side == 1 {
                    let pos = rotation[w]
                        .iter()
                        .position(|&x| x == right_ref[w])
                        .expect("right reference present");
                    rotation[w].insert(pos + 1, v);
                } else {
                    let pos = rotation[w]
                        .iter()
                        .position(|&x| x == left_ref[w])
                        .expect("left reference present");
                    rotation[w].insert(pos, v);
                    left_ref[w] = v;
                }
            }
        }
    }
}
