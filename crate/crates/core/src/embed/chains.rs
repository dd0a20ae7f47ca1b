//! Turning a chain embedding into a replayable minor sequence.
//!
//! Emission order: delete every unclaimed host vertex, delete surplus
//! inter-chain edges (one host edge survives per target edge), then contract
//! each chain along a spanning order. The final contraction of a chain names
//! the target vertex, which is the only way a minor operation can introduce
//! a label; a mismatched singleton chain therefore first absorbs one spare
//! host neighbor so it has an edge left to contract.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{validate_minor_sequence, Label, LabeledGraph, MinorOp, MinorSequence};

use super::{ChainEmbedding, EmbedError};

pub fn chains_to_minor_sequence(e: &ChainEmbedding) -> Result<MinorSequence, EmbedError> {
    e.validate()?;
    let host = &e.host;
    let target = &e.target;
    let target_labels: BTreeSet<Label> = target.vertices().cloned().collect();

    // Every mismatched singleton chain needs a second cell: the rename only
    // happens through a contraction, which needs an incident edge inside
    // the chain. Preference order: absorb an unclaimed neighbor
    // (most-constrained chains pick first); failing that, steal a neighbor
    // cell from an adjacent chain that stays valid without it.
    let mut chains: BTreeMap<Label, BTreeSet<Label>> = e.chains.clone();
    let mut claimed: BTreeSet<Label> = chains.values().flatten().cloned().collect();
    let mut guard = 0usize;
    loop {
        let pending: Vec<Label> = chains
            .iter()
            .filter(|(t, chain)| chain.len() == 1 && !chain.contains(*t))
            .map(|(t, _)| t.clone())
            .collect();
        if pending.is_empty() {
            break;
        }
        guard += 1;
        if guard > 4 * chains.len() + 8 {
            return Err(EmbedError::InvalidChains(
                "rename planning did not converge".into(),
            ));
        }

        // most-constrained absorption first
        let mut pick: Option<(usize, Label, Label)> = None; // (options, target, spare)
        let mut blocked: Vec<Label> = Vec::new();
        for t in &pending {
            let h = chains[t].iter().next().expect("singleton chain");
            let spares: Vec<&Label> = host
                .neighbors(h)
                .filter(|nb| !claimed.contains(*nb))
                .collect();
            match spares.iter().min() {
                None => blocked.push(t.clone()),
                Some(s) => {
                    let candidate = (spares.len(), t.clone(), (*s).clone());
                    if pick.as_ref().map(|p| candidate.0 < p.0).unwrap_or(true) {
                        pick = Some(candidate);
                    }
                }
            }
        }
        if let Some((_, t, spare)) = pick {
            claimed.insert(spare.clone());
            chains.get_mut(&t).expect("known chain").insert(spare);
            continue;
        }

        // all pending chains are walled in: negotiate a steal for the first
        let t = blocked.first().expect("pending is nonempty").clone();
        let h = chains[&t].iter().next().expect("singleton chain").clone();
        let mut stolen = false;
        for nb in host.neighbors(&h) {
            let donor = match chains.iter().find(|(o, c)| **o != t && c.contains(nb)) {
                Some((o, _)) => o.clone(),
                None => continue,
            };
            if chains[&donor].len() < 2 {
                continue;
            }
            let mut attempt = chains.clone();
            attempt.get_mut(&donor).expect("donor exists").remove(nb);
            attempt.get_mut(&t).expect("known chain").insert(nb.clone());
            let candidate = ChainEmbedding {
                target: target.clone(),
                host: host.clone(),
                chains: attempt,
            };
            if candidate.validate().is_ok() {
                chains = candidate.chains;
                stolen = true;
                break;
            }
        }
        if !stolen {
            return Err(EmbedError::InvalidChains(format!(
                "singleton chain `{h}` for target `{t}` cannot be renamed: no \
                 unclaimed host neighbor to contract with and no adjacent \
                 chain can spare a cell"
            )));
        }
    }
    let owner: BTreeMap<&Label, &Label> = chains
        .iter()
        .flat_map(|(t, chain)| chain.iter().map(move |h| (h, t)))
        .collect();

    let mut ops: Vec<MinorOp> = Vec::new();
    for v in host.vertices() {
        if !claimed.contains(v) {
            ops.push(MinorOp::VertexDelete(v.clone()));
        }
    }

    // One host edge survives per target edge; the rest of the inter-chain
    // edges go.
    let mut kept: BTreeMap<(Label, Label), ()> = BTreeMap::new();
    for he in host.edges() {
        let (a, b) = match (owner.get(he.lo()), owner.get(he.hi())) {
            (Some(a), Some(b)) => (*a, *b),
            _ => continue, // endpoint deleted with its vertex
        };
        if a == b {
            continue; // intra-chain edges feed the contractions
        }
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if target.contains_edge(a, b) && !kept.contains_key(&key) {
            kept.insert(key, ());
        } else {
            ops.push(MinorOp::EdgeDelete(he.lo().clone(), he.hi().clone()));
        }
    }

    // Fresh intermediate labels never collide with anything that can exist.
    let mut fresh_counter = 0usize;
    let mut fresh = |taken: &BTreeSet<Label>| -> Label {
        loop {
            let candidate = format!("~{fresh_counter}");
            fresh_counter += 1;
            if !taken.contains(&candidate) && !target_labels.contains(&candidate) {
                return candidate;
            }
        }
    };
    let host_labels: BTreeSet<Label> = host.vertices().cloned().collect();

    // Phase 1: contract each chain down to two vertices under fresh labels.
    let mut alive: BTreeSet<Label> = claimed.clone();
    let mut pending: Vec<(Label, Label, Label)> = Vec::new(); // (core, last, target)
    for (t, chain) in &chains {
        let order = spanning_order(host, chain, &target_labels);
        if order.len() == 1 {
            continue; // matched singleton, already labeled correctly
        }
        let mut core = order[0].clone();
        for member in &order[1..order.len() - 1] {
            let label = fresh(&host_labels);
            ops.push(MinorOp::Contract(core.clone(), member.clone(), label.clone()));
            alive.remove(&core);
            alive.remove(member);
            alive.insert(label.clone());
            core = label;
        }
        pending.push((core, order[order.len() - 1].clone(), t.clone()));
    }

    // Phase 2: final contractions introduce the target labels. A chain can
    // finalize once no other surviving vertex holds its target label.
    while !pending.is_empty() {
        let mut progressed = false;
        let mut next_round = Vec::new();
        for (core, last, t) in pending {
            let blocked = alive.contains(&t) && t != core && t != last;
            if blocked {
                next_round.push((core, last, t));
            } else {
                ops.push(MinorOp::Contract(core.clone(), last.clone(), t.clone()));
                alive.remove(&core);
                alive.remove(&last);
                alive.insert(t);
                progressed = true;
            }
        }
        pending = next_round;
        if !progressed && !pending.is_empty() {
            return Err(EmbedError::InvalidChains(
                "unresolvable label conflict: every remaining chain's target label \
                 is still held by another chain"
                    .into(),
            ));
        }
    }

    let seq = MinorSequence::for_source(host, ops);
    if !validate_minor_sequence(host, &seq, target) {
        return Err(EmbedError::InvalidChains(
            "internal error: emitted sequence does not replay to the target".into(),
        ));
    }
    Ok(seq)
}

/// Spanning traversal of a chain: starts at the smallest member, always
/// extends from already-covered vertices, and buries members whose labels
/// collide with target labels as early as possible.
fn spanning_order(
    host: &LabeledGraph,
    chain: &BTreeSet<Label>,
    target_labels: &BTreeSet<Label>,
) -> Vec<Label> {
    let root = chain.iter().min().expect("nonempty chain").clone();
    let mut order = vec![root.clone()];
    let mut visited: BTreeSet<Label> = [root.clone()].into_iter().collect();
    let mut frontier: BTreeSet<Label> = host
        .neighbors(&root)
        .filter(|nb| chain.contains(*nb))
        .cloned()
        .collect();
    while !frontier.is_empty() {
        let pick = frontier
            .iter()
            .find(|l| target_labels.contains(*l))
            .cloned()
            .unwrap_or_else(|| frontier.iter().next().expect("nonempty").clone());
        frontier.remove(&pick);
        visited.insert(pick.clone());
        for nb in host.neighbors(&pick) {
            if chain.contains(nb) && !visited.contains(nb) {
                frontier.insert(nb.clone());
            }
        }
        order.push(pick);
    }
    assert_eq!(order.len(), chain.len(), "chain must be connected");
    order
}
