//! Synchronous neighborhood gathering with message accounting.
//!
//! In round 1 every participating node broadcasts its own adjacency list.
//! In each later round it forwards the lists it learned in the previous
//! round. After `k` rounds a node holds the lists of everything within `k`
//! hops, which is exactly what its k-hop view needs.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, LocalView, NodeId};

/// Messages sent by each node in one phase. One broadcast counts as one
/// message; payloads are measured in node ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseLedger {
    pub phase: String,
    pub messages: Vec<u32>,
    pub max_payload: Vec<usize>,
}

impl PhaseLedger {
    pub fn new(phase: impl Into<String>, n: usize) -> Self {
        Self { phase: phase.into(), messages: vec![0; n], max_payload: vec![0; n] }
    }

    pub fn record(&mut self, node: NodeId, payload: usize) {
        self.messages[node] += 1;
        self.max_payload[node] = self.max_payload[node].max(payload);
    }

    pub fn max_messages(&self) -> u32 {
        self.messages.iter().copied().max().unwrap_or(0)
    }

    pub fn max_payload(&self) -> usize {
        self.max_payload.iter().copied().max().unwrap_or(0)
    }

    /// Fails on the first node that sent more than `limit` messages.
    pub fn check_bound(&self, limit: u32) -> Result<()> {
        match self.messages.iter().position(|&m| m > limit) {
            Some(node) => Err(Error::MessageBound {
                phase: self.phase.clone(),
                node,
                sent: self.messages[node],
                limit,
            }),
            None => Ok(()),
        }
    }
}

/// All phases of one run, in execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MessageLedger {
    pub phases: Vec<PhaseLedger>,
}

impl MessageLedger {
    pub fn push(&mut self, phase: PhaseLedger) {
        self.phases.push(phase);
    }

    pub fn phase(&self, name: &str) -> Option<&PhaseLedger> {
        self.phases.iter().find(|p| p.phase == name)
    }
}

/// Runs `k` gathering rounds among `participants` (all nodes if `None`)
/// over the links of `g`. Returns a view per participant.
pub fn run_gather_phase_among(
    g: &ConnectivityGraph,
    k: u32,
    participants: Option<&[bool]>,
    phase: &str,
) -> (Vec<Option<LocalView>>, PhaseLedger) {
    let n = g.n();
    let active = |u: NodeId| participants.map_or(true, |p| p[u]);
    let mut ledger = PhaseLedger::new(phase, n);
    let mut known: Vec<BTreeSet<NodeId>> = (0..n).map(|u| if active(u) { BTreeSet::from([u]) } else { BTreeSet::new() }).collect();
    // lists each node learned in the previous round and will forward next
    let mut fresh: Vec<Vec<NodeId>> = (0..n).map(|u| if active(u) { vec![u] } else { Vec::new() }).collect();
    for _ in 0..k {
        for u in 0..n {
            if active(u) && !fresh[u].is_empty() {
                let payload = fresh[u].iter().map(|&x| 1 + g.degree(x)).sum();
                ledger.record(u, payload);
            }
        }
        let incoming: Vec<Vec<NodeId>> = (0..n)
            .into_par_iter()
            .map(|v| {
                if !active(v) {
                    return Vec::new();
                }
                let mut got = Vec::new();
                for &u in g.neighbors(v) {
                    if active(u) {
                        got.extend(fresh[u].iter().copied().filter(|x| !known[v].contains(x)));
                    }
                }
                got.sort_unstable();
                got.dedup();
                got
            })
            .collect();
        for (v, got) in incoming.into_iter().enumerate() {
            known[v].extend(got.iter().copied());
            fresh[v] = got;
        }
    }
    let views = (0..n)
        .into_par_iter()
        .map(|u| active(u).then(|| view_from_lists(g, u, k, &known[u], &active)))
        .collect();
    (views, ledger)
}

/// Rebuilds the k-hop view of `u` from the adjacency lists it received.
fn view_from_lists(
    g: &ConnectivityGraph,
    u: NodeId,
    k: u32,
    lists: &BTreeSet<NodeId>,
    active: &impl Fn(NodeId) -> bool,
) -> LocalView {
    let mut depth = std::collections::HashMap::from([(u, 0u32)]);
    let mut frontier = vec![u];
    for d in 1..=k {
        let mut next = Vec::new();
        for &x in &frontier {
            // every node closer than k hops has delivered its list
            debug_assert!(lists.contains(&x));
            for &y in g.neighbors(x) {
                if active(y) && !depth.contains_key(&y) {
                    depth.insert(y, d);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let nodes: Vec<NodeId> = depth.into_keys().collect();
    let mut view = g.induced(&nodes);
    view.center = view.local_of(u).expect("center present");
    view
}

/// `k` gathering rounds among all nodes.
pub fn run_gather_phase(g: &ConnectivityGraph, k: u32) -> (Vec<LocalView>, PhaseLedger) {
    let (views, ledger) = run_gather_phase_among(g, k, None, &format!("gather-{k}"));
    (views.into_iter().map(|v| v.expect("all participate")).collect(), ledger)
}
