//! Boundary recognition by enclosing circles.
//!
//! A node looks at the nodes exactly two hops away. If they contain a tight
//! circle of length at least `circle_threshold`, the node is surrounded and
//! classifies itself as interior. The circle search is a breadth-first
//! search that keeps all-pairs distances among visited vertices and
//! measures each circle as it is closed by a non-tree edge.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{k_hop_subgraph, ConnectivityGraph, LocalView, NodeId};
use crate::network::CommModel;
use crate::{Classification, Verdict};

/// Representative-graph thresholds from the histogram-valley calibration
/// (`wsnb calibrate`: 30x30 perturbed grid, cross hole, d_avg 12, 12
/// layouts from seed 1000; the 0.75-QUDG run lands on the same value).
pub const MIS_THRESHOLD_UDG: u32 = 4;
pub const MIS_THRESHOLD_QUDG: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EcBrParams {
    pub circle_threshold: u32,
    /// Fraction of marked neighbors a Boundary node needs to survive
    /// refinement.
    pub gamma: f64,
    pub use_mis_reduction: bool,
    /// Circle threshold on the MIS representative graph.
    pub mis_threshold: u32,
}

impl Default for EcBrParams {
    fn default() -> Self {
        Self { circle_threshold: 6, gamma: 1.0, use_mis_reduction: false, mis_threshold: MIS_THRESHOLD_UDG }
    }
}

impl EcBrParams {
    /// Defaults for a communication model: γ = 0.7 and the QUDG MIS
    /// threshold under QUDG.
    pub fn for_model(model: &CommModel) -> Self {
        match model {
            CommModel::Udg => Self::default(),
            CommModel::Qudg { .. } => Self { gamma: 0.7, mis_threshold: MIS_THRESHOLD_QUDG, ..Self::default() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.circle_threshold < 3 {
            return Err(Error::InvalidConfig(format!("circle_threshold must be >= 3, got {}", self.circle_threshold)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if self.use_mis_reduction && self.mis_threshold < 3 {
            return Err(Error::InvalidConfig(format!("mis_threshold must be >= 3, got {}", self.mis_threshold)));
        }
        Ok(())
    }

    /// The threshold that applies to the graph actually searched.
    pub fn effective_threshold(&self) -> u32 {
        if self.use_mis_reduction {
            self.mis_threshold
        } else {
            self.circle_threshold
        }
    }
}

/// The subgraph induced by the nodes at hop distance exactly two from
/// `center`. `graph` uses local ids; `members[local]` is the global id.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSubgraph {
    pub members: Vec<NodeId>,
    pub graph: ConnectivityGraph,
    pub center: NodeId,
}

impl RingSubgraph {
    /// Ring over an arbitrary graph whose ids double as member ids; handy
    /// for tests and tooling.
    pub fn from_graph(graph: ConnectivityGraph) -> Self {
        Self { members: (0..graph.n()).collect(), graph, center: usize::MAX }
    }
}

/// Ring of a view's center. The view must contain the full 2-hop
/// neighborhood.
pub fn ring_from_view(view: &LocalView) -> RingSubgraph {
    let dist = view.center_distances();
    let locals: Vec<usize> = (0..dist.len()).filter(|&l| dist[l] == Some(2)).collect();
    let inner = view.graph.induced(&locals);
    RingSubgraph {
        members: locals.iter().map(|&l| view.ids[l]).collect(),
        graph: inner.graph,
        center: view.center_global(),
    }
}

pub fn ring_subgraph(g: &ConnectivityGraph, u: NodeId) -> RingSubgraph {
    ring_from_view(&k_hop_subgraph(g, u, 2))
}

fn components(g: &ConnectivityGraph) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &w in g.neighbors(v) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Longest circle closed during the modified BFS, per component; 0 if the
/// graph is a forest.
pub fn max_tight_circle_graph(g: &ConnectivityGraph) -> u32 {
    const INF: u32 = u32::MAX / 4;
    let n = g.n();
    let mut best = 0;
    let mut dist = vec![INF; n * n];
    let mut visited = vec![false; n];
    let mut processed = vec![false; n];
    for comp in components(g) {
        if comp.len() < 3 {
            continue;
        }
        let start = *comp.iter().max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v))).unwrap();
        let mut seen: Vec<usize> = vec![start];
        visited[start] = true;
        dist[start * n + start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            processed[v] = true;
            for &w in g.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    for &a in &seen {
                        let d = dist[v * n + a] + 1;
                        dist[w * n + a] = d;
                        dist[a * n + w] = d;
                    }
                    dist[w * n + w] = 0;
                    seen.push(w);
                    queue.push_back(w);
                } else if !processed[w] {
                    best = best.max(dist[v * n + w] + 1);
                    for &a in &seen {
                        let (av, aw) = (dist[a * n + v], dist[a * n + w]);
                        for &b in &seen {
                            let via = (av + 1 + dist[w * n + b]).min(aw + 1 + dist[v * n + b]);
                            if via < dist[a * n + b] {
                                dist[a * n + b] = via;
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

pub fn max_tight_circle(rs: &RingSubgraph) -> u32 {
    max_tight_circle_graph(&rs.graph)
}

/// Replaces the ring by a representative graph over a greedy maximal
/// independent set (ascending id). Every member is assigned to each
/// adjacent MIS vertex, and two MIS vertices are linked iff an original
/// edge joins their assignment sets.
pub fn mis_reduce(rs: &RingSubgraph) -> RingSubgraph {
    let g = &rs.graph;
    let n = g.n();
    let mut in_mis = vec![false; n];
    for v in 0..n {
        in_mis[v] = !g.neighbors(v).iter().any(|&w| in_mis[w]);
    }
    let mis: Vec<usize> = (0..n).filter(|&v| in_mis[v]).collect();
    let mut rep = vec![usize::MAX; n];
    for (i, &v) in mis.iter().enumerate() {
        rep[v] = i;
    }
    let assigned: Vec<Vec<usize>> = (0..n)
        .map(|v| if in_mis[v] { vec![rep[v]] } else { g.neighbors(v).iter().filter(|&&w| in_mis[w]).map(|&w| rep[w]).collect() })
        .collect();
    let mut edges = Vec::new();
    for (x, y) in g.edges() {
        for &a in &assigned[x] {
            for &b in &assigned[y] {
                if a != b {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    let graph = ConnectivityGraph::from_edges(mis.len(), edges, None).expect("ids in range");
    RingSubgraph { members: mis.iter().map(|&v| rs.members[v]).collect(), graph, center: rs.center }
}

/// Circle length seen by the center of a 2-hop view, on the representative
/// graph if MIS reduction is on.
pub fn circle_length_view(view: &LocalView, params: &EcBrParams) -> u32 {
    let ring = ring_from_view(view);
    if params.use_mis_reduction {
        max_tight_circle(&mis_reduce(&ring))
    } else {
        max_tight_circle(&ring)
    }
}

pub fn verdict_for_length(length: u32, params: &EcBrParams) -> Verdict {
    if length >= params.effective_threshold() {
        Verdict::Interior
    } else {
        Verdict::Boundary
    }
}

pub fn ecbr_classify_node(g: &ConnectivityGraph, u: NodeId, params: &EcBrParams) -> Verdict {
    verdict_for_length(circle_length_view(&k_hop_subgraph(g, u, 2), params), params)
}

/// Pre-refinement verdicts and the circle length behind each.
pub fn ecbr_classify(g: &ConnectivityGraph, params: &EcBrParams) -> Result<(Classification, Vec<u32>)> {
    params.validate()?;
    let lengths: Vec<u32> =
        (0..g.n()).into_par_iter().map(|u| circle_length_view(&k_hop_subgraph(g, u, 2), params)).collect();
    Ok((lengths.iter().map(|&l| verdict_for_length(l, params)).collect(), lengths))
}

/// Refinement decision for one node from its neighbors' verdicts.
pub fn refine_node(own: Verdict, neighbor_verdicts: &[Verdict], gamma: f64) -> Verdict {
    if own == Verdict::Interior || neighbor_verdicts.is_empty() {
        return own;
    }
    let marked = neighbor_verdicts.iter().filter(|&&v| v == Verdict::Boundary).count();
    if marked as f64 >= gamma * neighbor_verdicts.len() as f64 {
        Verdict::Boundary
    } else {
        Verdict::Interior
    }
}

/// One synchronous γ-refinement pass.
pub fn ecbr_refine(g: &ConnectivityGraph, classification: &[Verdict], gamma: f64) -> Classification {
    (0..g.n())
        .map(|u| {
            let nv: Vec<Verdict> = g.neighbors(u).iter().map(|&v| classification[v]).collect();
            refine_node(classification[u], &nv, gamma)
        })
        .collect()
}

/// Pre-refinement pass followed by γ-refinement.
pub fn ecbr(g: &ConnectivityGraph, params: &EcBrParams) -> Result<Classification> {
    let (base, _) = ecbr_classify(g, params)?;
    Ok(ecbr_refine(g, &base, params.gamma))
}

fn bfs_limited(g: &ConnectivityGraph, src: usize, limit: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.n()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        if dist[v] >= limit {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// True iff every pair of cycle vertices is as close in `g` as along the
/// cycle.
pub fn is_tight_cycle(g: &ConnectivityGraph, cycle: &[usize]) -> bool {
    let len = cycle.len();
    for i in 0..len {
        let dist = bfs_limited(g, cycle[i], (len / 2) as u32);
        for j in (i + 1)..len {
            let along = (j - i).min(len - (j - i)) as u32;
            if dist[cycle[j]] != along {
                return false;
            }
        }
    }
    true
}

/// Extracts boundary cycles from the candidate set (pre-refinement
/// Boundary nodes). Candidates are visited by ascending id; for each
/// unprocessed one the shortest fundamental cycles through it are tried in
/// order of length, and the first tight one of length at least
/// `threshold` is emitted. An emitted cycle marks itself and its candidate
/// neighbors processed; processed nodes remain usable by later cycles, so
/// nearby holes can share nodes. A cycle lying entirely within two hops of
/// earlier cycles runs parallel to one of them through a thick candidate
/// band and is skipped.
pub fn boundary_cycles(g: &ConnectivityGraph, candidates: &[bool], threshold: u32) -> Vec<Vec<NodeId>> {
    let h = g.restricted(candidates);
    let n = g.n();
    let mut processed: Vec<bool> = candidates.iter().map(|&c| !c).collect();
    let mut cycles = Vec::new();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![u32::MAX; n];
    let mut branch = vec![usize::MAX; n];
    let mut near_emitted = vec![false; n];
    while let Some(s) = (0..n).find(|&v| !processed[v]) {
        // BFS tree of the candidate graph rooted at s
        let mut order = vec![s];
        depth[s] = 0;
        branch[s] = s;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &w in h.neighbors(v) {
                if depth[w] == u32::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = v;
                    branch[w] = if v == s { w } else { branch[v] };
                    order.push(w);
                }
            }
        }
        let mut closing: Vec<(u32, usize, usize)> = Vec::new();
        for &x in &order {
            for &y in h.neighbors(x) {
                if x < y && x != s && y != s && branch[x] != branch[y] {
                    let len = depth[x] + depth[y] + 1;
                    if len >= threshold {
                        closing.push((len, x, y));
                    }
                }
            }
        }
        closing.sort_unstable();
        let found = closing.into_iter().find_map(|(_, x, y)| {
            let mut cycle = vec![];
            let mut v = x;
            while v != s {
                cycle.push(v);
                v = parent[v];
            }
            cycle.push(s);
            cycle.reverse();
            let mut tail = vec![];
            let mut v = y;
            while v != s {
                tail.push(v);
                v = parent[v];
            }
            cycle.extend(tail);
            let parallel = cycle.iter().all(|&v| near_emitted[v]);
            (!parallel && is_tight_cycle(&h, &cycle)).then_some(cycle)
        });
        for &v in &order {
            depth[v] = u32::MAX;
            parent[v] = usize::MAX;
            branch[v] = usize::MAX;
        }
        match found {
            Some(cycle) => {
                for &v in &cycle {
                    processed[v] = true;
                    for &w in h.neighbors(v) {
                        processed[w] = true;
                    }
                    for (w, d) in bfs_limited(&h, v, 2).into_iter().enumerate() {
                        if d != u32::MAX {
                            near_emitted[w] = true;
                        }
                    }
                }
                cycles.push(cycle);
            }
            None => processed[s] = true,
        }
    }
    cycles
}
