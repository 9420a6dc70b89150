//! The connectivity graph and the local views algorithms operate on.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub type NodeId = usize;

/// Two-level received signal strength of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignalClass {
    #[serde(rename = "S")]
    Strong,
    #[serde(rename = "W")]
    Weak,
}

impl SignalClass {
    /// Strong iff the endpoints are less than half the communication
    /// distance apart.
    pub fn from_distance(dist: f64) -> Self {
        if dist < 0.5 {
            SignalClass::Strong
        } else {
            SignalClass::Weak
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'S' => Some(SignalClass::Strong),
            'W' => Some(SignalClass::Weak),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            SignalClass::Strong => 'S',
            SignalClass::Weak => 'W',
        }
    }
}

/// Undirected simple graph over dense ids `0..n`.
///
/// Adjacency lists are sorted and duplicate free; `signal[u][i]` (when
/// present) classifies the link to `adj[u][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityGraph {
    positions: Option<Vec<Point>>,
    adj: Vec<Vec<NodeId>>,
    signal: Option<Vec<Vec<SignalClass>>>,
}

impl ConnectivityGraph {
    /// Builds a graph from an edge list. Self-loops are rejected and
    /// duplicate edges collapse to one.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        positions: Option<Vec<Point>>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidConfig(format!("edge ({u},{v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::InvalidConfig(format!("self-loop at node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        if let Some(p) = &positions {
            if p.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "{} positions for {n} nodes",
                    p.len()
                )));
            }
        }
        Ok(Self { positions, adj, signal: None })
    }

    /// Like [`from_edges`](Self::from_edges) but with an explicit signal
    /// class per edge.
    pub fn from_signal_edges(
        n: usize,
        edges: &[(NodeId, NodeId, SignalClass)],
        positions: Option<Vec<Point>>,
    ) -> Result<Self> {
        let mut g = Self::from_edges(n, edges.iter().map(|&(u, v, _)| (u, v)), positions)?;
        let mut signal: Vec<Vec<SignalClass>> =
            g.adj.iter().map(|l| vec![SignalClass::Weak; l.len()]).collect();
        for &(u, v, s) in edges {
            let i = g.adj[u].binary_search(&v).expect("edge inserted");
            let j = g.adj[v].binary_search(&u).expect("edge inserted");
            signal[u][i] = s;
            signal[v][j] = s;
        }
        g.signal = Some(signal);
        Ok(g)
    }

    /// Derives signal classes from the stored positions.
    pub fn with_signal_from_positions(mut self) -> Result<Self> {
        let pos = self.positions.as_ref().ok_or(Error::MissingData("positions"))?;
        let signal = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, l)| l.iter().map(|&v| SignalClass::from_distance(pos[u].dist(pos[v]))).collect())
            .collect();
        self.signal = Some(signal);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn positions(&self) -> Option<&[Point]> {
        self.positions.as_deref()
    }

    pub fn position(&self, u: NodeId) -> Option<Point> {
        self.positions.as_ref().map(|p| p[u])
    }

    pub fn has_signal(&self) -> bool {
        self.signal.is_some()
    }

    pub fn signal(&self, u: NodeId, v: NodeId) -> Option<SignalClass> {
        let s = self.signal.as_ref()?;
        let i = self.adj[u].binary_search(&v).ok()?;
        Some(s[u][i])
    }

    /// Signal classes parallel to `neighbors(u)`.
    pub fn neighbor_signals(&self, u: NodeId) -> Option<&[SignalClass]> {
        self.signal.as_ref().map(|s| s[u].as_slice())
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic
    /// order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().copied().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn avg_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Hop distances from `src`, stopping at `max_depth` hops.
    pub fn bfs(&self, src: NodeId, max_depth: Option<u32>) -> Vec<Option<u32>> {
        bfs_filtered(self, src, max_depth, |_| true)
    }

    /// Same node set, keeping only links whose endpoints are both in `keep`.
    pub fn restricted(&self, keep: &[bool]) -> ConnectivityGraph {
        assert_eq!(keep.len(), self.n());
        let mut adj = Vec::with_capacity(self.n());
        let mut sig = self.signal.as_ref().map(|_| Vec::with_capacity(self.n()));
        for u in 0..self.n() {
            let mut l = Vec::new();
            let mut s = Vec::new();
            if keep[u] {
                for (k, &v) in self.adj[u].iter().enumerate() {
                    if keep[v] {
                        l.push(v);
                        if let Some(all) = &self.signal {
                            s.push(all[u][k]);
                        }
                    }
                }
            }
            adj.push(l);
            if let Some(sig) = &mut sig {
                sig.push(s);
            }
        }
        ConnectivityGraph { positions: self.positions.clone(), adj, signal: sig }
    }

    /// Subgraph induced by `nodes` (any order; duplicates ignored). Local
    /// ids follow ascending global id.
    pub fn induced(&self, nodes: &[NodeId]) -> LocalView {
        let mut ids = nodes.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &g) in ids.iter().enumerate() {
            local[g] = i;
        }
        let mut adj = Vec::with_capacity(ids.len());
        let mut sig = self.signal.as_ref().map(|_| Vec::with_capacity(ids.len()));
        for &g in &ids {
            let mut l = Vec::new();
            let mut s = Vec::new();
            for (k, &v) in self.adj[g].iter().enumerate() {
                if local[v] != usize::MAX {
                    l.push(local[v]);
                    if let Some(all) = &self.signal {
                        s.push(all[g][k]);
                    }
                }
            }
            adj.push(l);
            if let Some(sig) = &mut sig {
                sig.push(s);
            }
        }
        let positions = self.positions.as_ref().map(|p| ids.iter().map(|&g| p[g]).collect());
        LocalView {
            graph: ConnectivityGraph { positions, adj, signal: sig },
            ids,
            center: 0,
        }
    }
}

pub(crate) fn bfs_filtered(
    g: &ConnectivityGraph,
    src: NodeId,
    max_depth: Option<u32>,
    allowed: impl Fn(NodeId) -> bool,
) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        if max_depth.is_some_and(|m| d >= m) {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w].is_none() && allowed(w) {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A node's view of its surroundings: a small induced subgraph with local
/// ids, the mapping back to global ids and the local id of the owner.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalView {
    pub graph: ConnectivityGraph,
    /// `ids[local] = global`, ascending.
    pub ids: Vec<NodeId>,
    pub center: usize,
}

impl LocalView {
    pub fn center_global(&self) -> NodeId {
        self.ids[self.center]
    }

    pub fn local_of(&self, global: NodeId) -> Option<usize> {
        self.ids.binary_search(&global).ok()
    }

    /// Hop distances from the center within the view.
    pub fn center_distances(&self) -> Vec<Option<u32>> {
        self.graph.bfs(self.center, None)
    }
}

/// Induced subgraph on all nodes within `k` hops of `u`, center marked.
pub fn k_hop_subgraph(g: &ConnectivityGraph, u: NodeId, k: u32) -> LocalView {
    let dist = g.bfs(u, Some(k));
    let nodes: Vec<NodeId> = (0..g.n()).filter(|&v| dist[v].is_some()).collect();
    let mut view = g.induced(&nodes);
    view.center = view.local_of(u).expect("center in its own neighborhood");
    view
}
