//! Location-free boundary recognition for simulated wireless sensor
//! networks.
//!
//! Two per-node classifiers decide from a small hop neighborhood whether a
//! node sits on the border of the network or of a hole:
//!
//! * [`mdsbr`] embeds the 2-hop neighborhood with multidimensional scaling
//!   and looks for a large angular gap among the one-hop neighbors.
//! * [`ecbr`] searches the nodes exactly two hops away for a tight circle
//!   enclosing the node.
//!
//! [`network`] generates test deployments, [`truth`] derives the geometric
//! reference labels and [`sim`] runs both algorithms as synchronous
//! message-passing rounds and scores them.

pub mod ecbr;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod mds;
pub mod mdsbr;
pub mod network;
pub mod presets;
pub mod render;
pub mod sim;
pub mod truth;

pub use error::{Error, Result};
pub use geometry::{Point, Polygon};
pub use graph::{k_hop_subgraph, ConnectivityGraph, LocalView, NodeId, SignalClass};
pub use network::{CommModel, NetworkConfig, Placement};

use serde::{Deserialize, Serialize};

/// A classifier's verdict for one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Boundary,
    Interior,
}

/// Per-node verdicts, indexed by node id.
pub type Classification = Vec<Verdict>;

/// Verdicts as a JSON object `node-id -> "boundary" | "interior"`.
pub fn classification_json(cls: &[Verdict]) -> serde_json::Value {
    let map: std::collections::BTreeMap<usize, Verdict> = cls.iter().copied().enumerate().collect();
    serde_json::to_value(map).expect("plain data serializes")
}
