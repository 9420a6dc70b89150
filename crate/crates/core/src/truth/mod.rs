//! Evaluation-only ground truth.
//!
//! Holes are faces of the planarized drawing whose perimeter reaches
//! `h_min`; the unbounded face always counts. Nodes on a hole's boundary
//! walk are *mandatory* boundary nodes, nodes within one communication
//! distance of a mandatory node are *optional*, everything else is
//! *interior*.

mod arrangement;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use arrangement::{planarize, ArrVertex, Arrangement, HalfEdge, GEOM_EPS};

use crate::error::Result;
use crate::geometry::{signed_area, Point};
use crate::graph::ConnectivityGraph;
use crate::network::UnitGrid;

/// Default minimum hole perimeter.
pub const DEFAULT_H_MIN: f64 = 4.0;

/// One closed boundary walk of the arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Arrangement vertices in walk order (face on the left).
    pub boundary_walk: Vec<usize>,
    pub perimeter: f64,
    pub signed_area: f64,
    /// True for the walk bounding a component from outside. All such walks
    /// together form the single unbounded face.
    pub is_outer: bool,
    pub component: usize,
}

/// Traces every face walk of `a`. Per connected component, the walk with
/// the most negative signed area is the outer one.
pub fn extract_faces(a: &Arrangement) -> Vec<Face> {
    let (comp, ncomp) = a.components();
    let mut seen = vec![false; a.half_edges.len()];
    let mut faces = Vec::new();
    for start in 0..a.half_edges.len() {
        if seen[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut perimeter = 0.0;
        let mut h = start;
        loop {
            seen[h] = true;
            walk.push(a.half_edges[h].origin);
            perimeter += a.length(h);
            h = a.half_edges[h].next;
            if h == start {
                break;
            }
        }
        let ring: Vec<Point> = walk.iter().map(|&v| a.vertices[v].pos).collect();
        faces.push(Face {
            component: comp[walk[0]],
            boundary_walk: walk,
            perimeter,
            signed_area: signed_area(&ring),
            is_outer: false,
        });
    }
    let mut outer: Vec<Option<usize>> = vec![None; ncomp];
    for (i, f) in faces.iter().enumerate() {
        let slot = &mut outer[f.component];
        if slot.map_or(true, |j| f.signed_area < faces[j].signed_area) {
            *slot = Some(i);
        }
    }
    for i in outer.into_iter().flatten() {
        faces[i].is_outer = true;
    }
    faces
}

/// Indices of faces that count as holes: bounded faces with perimeter at
/// least `h_min`, plus every outer walk.
pub fn identify_holes(faces: &[Face], h_min: f64) -> Vec<usize> {
    faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_outer || f.perimeter >= h_min)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Mandatory,
    Optional,
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleInfo {
    pub perimeter: f64,
    pub outer: bool,
    pub mandatory_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub labels: Vec<Label>,
    pub holes: Vec<HoleInfo>,
    pub h_min: f64,
}

impl GroundTruth {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump<'a> {
            h_min: f64,
            labels: BTreeMap<usize, Label>,
            holes: &'a [HoleInfo],
        }
        serde_json::to_value(Dump {
            h_min: self.h_min,
            labels: self.labels.iter().copied().enumerate().collect(),
            holes: &self.holes,
        })
        .expect("plain data serializes")
    }
}

/// Labels the nodes of `g` from the hole faces of its arrangement.
///
/// Nodes without links form their own component and so lie on the
/// unbounded face; they are mandatory.
pub fn classify_ground_truth(
    g: &ConnectivityGraph,
    arrangement: &Arrangement,
    faces: &[Face],
    holes: &[usize],
    h_min: f64,
) -> GroundTruth {
    let n = g.n();
    let mut mandatory = vec![false; n];
    let mut infos = Vec::with_capacity(holes.len());
    for &fi in holes {
        let f = &faces[fi];
        let mut count = 0;
        for &v in &f.boundary_walk {
            if let Some(node) = arrangement.vertices[v].node {
                if !mandatory[node] {
                    count += 1;
                }
                mandatory[node] = true;
            }
        }
        infos.push(HoleInfo { perimeter: f.perimeter, outer: f.is_outer, mandatory_nodes: count });
    }
    for u in 0..n {
        if g.degree(u) == 0 {
            mandatory[u] = true;
        }
    }

    let pos = g.positions().expect("arrangement implies positions");
    let mandatory_pts: Vec<usize> = (0..n).filter(|&u| mandatory[u]).collect();
    let grid = {
        let pts: Vec<Point> = mandatory_pts.iter().map(|&u| pos[u]).collect();
        (UnitGrid::for_points(&pts), pts)
    };
    let labels = (0..n)
        .map(|u| {
            if mandatory[u] {
                Label::Mandatory
            } else if !grid.1.is_empty() && grid.0.around(pos[u]).any(|k| pos[u].dist(grid.1[k]) <= 1.0) {
                Label::Optional
            } else {
                Label::Interior
            }
        })
        .collect();
    GroundTruth { labels, holes: infos, h_min }
}

/// Planarizes `g` and labels its nodes with hole threshold `h_min`.
pub fn ground_truth(g: &ConnectivityGraph, h_min: f64) -> Result<GroundTruth> {
    let arrangement = planarize(g)?;
    let faces = extract_faces(&arrangement);
    let holes = identify_holes(&faces, h_min);
    Ok(classify_ground_truth(g, &arrangement, &faces, &holes, h_min))
}
