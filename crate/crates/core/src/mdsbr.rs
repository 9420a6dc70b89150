//! Boundary recognition by angular gaps in a local MDS embedding.
//!
//! A node embeds its neighborhood, sorts its one-hop neighbors by angle and
//! reports itself as boundary if some gap between consecutive neighbors is
//! wider than `alpha_min` and, with the micro-hole filter on, no common
//! neighbor of the two flanking nodes sits inside that gap. A refinement
//! pass then drops marked nodes that do not lie on a long shortest path
//! through the marked subgraph.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{k_hop_subgraph, ConnectivityGraph, LocalView, NodeId};
use crate::mds::{classical_mds_2d, hop_distance_matrix, signal_distance_matrix, EmbeddingVariant, LocalEmbedding};
use crate::{Classification, Verdict};

/// Angular slack when deciding whether a node lies strictly inside a cone.
const ANGLE_EPS_DEG: f64 = 1e-9;
/// Relative distance below which an embedded neighbor counts as sitting on
/// the center.
const COINCIDENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MdsBrParams {
    /// Degrees.
    pub alpha_min: f64,
    /// Hop radius of the refinement; 0 disables it.
    pub r_min: u32,
    pub variant: EmbeddingVariant,
    /// Condition 2: ignore gaps whose flanking neighbors share a neighbor
    /// inside the gap.
    pub micro_hole_filter: bool,
}

impl Default for MdsBrParams {
    fn default() -> Self {
        Self { alpha_min: 90.0, r_min: 3, variant: EmbeddingVariant::Mds2, micro_hole_filter: true }
    }
}

impl MdsBrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min > 0.0 && self.alpha_min < 360.0) {
            return Err(Error::InvalidConfig(format!("alpha_min must lie in (0, 360), got {}", self.alpha_min)));
        }
        Ok(())
    }
}

/// Angular gap between two circularly consecutive neighbors, measured
/// counter-clockwise from `v` to `w`. Indices are local to the embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    /// Degrees.
    pub angle: f64,
    pub v: usize,
    pub w: usize,
}

fn angle_deg(emb: &LocalEmbedding, x: usize) -> f64 {
    let c = emb.coords[emb.center];
    emb.coords[x].sub(c).angle().to_degrees()
}

/// All gaps between circularly consecutive members of `one_hop` around the
/// embedding's center, widest first. A single neighbor yields one 360°
/// gap from itself to itself; no neighbors yield nothing.
pub fn max_opening_gaps(emb: &LocalEmbedding, one_hop: &[usize]) -> Vec<Gap> {
    let mut order: Vec<(f64, usize)> = one_hop.iter().map(|&x| (angle_deg(emb, x), x)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let k = order.len();
    let mut gaps: Vec<Gap> = (0..k)
        .map(|i| {
            let (av, v) = order[i];
            let (aw, w) = order[(i + 1) % k];
            let angle = if i + 1 == k { aw + 360.0 - av } else { aw - av };
            Gap { angle, v, w }
        })
        .collect();
    gaps.sort_by(|a, b| b.angle.total_cmp(&a.angle));
    gaps
}

/// True iff no common neighbor of `v` and `w` other than the center lies
/// strictly inside the sector swept counter-clockwise from ray center→v to
/// ray center→w.
pub fn cone_is_clear(emb: &LocalEmbedding, v: usize, w: usize, graph: &ConnectivityGraph) -> bool {
    let c = emb.center;
    let start = angle_deg(emb, v);
    let width = (angle_deg(emb, w) - start).rem_euclid(360.0);
    let width = if width == 0.0 { 360.0 } else { width };
    let eps = coincidence_radius(emb);
    common_neighbors(graph, v, w).filter(|&x| x != c).all(|x| {
        if emb.coords[x].dist(emb.coords[c]) <= eps {
            return true;
        }
        let phi = (angle_deg(emb, x) - start).rem_euclid(360.0);
        !(phi > ANGLE_EPS_DEG && phi < width - ANGLE_EPS_DEG)
    })
}

/// Points closer than this to the center are treated as sitting on it.
fn coincidence_radius(emb: &LocalEmbedding) -> f64 {
    let c = emb.coords[emb.center];
    COINCIDENT_EPS * emb.coords.iter().map(|p| p.dist(c)).fold(0.0, f64::max)
}

fn common_neighbors<'a>(g: &'a ConnectivityGraph, v: usize, w: usize) -> impl Iterator<Item = usize> + 'a {
    let (a, b) = (g.neighbors(v), g.neighbors(w));
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    return Some(a[i - 1]);
                }
            }
        }
        None
    })
}

/// Restricts a view to the connected component of its center.
fn center_component(view: &LocalView) -> Cow<'_, LocalView> {
    let dist = view.center_distances();
    if dist.iter().all(Option::is_some) {
        return Cow::Borrowed(view);
    }
    let keep: Vec<usize> = (0..dist.len()).filter(|&l| dist[l].is_some()).collect();
    let inner = view.graph.induced(&keep);
    let center = keep.binary_search(&view.center).expect("center reaches itself");
    Cow::Owned(LocalView { graph: inner.graph, ids: keep.iter().map(|&l| view.ids[l]).collect(), center })
}

/// Virtual coordinates of a (connected) view per `variant`. `Opt` copies
/// the true positions.
pub fn embed_view(view: &LocalView, variant: EmbeddingVariant) -> Result<LocalEmbedding> {
    let coords = match variant {
        EmbeddingVariant::Opt => view.graph.positions().ok_or(Error::MissingData("node positions"))?.to_vec(),
        EmbeddingVariant::Mds2 | EmbeddingVariant::Mds3 => classical_mds_2d(&hop_distance_matrix(&view.graph)?)?,
        EmbeddingVariant::Ssmds => classical_mds_2d(&signal_distance_matrix(&view.graph)?)?,
    };
    Ok(LocalEmbedding { coords, center: view.center })
}

/// The angular test on a given embedding of `graph`'s nodes.
pub fn classify_embedding(graph: &ConnectivityGraph, emb: &LocalEmbedding, params: &MdsBrParams) -> Verdict {
    let one_hop = graph.neighbors(emb.center);
    if one_hop.len() < 2 {
        return Verdict::Boundary;
    }
    // Twins of the center (same closed neighborhood) embed onto it and have
    // no direction.
    let (c, eps) = (emb.coords[emb.center], coincidence_radius(emb));
    let directed: Vec<usize> = one_hop.iter().copied().filter(|&x| emb.coords[x].dist(c) > eps).collect();
    let open = max_opening_gaps(emb, &directed)
        .into_iter()
        .take_while(|g| g.angle > params.alpha_min)
        .any(|g| !params.micro_hole_filter || cone_is_clear(emb, g.v, g.w, graph));
    if open {
        Verdict::Boundary
    } else {
        Verdict::Interior
    }
}

/// Base classification of a view's center. The view should span
/// `params.variant.hops()` hops; members outside the center's component
/// are ignored.
pub fn classify_view(view: &LocalView, params: &MdsBrParams) -> Result<Verdict> {
    if view.graph.degree(view.center) < 2 {
        return Ok(Verdict::Boundary);
    }
    let view = center_component(view);
    let emb = embed_view(&view, params.variant)?;
    Ok(classify_embedding(&view.graph, &emb, params))
}

pub fn mdsbr_classify_node(g: &ConnectivityGraph, u: NodeId, params: &MdsBrParams) -> Result<Verdict> {
    classify_view(&k_hop_subgraph(g, u, params.variant.hops()), params)
}

/// Base pass (no refinement) over every node.
pub fn mdsbr_classify(g: &ConnectivityGraph, params: &MdsBrParams) -> Result<Classification> {
    params.validate()?;
    (0..g.n()).into_par_iter().map(|u| mdsbr_classify_node(g, u, params)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefineDecision {
    pub survives: bool,
    /// Marked nodes in the gathered neighborhood, excluding the center.
    pub neighborhood_size: usize,
}

/// Refinement test for the center of `view`, an `r_min`-hop view of the
/// marked subgraph: the center survives iff it lies on a shortest path of
/// at least `r_min` hops between two view members (itself allowed as an
/// endpoint). Distances are taken inside the view.
pub fn refine_view(view: &LocalView, r_min: u32) -> RefineDecision {
    let n = view.graph.n();
    let neighborhood_size = n - 1;
    if r_min == 0 {
        return RefineDecision { survives: true, neighborhood_size };
    }
    let c = view.center;
    let dist: Vec<Vec<Option<u32>>> = (0..n).map(|a| view.graph.bfs(a, None)).collect();
    let survives = (0..n).any(|a| {
        let Some(au) = dist[a][c] else { return false };
        (0..n).any(|b| match (dist[c][b], dist[a][b]) {
            (Some(ub), Some(ab)) => au + ub == ab && ab >= r_min,
            _ => false,
        })
    });
    RefineDecision { survives, neighborhood_size }
}

/// Outcome of a refinement pass over a whole classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub classification: Classification,
    /// Gathered neighborhood size per node that was marked on input.
    pub neighborhood_sizes: Vec<usize>,
}

/// One synchronous refinement pass: every Boundary node decides from the
/// same input marking.
pub fn mdsbr_refine(g: &ConnectivityGraph, marked: &[Verdict], r_min: u32) -> Refinement {
    let keep: Vec<bool> = marked.iter().map(|&v| v == Verdict::Boundary).collect();
    let sub = g.restricted(&keep);
    let decisions: Vec<Option<RefineDecision>> = (0..g.n())
        .into_par_iter()
        .map(|u| keep[u].then(|| refine_view(&k_hop_subgraph(&sub, u, r_min), r_min)))
        .collect();
    Refinement {
        classification: decisions
            .iter()
            .map(|d| match d {
                Some(d) if d.survives => Verdict::Boundary,
                _ => Verdict::Interior,
            })
            .collect(),
        neighborhood_sizes: decisions.iter().flatten().map(|d| d.neighborhood_size).collect(),
    }
}

/// Base pass followed by refinement when `r_min > 0`.
pub fn mdsbr(g: &ConnectivityGraph, params: &MdsBrParams) -> Result<Classification> {
    let base = mdsbr_classify(g, params)?;
    if params.r_min == 0 {
        return Ok(base);
    }
    Ok(mdsbr_refine(g, &base, params.r_min).classification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::link_udg;

    fn emb_at(angles_deg: &[f64]) -> LocalEmbedding {
        let mut coords = vec![Point::new(0.0, 0.0)];
        coords.extend(angles_deg.iter().map(|a| {
            let r = a.to_radians();
            Point::new(r.cos(), r.sin())
        }));
        LocalEmbedding { coords, center: 0 }
    }

    fn udg(points: &[Point]) -> ConnectivityGraph {
        let mut edges = Vec::new();
        for i in 0..points.len() {
            for j in 0..i {
                if link_udg(points[i], points[j]) {
                    edges.push((j, i));
                }
            }
        }
        ConnectivityGraph::from_edges(points.len(), edges, Some(points.to_vec())).unwrap().with_signal_from_positions().unwrap()
    }

    #[test]
    fn four_even_neighbors() {
        let emb = emb_at(&[0.0, 90.0, 180.0, 270.0]);
        let gaps = max_opening_gaps(&emb, &[1, 2, 3, 4]);
        assert_eq!(gaps.len(), 4);
        assert!(gaps.iter().all(|g| (g.angle - 90.0).abs() < 1e-9));
    }

    #[test]
    fn two_neighbors() {
        let emb = emb_at(&[0.0, 90.0]);
        let gaps = max_opening_gaps(&emb, &[1, 2]);
        assert!((gaps[0].angle - 270.0).abs() < 1e-9);
        assert_eq!((gaps[0].v, gaps[0].w), (2, 1));
        assert!((gaps[1].angle - 90.0).abs() < 1e-9);
        let single = max_opening_gaps(&emb, &[2]);
        assert_eq!(single, vec![Gap { angle: 360.0, v: 2, w: 2 }]);
    }

    #[test]
    fn cone_with_common_neighbor_outside_is_clear() {
        // u=0, v=1 at 0°, w=2 at 120°, x=3 common neighbor at 200°
        let emb = emb_at(&[0.0, 120.0, 200.0]);
        let g = ConnectivityGraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
        assert!(cone_is_clear(&emb, 1, 2, &g));
        // same node inside the sector
        let emb = emb_at(&[0.0, 120.0, 60.0]);
        assert!(!cone_is_clear(&emb, 1, 2, &g));
        // the reverse sector (w to v) does not contain it
        assert!(cone_is_clear(&emb, 2, 1, &g));
    }

    fn micro_hole() -> ConnectivityGraph {
        // u at origin; v, w flank a 118° gap closed by x, which u cannot reach
        let mut pts = vec![
            Point::new(0.0, 0.0),
            Point::new(0.8, -0.2),
            Point::new(-0.2, 0.8),
            Point::new(0.75, 0.75),
        ];
        for a in [150.0f64, 200.0, 250.0, 300.0] {
            let r = a.to_radians();
            pts.push(Point::new(0.8 * r.cos(), 0.8 * r.sin()));
        }
        udg(&pts)
    }

    #[test]
    fn micro_hole_filtered_by_condition_two() {
        let g = micro_hole();
        assert!(!g.has_edge(0, 3));
        assert!(g.has_edge(1, 3) && g.has_edge(2, 3));
        let opt = MdsBrParams { variant: EmbeddingVariant::Opt, r_min: 0, ..Default::default() };
        assert_eq!(mdsbr_classify_node(&g, 0, &opt).unwrap(), Verdict::Interior);
        let open = MdsBrParams { micro_hole_filter: false, ..opt };
        assert_eq!(mdsbr_classify_node(&g, 0, &open).unwrap(), Verdict::Boundary);
    }

    /// Teeth along the top of a dense block. Returns the graph, the tip ids
    /// and the ids of valleys flanked by two tips.
    pub(crate) fn sawtooth() -> (ConnectivityGraph, Vec<usize>, Vec<usize>) {
        let mut pts = Vec::new();
        let mut valleys = Vec::new();
        let mut tips = Vec::new();
        for k in 0..6 {
            valleys.push(pts.len());
            pts.push(Point::new(1.1 * k as f64, 0.0));
        }
        for k in 0..5 {
            tips.push(pts.len());
            pts.push(Point::new(0.55 + 1.1 * k as f64, 0.83));
        }
        for j in 0..7 {
            for i in 0..30 {
                let x = -1.6 + 0.3 * i as f64 + if j % 2 == 1 { 0.15 } else { 0.0 };
                pts.push(Point::new(x, -0.2 - 0.26 * j as f64));
            }
        }
        let inner_valleys = valleys[1..5].to_vec();
        (udg(&pts), tips, inner_valleys)
    }

    #[test]
    fn sawtooth_alternates_under_opt() {
        let (g, tips, valleys) = sawtooth();
        let p = MdsBrParams { variant: EmbeddingVariant::Opt, r_min: 0, ..Default::default() };
        for &t in &tips {
            assert_eq!(g.degree(t), 2);
            assert_eq!(mdsbr_classify_node(&g, t, &p).unwrap(), Verdict::Boundary, "tip {t}");
        }
        for &v in &valleys {
            assert_eq!(mdsbr_classify_node(&g, v, &p).unwrap(), Verdict::Interior, "valley {v}");
        }
    }

    #[test]
    fn hexagonal_neighborhood_is_interior() {
        let mut pts = vec![Point::new(0.0, 0.0)];
        for ring in 1..=2 {
            let r = 0.6 * ring as f64;
            let k = 6 * ring;
            for i in 0..k {
                let a = std::f64::consts::TAU * i as f64 / k as f64;
                pts.push(Point::new(r * a.cos(), r * a.sin()));
            }
        }
        let g = udg(&pts);
        for variant in EmbeddingVariant::ALL {
            let p = MdsBrParams { variant, ..Default::default() };
            assert_eq!(mdsbr_classify_node(&g, 0, &p).unwrap(), Verdict::Interior, "{variant:?}");
        }
    }

    #[test]
    fn half_plane_neighbors_are_boundary() {
        let mut pts = vec![Point::new(0.0, 0.0)];
        for i in 0..7 {
            let a = std::f64::consts::PI * i as f64 / 6.0;
            pts.push(Point::new(0.7 * a.cos(), 0.7 * a.sin()));
            pts.push(Point::new(1.4 * a.cos(), 1.4 * a.sin()));
        }
        let g = udg(&pts);
        for variant in EmbeddingVariant::ALL {
            let p = MdsBrParams { variant, ..Default::default() };
            assert_eq!(mdsbr_classify_node(&g, 0, &p).unwrap(), Verdict::Boundary, "{variant:?}");
        }
    }

    #[test]
    fn opt_without_positions_fails() {
        let g = ConnectivityGraph::from_edges(3, [(0, 1), (0, 2)], None).unwrap();
        let p = MdsBrParams { variant: EmbeddingVariant::Opt, ..Default::default() };
        assert!(matches!(mdsbr_classify_node(&g, 0, &p), Err(Error::MissingData(_))));
    }

    fn path(n: usize) -> ConnectivityGraph {
        ConnectivityGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)), None).unwrap()
    }

    #[test]
    fn refine_keeps_whole_marked_path() {
        let g = path(7);
        let r = mdsbr_refine(&g, &vec![Verdict::Boundary; 7], 3);
        assert!(r.classification.iter().all(|&v| v == Verdict::Boundary));
        assert_eq!(r.neighborhood_sizes, vec![3, 4, 5, 6, 5, 4, 3]);
    }

    #[test]
    fn refine_drops_short_pieces() {
        // marked: isolated 0, satellite pair {2,3}, path 5..=8; 1 and 4 unmarked
        let g = path(9);
        let b = Verdict::Boundary;
        let i = Verdict::Interior;
        let r = mdsbr_refine(&g, &[b, i, b, b, i, b, b, b, b], 3);
        assert_eq!(r.classification, vec![i, i, i, i, i, b, b, b, b]);
        // a three node path is still too short
        let r = mdsbr_refine(&path(3), &[b, b, b], 3);
        assert!(r.classification.iter().all(|&v| v == i));
    }

    #[test]
    fn refine_with_zero_radius_is_identity() {
        let b = Verdict::Boundary;
        let r = mdsbr_refine(&path(3), &[b, Verdict::Interior, b], 0);
        assert_eq!(r.classification, vec![b, Verdict::Interior, b]);
    }

    #[test]
    fn invalid_alpha() {
        assert!(MdsBrParams { alpha_min: 0.0, ..Default::default() }.validate().is_err());
        assert!(MdsBrParams { alpha_min: 360.0, ..Default::default() }.validate().is_err());
    }
}
