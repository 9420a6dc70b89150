//! Planarization of a straight-line drawing into a half-edge arrangement.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{ConnectivityGraph, NodeId};
use crate::network::UnitGrid;

/// Tolerance for incidence and coincidence predicates.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrVertex {
    pub pos: Point,
    /// Originating network node, `None` for crossing points.
    pub node: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
}

/// Half-edge structure of the planarized drawing. Half-edges `2k` and
/// `2k + 1` are twins; the face of a half-edge lies to its left.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub vertices: Vec<ArrVertex>,
    pub half_edges: Vec<HalfEdge>,
}

impl Arrangement {
    pub fn dest(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].twin].origin
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn length(&self, h: usize) -> f64 {
        let a = self.vertices[self.half_edges[h].origin].pos;
        let b = self.vertices[self.dest(h)].pos;
        a.dist(b)
    }

    /// Connected component index per vertex, plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.edge_count() {
            let a = find(&mut parent, self.half_edges[2 * e].origin);
            let b = find(&mut parent, self.half_edges[2 * e + 1].origin);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut comp = vec![0; self.vertices.len()];
        let mut count = 0;
        for v in 0..self.vertices.len() {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            comp[v] = label[r];
        }
        (comp, count)
    }
}

struct Segment {
    a: Point,
    b: Point,
    u: NodeId,
    v: NodeId,
}

/// Splits every drawn link at its crossings with other links.
///
/// Fails on coincident nodes, nodes lying on foreign links, collinear
/// overlaps and crossings closer than [`GEOM_EPS`] to each other.
pub fn planarize(g: &ConnectivityGraph) -> Result<Arrangement> {
    let pos = g.positions().ok_or(Error::MissingData("node positions"))?;
    check_coincident(pos)?;

    let segs: Vec<Segment> = g
        .edges()
        .map(|(u, v)| Segment { a: pos[u], b: pos[v], u, v })
        .collect();

    let mut vertices: Vec<ArrVertex> =
        pos.iter().enumerate().map(|(i, &p)| ArrVertex { pos: p, node: Some(i) }).collect();
    // (parameter along segment, arrangement vertex) per segment
    let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); segs.len()];

    for (i, j) in candidate_pairs(&segs) {
        let (s, t) = (&segs[i], &segs[j]);
        let shared = s.u == t.u || s.u == t.v || s.v == t.u || s.v == t.v;
        match crossing(s, t, shared)? {
            Some((ti, tj, p)) => {
                let id = vertices.len();
                vertices.push(ArrVertex { pos: p, node: None });
                splits[i].push((ti, id));
                splits[j].push((tj, id));
            }
            None => {}
        }
    }

    let mut half_edges: Vec<HalfEdge> = Vec::new();
    for (k, seg) in segs.iter().enumerate() {
        let sp = &mut splits[k];
        sp.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut chain = Vec::with_capacity(sp.len() + 2);
        chain.push(seg.u);
        chain.extend(sp.iter().map(|&(_, id)| id));
        chain.push(seg.v);
        for w in chain.windows(2) {
            if vertices[w[0]].pos.dist(vertices[w[1]].pos) <= GEOM_EPS {
                return Err(Error::Degenerate(format!(
                    "link ({},{}) has coincident split points (concurrent crossings)",
                    seg.u, seg.v
                )));
            }
            let h = half_edges.len();
            half_edges.push(HalfEdge { origin: w[0], twin: h + 1, next: usize::MAX });
            half_edges.push(HalfEdge { origin: w[1], twin: h, next: usize::MAX });
        }
    }

    link_next(&vertices, &mut half_edges);
    Ok(Arrangement { vertices, half_edges })
}

fn check_coincident(pos: &[Point]) -> Result<()> {
    let grid = UnitGrid::for_points(pos);
    for (i, &p) in pos.iter().enumerate() {
        for j in grid.around(p) {
            if j > i && p.dist(pos[j]) <= GEOM_EPS {
                return Err(Error::Degenerate(format!("nodes {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// Pairs of segments whose bounding boxes share a unit cell, each reported
/// once.
fn candidate_pairs(segs: &[Segment]) -> Vec<(usize, usize)> {
    if segs.is_empty() {
        return Vec::new();
    }
    let bbox = |s: &Segment| {
        (
            Point::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y)),
            Point::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y)),
        )
    };
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    for s in segs {
        let (l, _) = bbox(s);
        lo.x = lo.x.min(l.x);
        lo.y = lo.y.min(l.y);
    }
    let cell = |p: Point| ((p.x - lo.x).floor() as i64, (p.y - lo.y).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    for (k, s) in segs.iter().enumerate() {
        let (l, h) = bbox(s);
        let (x0, y0) = cell(l);
        let (x1, y1) = cell(h);
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                buckets.entry((cx, cy)).or_default().push(k);
            }
        }
    }
    let mut keys: Vec<_> = buckets.keys().copied().collect();
    keys.sort_unstable();
    let mut out = Vec::new();
    for key in keys {
        let members = &buckets[&key];
        for (x, &i) in members.iter().enumerate() {
            let (li, hi) = bbox(&segs[i]);
            for &j in &members[x + 1..] {
                let (lj, hj) = bbox(&segs[j]);
                if li.x.max(lj.x) > hi.x.min(hj.x) + GEOM_EPS
                    || li.y.max(lj.y) > hi.y.min(hj.y) + GEOM_EPS
                {
                    continue;
                }
                // Report the pair only in the cell holding the lower-left
                // corner of the bbox overlap.
                if cell(Point::new(li.x.max(lj.x), li.y.max(lj.y))) == key {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    out
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Proper crossing of two links as `(t_s, t_t, point)`; `Ok(None)` when they
/// are disjoint or only meet at a shared node.
fn crossing(s: &Segment, t: &Segment, shared: bool) -> Result<Option<(f64, f64, Point)>> {
    let r = s.b.sub(s.a);
    let q = t.b.sub(t.a);
    let denom = cross(r, q);
    let ca = t.a.sub(s.a);
    let scale = (r.x.hypot(r.y) * q.x.hypot(q.y)).max(f64::MIN_POSITIVE);
    let degenerate = |what: &str| {
        Err(Error::Degenerate(format!(
            "links ({},{}) and ({},{}): {what}",
            s.u, s.v, t.u, t.v
        )))
    };

    // Foreign endpoints lying on a link.
    let on = |p: Point, seg: &Segment| crate::geometry::point_segment_dist(p, seg.a, seg.b) <= GEOM_EPS;
    for (p, id) in [(t.a, t.u), (t.b, t.v)] {
        if id != s.u && id != s.v && on(p, s) {
            return degenerate(&format!("node {id} lies on a link"));
        }
    }
    for (p, id) in [(s.a, s.u), (s.b, s.v)] {
        if id != t.u && id != t.v && on(p, t) {
            return degenerate(&format!("node {id} lies on a link"));
        }
    }

    if denom.abs() <= GEOM_EPS * scale {
        // Parallel; collinear overlap beyond a shared endpoint is degenerate.
        if cross(ca, r).abs() <= GEOM_EPS * r.x.hypot(r.y).max(f64::MIN_POSITIVE) {
            let rr = r.x * r.x + r.y * r.y;
            let t0 = (ca.x * r.x + ca.y * r.y) / rr;
            let t1 = ((t.b.x - s.a.x) * r.x + (t.b.y - s.a.y) * r.y) / rr;
            let (lo, hi) = (t0.min(t1), t0.max(t1));
            let overlap = hi.min(1.0) - lo.max(0.0);
            if overlap > GEOM_EPS {
                return degenerate("collinear overlap");
            }
        }
        return Ok(None);
    }
    if shared {
        return Ok(None);
    }
    let ts = cross(ca, q) / denom;
    let tt = cross(ca, r) / denom;
    if ts <= 0.0 || ts >= 1.0 || tt <= 0.0 || tt >= 1.0 {
        return Ok(None);
    }
    let p = Point::new(s.a.x + ts * r.x, s.a.y + ts * r.y);
    Ok(Some((ts, tt, p)))
}

/// Sets `next` so that walks trace faces counterclockwise on their left.
fn link_next(vertices: &[ArrVertex], half_edges: &mut [HalfEdge]) {
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (h, he) in half_edges.iter().enumerate() {
        outgoing[he.origin].push(h);
    }
    let dir = |h: usize, hes: &[HalfEdge]| {
        let a = vertices[hes[h].origin].pos;
        let b = vertices[hes[hes[h].twin].origin].pos;
        b.sub(a).angle()
    };
    // position of each half-edge in its origin's ccw order
    let mut slot = vec![0usize; half_edges.len()];
    for list in &mut outgoing {
        list.sort_by(|&x, &y| dir(x, half_edges).total_cmp(&dir(y, half_edges)).then(x.cmp(&y)));
        for (i, &h) in list.iter().enumerate() {
            slot[h] = i;
        }
    }
    for h in 0..half_edges.len() {
        let twin = half_edges[h].twin;
        let at = half_edges[twin].origin;
        let list = &outgoing[at];
        let i = slot[twin];
        half_edges[h].next = list[(i + list.len() - 1) % list.len()];
    }
}
