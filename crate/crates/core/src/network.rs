//! Synthetic sensor networks: node placement, hole masks and links under the
//! unit disk graph (UDG) and quasi unit disk graph (d-QUDG) models.
//!
//! All randomness flows from `NetworkConfig::seed`, so a configuration
//! always regenerates the same graph.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::graph::{ConnectivityGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// One node per grid cell, uniformly offset inside the cell. Without an
    /// explicit spacing, the spacing is derived from the target degree.
    PerturbedGrid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    /// Uniform random points, added until the target average degree is met.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommModel {
    Udg,
    /// Reliable links up to `d`, coin flip between `d` and 1.
    Qudg { d: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub area_width: f64,
    pub area_height: f64,
    pub placement: Placement,
    pub comm_model: CommModel,
    pub target_avg_degree: f64,
    #[serde(default)]
    pub hole_mask: Vec<Polygon>,
    pub seed: u64,
}

impl NetworkConfig {
    /// Perturbed grid at the spacing that yields `degree` on average, UDG,
    /// no holes.
    pub fn perturbed_grid(width: f64, height: f64, degree: f64, seed: u64) -> Self {
        Self {
            area_width: width,
            area_height: height,
            placement: Placement::PerturbedGrid { spacing: None },
            comm_model: CommModel::Udg,
            target_avg_degree: degree,
            hole_mask: Vec::new(),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.area_width > 0.0 && self.area_height > 0.0)
            || !self.area_width.is_finite()
            || !self.area_height.is_finite()
        {
            return bad(format!(
                "area dimensions must be positive, got {} x {}",
                self.area_width, self.area_height
            ));
        }
        if let CommModel::Qudg { d } = self.comm_model {
            if !(0.0..=1.0).contains(&d) {
                return bad(format!("QUDG reliable radius d must lie in [0,1], got {d}"));
            }
        }
        if let Placement::PerturbedGrid { spacing: Some(s) } = self.placement {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("grid spacing must be positive, got {s}"));
            }
        }
        if !(self.target_avg_degree > 0.0 && self.target_avg_degree.is_finite()) {
            return bad(format!(
                "target_avg_degree must be positive, got {}",
                self.target_avg_degree
            ));
        }
        for (i, poly) in self.hole_mask.iter().enumerate() {
            if !poly.is_simple() {
                return bad(format!("hole_mask[{i}] is not a simple polygon"));
            }
            let (lo, hi) = poly.bbox();
            if lo.x < 0.0 || lo.y < 0.0 || hi.x > self.area_width || hi.y > self.area_height {
                return bad(format!("hole_mask[{i}] leaves the deployment area"));
            }
        }
        Ok(())
    }

    /// The grid spacing actually used for perturbed-grid placement.
    pub fn grid_spacing(&self) -> f64 {
        match self.placement {
            Placement::PerturbedGrid { spacing: Some(s) } => s,
            _ => spacing_for_degree(self.target_avg_degree, &self.comm_model),
        }
    }

    fn masked(&self, p: Point) -> bool {
        self.hole_mask.iter().any(|poly| poly.contains_strict(p))
    }
}

impl CommModel {
    /// Expected number of links per unit node density: the area of the
    /// disk of certain links plus half the annulus of coin-flip links.
    pub fn link_area(&self) -> f64 {
        match *self {
            CommModel::Udg => PI,
            CommModel::Qudg { d } => PI * (d * d + 0.5 * (1.0 - d * d)),
        }
    }
}

/// Spacing `s` solving `link_area / s² − 1 = degree`.
pub fn spacing_for_degree(degree: f64, model: &CommModel) -> f64 {
    (model.link_area() / (degree + 1.0)).sqrt()
}

/// UDG link rule: distance at most 1.
pub fn link_udg(p: Point, q: Point) -> bool {
    p.dist_sq(q) <= 1.0
}

/// Fair coin keyed by an unordered node pair and a global seed.
#[derive(Debug, Clone, Copy)]
pub struct PairCoin {
    seed: u64,
}

impl PairCoin {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn flip(&self, a: NodeId, b: NodeId) -> bool {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let key = splitmix64(self.seed ^ 0x51ed_270b_27a1_4c3d)
            ^ splitmix64(((lo as u64) << 32) ^ hi as u64);
        splitmix64(key) >> 63 == 1
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// d-QUDG link rule for nodes `a`, `b` at `p`, `q`.
pub fn link_qudg(p: Point, q: Point, d: f64, coin: &PairCoin, a: NodeId, b: NodeId) -> bool {
    let d2 = p.dist_sq(q);
    if d2 <= d * d {
        true
    } else if d2 > 1.0 {
        false
    } else {
        coin.flip(a, b)
    }
}

fn linked(config: &NetworkConfig, coin: &PairCoin, p: Point, q: Point, a: NodeId, b: NodeId) -> bool {
    match config.comm_model {
        CommModel::Udg => link_udg(p, q),
        CommModel::Qudg { d } => link_qudg(p, q, d, coin, a, b),
    }
}

/// Bucket grid with unit cells for radius-1 neighbor queries.
pub(crate) struct UnitGrid {
    cols: usize,
    rows: usize,
    cells: Vec<Vec<usize>>,
    origin: Point,
}

impl UnitGrid {
    pub(crate) fn new(lo: Point, hi: Point) -> Self {
        let cols = ((hi.x - lo.x).max(0.0).floor() as usize) + 1;
        let rows = ((hi.y - lo.y).max(0.0).floor() as usize) + 1;
        Self { cols, rows, cells: vec![Vec::new(); cols * rows], origin: lo }
    }

    pub(crate) fn for_points(points: &[Point]) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        if points.is_empty() {
            lo = Point::new(0.0, 0.0);
            hi = lo;
        }
        let mut g = Self::new(lo, hi);
        for (i, &p) in points.iter().enumerate() {
            g.insert(i, p);
        }
        g
    }

    fn cell(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.origin.x).floor().max(0.0) as usize).min(self.cols - 1);
        let cy = ((p.y - self.origin.y).floor().max(0.0) as usize).min(self.rows - 1);
        (cx, cy)
    }

    pub(crate) fn insert(&mut self, id: usize, p: Point) {
        let (cx, cy) = self.cell(p);
        self.cells[cy * self.cols + cx].push(id);
    }

    /// Ids in the 3x3 block of cells around `p` (a superset of everything
    /// within distance 1).
    pub(crate) fn around(&self, p: Point) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.cell(p);
        let xs = cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1);
        let ys = cy.saturating_sub(1)..=(cy + 1).min(self.rows - 1);
        ys.flat_map(move |y| xs.clone().map(move |x| y * self.cols + x))
            .flat_map(move |c| self.cells[c].iter().copied())
    }
}

/// Draws node positions for `config`.
pub fn sample_positions(config: &NetworkConfig, rng: &mut impl Rng) -> Result<Vec<Point>> {
    config.validate()?;
    match config.placement {
        Placement::PerturbedGrid { .. } => Ok(perturbed_grid(config, rng)),
        Placement::Random => random_until_degree(config, rng),
    }
}

fn perturbed_grid(config: &NetworkConfig, rng: &mut impl Rng) -> Vec<Point> {
    let s = config.grid_spacing();
    let nx = (config.area_width / s + 1e-9).floor() as usize;
    let ny = (config.area_height / s + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            // Offsets are drawn for masked cells too so that a hole mask does
            // not shift the random stream of the remaining cells.
            let ox: f64 = rng.gen_range(0.0..s);
            let oy: f64 = rng.gen_range(0.0..s);
            let p = Point::new(i as f64 * s + ox, j as f64 * s + oy);
            if !config.masked(p) {
                out.push(p);
            }
        }
    }
    out
}

const DEGREE_CHECK_EVERY: usize = 100;

fn random_until_degree(config: &NetworkConfig, rng: &mut impl Rng) -> Result<Vec<Point>> {
    let s = spacing_for_degree(config.target_avg_degree, &config.comm_model);
    let grid_equivalent = (config.area_width * config.area_height / (s * s)).ceil() as usize;
    let cap = 10 * grid_equivalent.max(1);
    let coin = PairCoin::new(config.seed);
    let mut grid = UnitGrid::new(
        Point::new(0.0, 0.0),
        Point::new(config.area_width, config.area_height),
    );
    let mut pts: Vec<Point> = Vec::new();
    let mut edges = 0usize;
    while pts.len() < cap {
        let p = Point::new(
            rng.gen_range(0.0..config.area_width),
            rng.gen_range(0.0..config.area_height),
        );
        if config.masked(p) {
            continue;
        }
        let id = pts.len();
        edges += grid.around(p).filter(|&v| linked(config, &coin, pts[v], p, v, id)).count();
        grid.insert(id, p);
        pts.push(p);
        if pts.len() % DEGREE_CHECK_EVERY == 0
            && 2.0 * edges as f64 / pts.len() as f64 >= config.target_avg_degree
        {
            return Ok(pts);
        }
    }
    Err(Error::Generation {
        seed: config.seed,
        reason: format!(
            "average degree {} not reached within {cap} nodes",
            config.target_avg_degree
        ),
    })
}

/// Links `positions` under the configured model and records signal classes.
pub fn build_graph(positions: Vec<Point>, config: &NetworkConfig) -> ConnectivityGraph {
    let coin = PairCoin::new(config.seed);
    let grid = UnitGrid::for_points(&positions);
    let mut edges = Vec::new();
    for (u, &p) in positions.iter().enumerate() {
        for v in grid.around(p) {
            if v > u && linked(config, &coin, p, positions[v], u, v) {
                edges.push((u, v));
            }
        }
    }
    ConnectivityGraph::from_edges(positions.len(), edges, Some(positions))
        .and_then(ConnectivityGraph::with_signal_from_positions)
        .expect("generated edges are in range and positions present")
}

/// Samples positions and builds the graph in one step.
pub fn generate(config: &NetworkConfig) -> Result<ConnectivityGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let positions = sample_positions(config, &mut rng)?;
    Ok(build_graph(positions, config))
}
