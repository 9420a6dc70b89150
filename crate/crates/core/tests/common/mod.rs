//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsn_boundary::presets::HolePreset;
use wsn_boundary::{ConnectivityGraph, NetworkConfig, Point};

pub const INF: u32 = u32::MAX / 4;

/// Floyd-Warshall hop distances; unreachable pairs are `INF`.
pub fn floyd(g: &ConnectivityGraph) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn is_tight(cycle: &[usize], d: &[Vec<u32>]) -> bool {
    let len = cycle.len();
    (0..len).all(|i| {
        (i + 1..len).all(|j| {
            let along = (j - i).min(len - (j - i)) as u32;
            d[cycle[i]][cycle[j]] == along
        })
    })
}

/// Longest simple cycle of `g` whose vertex pairs are exactly as far apart
/// in `g` as along the cycle; 0 when there is none. Exponential: keep the
/// graph small.
pub fn brute_max_tight_cycle(g: &ConnectivityGraph) -> u32 {
    assert!(g.n() <= 14, "brute force is for tiny graphs");
    let d = floyd(g);
    let mut best = 0;
    let mut path = Vec::new();
    let mut on_path = vec![false; g.n()];
    // each cycle is enumerated from its smallest vertex
    for s in 0..g.n() {
        path.push(s);
        on_path[s] = true;
        extend(g, &d, s, &mut path, &mut on_path, &mut best);
        on_path[s] = false;
        path.pop();
    }
    best
}

fn extend(
    g: &ConnectivityGraph,
    d: &[Vec<u32>],
    s: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    best: &mut u32,
) {
    let last = *path.last().unwrap();
    for &w in g.neighbors(last) {
        if w == s && path.len() >= 3 && (path.len() as u32) > *best && is_tight(path, d) {
            *best = path.len() as u32;
        }
        if w > s && !on_path[w] {
            path.push(w);
            on_path[w] = true;
            extend(g, d, s, path, on_path, best);
            on_path[w] = false;
            path.pop();
        }
    }
}

/// Best rigid motion (rotation, reflection, translation) of `a` onto `b`,
/// returning the largest residual distance.
pub fn procrustes_residual(a: &[Point], b: &[Point]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ca = a.iter().fold((0.0, 0.0), |s, p| (s.0 + p.x / n, s.1 + p.y / n));
    let cb = b.iter().fold((0.0, 0.0), |s, p| (s.0 + p.x / n, s.1 + p.y / n));
    let mut best = f64::INFINITY;
    for flip in [1.0, -1.0] {
        let pa: Vec<(f64, f64)> = a.iter().map(|p| (p.x - ca.0, flip * (p.y - ca.1))).collect();
        let pb: Vec<(f64, f64)> = b.iter().map(|p| (p.x - cb.0, p.y - cb.1)).collect();
        let (mut dot, mut cross) = (0.0, 0.0);
        for (p, q) in pa.iter().zip(&pb) {
            dot += p.0 * q.0 + p.1 * q.1;
            cross += p.0 * q.1 - p.1 * q.0;
        }
        let th = cross.atan2(dot);
        let (s, c) = th.sin_cos();
        let r = pa
            .iter()
            .zip(&pb)
            .map(|(p, q)| ((c * p.0 - s * p.1 - q.0).powi(2) + (s * p.0 + c * p.1 - q.1).powi(2)).sqrt())
            .fold(0.0, f64::max);
        best = best.min(r);
    }
    best
}

/// Unit disk graph on `points` with signal classes.
pub fn udg(points: &[Point]) -> ConnectivityGraph {
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].dist(points[j]) <= 1.0 {
                edges.push((i, j));
            }
        }
    }
    ConnectivityGraph::from_edges(points.len(), edges, Some(points.to_vec()))
        .unwrap()
        .with_signal_from_positions()
        .unwrap()
}

/// A random ring-like graph: `n` points in the annulus between radii 1 and
/// 2 around the origin, linked as a unit disk graph.
pub fn random_annulus_graph(n: usize, rng: &mut impl Rng) -> ConnectivityGraph {
    let pts: Vec<Point> = (0..n)
        .map(|_| {
            let r = rng.gen_range(1.0f64..2.0);
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            Point::new(r * a.cos(), r * a.sin())
        })
        .collect();
    udg(&pts)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The desk-scale layout: 30x30 perturbed grid, UDG, cross hole.
pub fn desk_config(degree: f64) -> NetworkConfig {
    let mut c = NetworkConfig::perturbed_grid(30.0, 30.0, degree, 0);
    c.hole_mask = HolePreset::Cross.polygons(30.0, 30.0);
    c
}
