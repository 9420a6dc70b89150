//! Local virtual coordinates by classical (Torgerson) multidimensional
//! scaling.
//!
//! The embedded neighborhoods are tiny (tens to a few hundred nodes), so
//! the two dominant eigenpairs of the double-centered Gram matrix are found
//! by orthogonal power iteration on a two-column block instead of a full
//! eigendecomposition.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{ConnectivityGraph, SignalClass};

/// Symmetric matrix of nonnegative distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, d: vec![0.0; n * n] }
    }

    /// From a full row-major matrix; checks symmetry, zero diagonal and
    /// finiteness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidConfig(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidConfig(format!("entry ({i},{j}) = {x} is not a distance")));
                }
                m.d[i * n + j] = x;
            }
        }
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidConfig(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidConfig(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(m)
    }

    /// Euclidean distances between `points`.
    pub fn euclidean(points: &[Point]) -> Self {
        let n = points.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..i {
                let x = points[i].dist(points[j]);
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.d[i * self.n + j] = x;
        self.d[j * self.n + i] = x;
    }
}

/// Which distances feed the embedding of a node's neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmbeddingVariant {
    /// Hop distances on the 2-hop neighborhood (default).
    #[serde(rename = "MDS", alias = "MDS2", alias = "mds", alias = "mds2")]
    Mds2,
    /// Hop distances on the 3-hop neighborhood.
    #[serde(rename = "MDS3", alias = "mds3")]
    Mds3,
    /// Signal-strength distances (0.5 strong, 1.0 weak) on the 2-hop
    /// neighborhood.
    #[serde(rename = "SSMDS", alias = "ssmds")]
    Ssmds,
    /// True node positions; no embedding.
    #[serde(rename = "OPT", alias = "opt")]
    Opt,
}

impl EmbeddingVariant {
    pub const ALL: [EmbeddingVariant; 4] =
        [EmbeddingVariant::Mds2, EmbeddingVariant::Mds3, EmbeddingVariant::Ssmds, EmbeddingVariant::Opt];

    /// Neighborhood radius gathered for this variant.
    pub fn hops(self) -> u32 {
        match self {
            EmbeddingVariant::Mds3 => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EmbeddingVariant::Mds2 => "MDS",
            EmbeddingVariant::Mds3 => "MDS3",
            EmbeddingVariant::Ssmds => "SSMDS",
            EmbeddingVariant::Opt => "OPT",
        }
    }
}

impl std::str::FromStr for EmbeddingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MDS" | "MDS2" => Ok(EmbeddingVariant::Mds2),
            "MDS3" => Ok(EmbeddingVariant::Mds3),
            "SSMDS" => Ok(EmbeddingVariant::Ssmds),
            "OPT" => Ok(EmbeddingVariant::Opt),
            _ => Err(Error::InvalidConfig(format!("unknown embedding variant `{s}`"))),
        }
    }
}

/// Virtual coordinates for a neighborhood, indexed like the view it was
/// computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEmbedding {
    pub coords: Vec<Point>,
    pub center: usize,
}

/// All-pairs hop counts. Fails if `sub` is disconnected.
pub fn hop_distance_matrix(sub: &ConnectivityGraph) -> Result<DistanceMatrix> {
    let n = sub.n();
    let mut m = DistanceMatrix::zeros(n);
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.fill(u32::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in sub.neighbors(v) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for t in 0..n {
            if dist[t] == u32::MAX {
                return Err(Error::Disconnected(t));
            }
            m.d[s * n + t] = dist[t] as f64;
        }
    }
    Ok(m)
}

/// Shortest-path distances with strong links at 0.5 and weak links at 1.0.
pub fn signal_distance_matrix(sub: &ConnectivityGraph) -> Result<DistanceMatrix> {
    if !sub.has_signal() {
        return Err(Error::MissingData("edge signal classes"));
    }
    let n = sub.n();
    let mut m = DistanceMatrix::zeros(n);
    // Work in half-units so that weights are the integers 1 and 2.
    let mut dist = vec![u32::MAX; n];
    for s in 0..n {
        dist.fill(u32::MAX);
        dist[s] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u32, s))]);
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            let sig = sub.neighbor_signals(v).expect("checked above");
            for (&w, &c) in sub.neighbors(v).iter().zip(sig) {
                let step = match c {
                    SignalClass::Strong => 1,
                    SignalClass::Weak => 2,
                };
                if d + step < dist[w] {
                    dist[w] = d + step;
                    heap.push(Reverse((d + step, w)));
                }
            }
        }
        for t in 0..n {
            if dist[t] == u32::MAX {
                return Err(Error::Disconnected(t));
            }
            m.d[s * n + t] = dist[t] as f64 * 0.5;
        }
    }
    Ok(m)
}

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;
/// Largest accepted eigen-residual, relative to the dominant eigenvalue.
const RESIDUAL_TOLERANCE: f64 = 1e-3;

/// Classical MDS into the plane: `B = -1/2 J D² J`, coordinates from the two
/// largest eigenpairs scaled by the square roots of their eigenvalues.
/// Negative eigenvalues clamp to zero, collapsing that axis.
pub fn classical_mds_2d(m: &DistanceMatrix) -> Result<Vec<Point>> {
    let n = m.n();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let b = double_center(m);
    let [(l1, v1), (l2, v2)] = top_two_eigenpairs(&b, n)?;
    let (s1, s2) = (l1.max(0.0).sqrt(), l2.max(0.0).sqrt());
    Ok((0..n).map(|i| Point::new(s1 * v1[i], s2 * v2[i])).collect())
}

fn double_center(m: &DistanceMatrix) -> Vec<f64> {
    let n = m.n();
    let mut sq: Vec<f64> = m.d.iter().map(|x| x * x).collect();
    let row_mean: Vec<f64> = (0..n).map(|i| sq[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let total = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            // symmetric input, so column means equal row means
            sq[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + total);
        }
    }
    sq
}

fn matvec(a: &[f64], n: usize, shift: f64, x: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + shift * x[i];
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes `v` against `basis` in place; returns the residual norm
/// before normalization.
fn orthonormalize(v: &mut [f64], basis: &[&[f64]]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            v.iter_mut().zip(q.iter()).for_each(|(x, y)| *x -= c * y);
        }
    }
    let r = norm(v);
    if r > 0.0 {
        v.iter_mut().for_each(|x| *x /= r);
    }
    r
}

/// Eigen-decomposition of the symmetric 2x2 matrix `[[a, b], [b, c]]`,
/// larger eigenvalue first, as `(values, rotation)` where the columns of
/// the rotation are the eigenvectors.
fn sym2_eigen(a: f64, b: f64, c: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let mean = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    let (l1, l2) = (mean + r, mean - r);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    ([l1, l2], [[co, -s], [s, co]])
}

/// Fixed pseudo-random start block. Structured starts such as the all-ones
/// vector or basis vectors can sit inside an invariant subspace of a
/// symmetric neighborhood and miss a dominant eigenvector entirely.
fn start_block(n: usize) -> [Vec<f64>; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d64_735f_7374_6172);
    let mut q1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut q2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthonormalize(&mut q1, &[]);
    orthonormalize(&mut q2, &[&q1]);
    [q1, q2]
}

/// The two algebraically largest eigenpairs of the symmetric `n x n`
/// matrix `b` (row-major), larger first.
pub(crate) fn top_two_eigenpairs(b: &[f64], n: usize) -> Result<[(f64, Vec<f64>); 2]> {
    // Power iteration converges to the eigenvalues of largest magnitude. If
    // one of those is negative, rerun on b + ρI, which is positive
    // semidefinite and ranks eigenvalues algebraically. Pairs of equal
    // magnitude and opposite sign, or near ties below the top two, can stall
    // it; Jacobi rotations settle those.
    let power = block_power(b, n, 0.0).and_then(|(vals, vecs)| {
        if vals[1] < 0.0 {
            block_power(b, n, vals[0].abs().max(vals[1].abs()))
        } else {
            Ok((vals, vecs))
        }
    });
    let (vals, [v1, v2]) = match power {
        Ok(p) => p,
        Err(Error::NoConvergence(_)) => jacobi_top_two(b, n)?,
        Err(e) => return Err(e),
    };
    Ok([(vals[0], v1), (vals[1], v2)])
}

const JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-decomposition, reduced to the two algebraically
/// largest eigenpairs.
fn jacobi_top_two(b: &[f64], n: usize) -> Result<([f64; 2], [Vec<f64>; 2])> {
    let mut a = b.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].powi(2)).sum();
        if off <= 1e-24 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    let column = |c: usize| (0..n).map(|k| v[k * n + c]).collect::<Vec<f64>>();
    Ok(([a[order[0] * n + order[0]], a[order[1] * n + order[1]]], [column(order[0]), column(order[1])]))
}

fn block_power(b: &[f64], n: usize, shift: f64) -> Result<([f64; 2], [Vec<f64>; 2])> {
    let [mut q1, mut q2] = start_block(n);
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut prev = [f64::NAN; 2];
    for iter in 0..MAX_ITERATIONS {
        matvec(b, n, shift, &q1, &mut w1);
        matvec(b, n, shift, &q2, &mut w2);
        // Rayleigh-Ritz on span{q1, q2} for the unshifted matrix
        let h11 = dot(&q1, &w1) - shift;
        let h12 = dot(&q1, &w2);
        let h22 = dot(&q2, &w2) - shift;
        let (vals, rot) = sym2_eigen(h11, h12, h22);

        let scale = vals[0].abs().max(vals[1].abs()).max(1.0);
        let done = iter > 0
            && (vals[0] - prev[0]).abs() <= TOLERANCE * scale
            && (vals[1] - prev[1]).abs() <= TOLERANCE * scale;
        prev = vals;
        // rotate the current block into Ritz vectors
        let r1: Vec<f64> = (0..n).map(|i| rot[0][0] * q1[i] + rot[1][0] * q2[i]).collect();
        let r2: Vec<f64> = (0..n).map(|i| rot[0][1] * q1[i] + rot[1][1] * q2[i]).collect();
        if done {
            // a stable Ritz value can still be a blend of two eigenvalues of
            // equal magnitude; only accept true eigenpairs
            let residual = |k: usize, r: &[f64]| {
                (0..n)
                    .map(|i| rot[0][k] * w1[i] + rot[1][k] * w2[i] - (shift + vals[k]) * r[i])
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            };
            if residual(0, &r1).max(residual(1, &r2)) > RESIDUAL_TOLERANCE * scale {
                return Err(Error::NoConvergence(iter + 1));
            }
            return Ok((vals, [r1, r2]));
        }
        // next block: orthonormalized image
        std::mem::swap(&mut q1, &mut w1);
        std::mem::swap(&mut q2, &mut w2);
        let r = orthonormalize(&mut q1, &[]);
        if r == 0.0 {
            // matrix annihilates the block: the spectrum is zero here
            return Ok(([0.0, 0.0], [r1, r2]));
        }
        let r = orthonormalize(&mut q2, &[&q1]);
        if r <= 1e-300 {
            q2 = r2;
            orthonormalize(&mut q2, &[&q1]);
        }
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}
