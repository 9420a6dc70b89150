mod common;

use common::{brute_max_tight_cycle, floyd, rng, udg};
use proptest::prelude::*;
use rand::Rng;
use wsn_boundary::ecbr::{
    boundary_cycles, ecbr, ecbr_classify, ecbr_classify_node, max_tight_circle, max_tight_circle_graph, mis_reduce,
    ring_subgraph, EcBrParams, RingSubgraph,
};
use wsn_boundary::network::generate;
use wsn_boundary::sim::Trial;
use wsn_boundary::truth::{Label, DEFAULT_H_MIN};
use wsn_boundary::{ConnectivityGraph, NetworkConfig, Point, Polygon, Verdict};

fn graph(n: usize, edges: &[(usize, usize)]) -> ConnectivityGraph {
    ConnectivityGraph::from_edges(n, edges.iter().copied(), None).unwrap()
}

fn arb_udg(max_n: usize, side: f64) -> impl Strategy<Value = ConnectivityGraph> {
    proptest::collection::vec((0.0..side, 0.0..side), 1..max_n)
        .prop_map(|pts| udg(&pts.into_iter().map(|(x, y)| Point::new(x, y)).collect::<Vec<_>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_is_the_second_bfs_layer(g in arb_udg(60, 5.0), pick in any::<prop::sample::Index>()) {
        let u = pick.index(g.n());
        let d = floyd(&g);
        let rs = ring_subgraph(&g, u);
        let expected: Vec<usize> = (0..g.n()).filter(|&v| d[u][v] == 2).collect();
        prop_assert_eq!(&rs.members, &expected);
        for (a, &x) in rs.members.iter().enumerate() {
            for (b, &y) in rs.members.iter().enumerate() {
                prop_assert_eq!(rs.graph.has_edge(a, b), a != b && g.has_edge(x, y));
            }
        }
    }

    #[test]
    fn refinement_only_demotes(g in arb_udg(80, 6.0), gamma in 0.0f64..=1.0) {
        let params = EcBrParams { gamma, ..EcBrParams::default() };
        let (base, _) = ecbr_classify(&g, &params).unwrap();
        let refined = ecbr(&g, &params).unwrap();
        for (b, r) in base.iter().zip(&refined) {
            prop_assert!(*r == Verdict::Interior || *b == Verdict::Boundary);
        }
    }
}

#[test]
fn spec_examples() {
    let cycle = |n: usize| graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>());
    assert_eq!(max_tight_circle_graph(&cycle(7)), 7);
    assert_eq!(max_tight_circle_graph(&cycle(3)), 3);
    let mut chord: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    chord.push((0, 3));
    let chorded = graph(6, &chord);
    assert_eq!(max_tight_circle_graph(&chorded), 4);
    assert_eq!(brute_max_tight_cycle(&chorded), 4);

    let path = graph(3, &[(0, 1), (1, 2)]);
    let rs = ring_subgraph(&path, 0);
    assert_eq!(rs.members, vec![2]);
    assert_eq!(rs.graph.m(), 0);

    let seven = mis_reduce(&RingSubgraph::from_graph(cycle(7)));
    assert_eq!(seven.graph.n(), 3);
    assert_eq!(seven.graph.m(), 3);
    let lonely = RingSubgraph::from_graph(graph(4, &[]));
    assert_eq!(mis_reduce(&lonely).graph.n(), 4);
}

/// Brute-force agreement on whole cycles of every length the oracle handles.
#[test]
fn plain_cycles_match_the_oracle() {
    for n in 3..=12 {
        let g = graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>());
        assert_eq!(max_tight_circle(&RingSubgraph::from_graph(g.clone())), brute_max_tight_cycle(&g));
    }
}

/// Triangular lattice of spacing 0.8 filling the half plane y >= 0 near the
/// origin; everything below is one large hole.
fn half_plane_fixture() -> (ConnectivityGraph, usize) {
    let mut pts = vec![Point::new(0.0, 0.0)];
    for j in 0..6 {
        for i in -6..=6 {
            let x = 0.8 * i as f64 + if j % 2 == 1 { 0.4 } else { 0.0 };
            let y = 0.8 * (3f64.sqrt() / 2.0) * j as f64;
            if (i, j) != (0, 0) && x.abs() <= 4.0 {
                pts.push(Point::new(x, y));
            }
        }
    }
    (udg(&pts), 0)
}

#[test]
fn node_beside_a_large_hole_is_boundary() {
    let (g, u) = half_plane_fixture();
    let rs = ring_subgraph(&g, u);
    assert!(rs.members.len() <= 14, "ring too large for the oracle: {}", rs.members.len());
    assert!(brute_max_tight_cycle(&rs.graph) < 6);
    assert_eq!(ecbr_classify_node(&g, u, &EcBrParams::default()), Verdict::Boundary);
}

#[test]
fn dense_interior_node_is_interior() {
    let trial = Trial::generate(&common::desk_config(12.0), 3, DEFAULT_H_MIN).unwrap();
    let params = EcBrParams::default();
    let interior: Vec<usize> = (0..trial.graph.n()).filter(|&u| trial.truth.labels[u] == Label::Interior).collect();
    let hits = interior.iter().filter(|&&u| ecbr_classify_node(&trial.graph, u, &params) == Verdict::Interior).count();
    assert!(hits * 10 >= interior.len() * 9, "{hits} of {}", interior.len());
}

#[test]
fn mis_reduction_agrees_on_generated_rings() {
    let trial = Trial::generate(&common::desk_config(12.0), 11, DEFAULT_H_MIN).unwrap();
    let mut r = rng(5);
    let full = EcBrParams::default();
    let reduced = EcBrParams { use_mis_reduction: true, ..full };
    let samples = 600;
    let mut agree = 0;
    for _ in 0..samples {
        let u = r.gen_range(0..trial.graph.n());
        agree += usize::from(ecbr_classify_node(&trial.graph, u, &full) == ecbr_classify_node(&trial.graph, u, &reduced));
    }
    let rate = agree as f64 / samples as f64;
    assert!(rate >= 0.95, "agreement {rate}");
}

#[test]
fn verdicts_are_robust_to_the_threshold() {
    for (k, degree) in [12.0, 15.0, 18.0, 21.0].into_iter().enumerate() {
        let g = generate(&common::desk_config(degree).with_seed(40 + k as u64)).unwrap();
        let (_, lengths) = ecbr_classify(&g, &EcBrParams::default()).unwrap();
        let at = |t: u32| lengths.iter().map(|&l| l >= t).collect::<Vec<_>>();
        let six = at(6);
        for t in [5, 7] {
            let changed = at(t).iter().zip(&six).filter(|(a, b)| a != b).count();
            let frac = changed as f64 / g.n() as f64;
            assert!(frac < 0.03, "d_avg {degree}, threshold {t}: {frac}");
        }
    }
}

#[test]
fn rectangular_hole_gives_two_cycles() {
    let mut config = NetworkConfig::perturbed_grid(24.0, 18.0, 12.0, 9);
    config.hole_mask = vec![Polygon::rect(8.0, 6.0, 16.0, 12.0)];
    let g = generate(&config).unwrap();
    let (base, _) = ecbr_classify(&g, &EcBrParams::default()).unwrap();
    let candidates: Vec<bool> = base.iter().map(|&v| v == Verdict::Boundary).collect();
    let cycles = boundary_cycles(&g, &candidates, 6);
    assert_eq!(cycles.len(), 2, "lengths {:?}", cycles.iter().map(Vec::len).collect::<Vec<_>>());
    for c in &cycles {
        assert!(c.len() >= 6);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
            assert!(candidates[c[i]]);
        }
    }
    // one around the hole, one along the outer border
    let pos = g.positions().unwrap();
    let inside_hole_box = |c: &Vec<usize>| c.iter().all(|&v| (6.0..=18.0).contains(&pos[v].x) && (4.0..=14.0).contains(&pos[v].y));
    assert_eq!(cycles.iter().filter(|c| inside_hole_box(c)).count(), 1);

    assert!(boundary_cycles(&g, &vec![false; g.n()], 6).is_empty());
}
