//! Library results checked against naive reference computations written
//! independently of the crate internals.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use conley_box::conley::SetDynamics;
use conley_box::Region;
use conley_box::rds::{pullback_apply, sample_points};
use conley_box::{
    build_chain_graph, BoxGrid, BoxSet, ChainGraph, ChainParams, EpsilonField, OmegaPath, RandomMapSystem,
    SamplingSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Boolean transitive closure with paths of length ≥ 1.
fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

proptest! {
    #[test]
    fn recurrence_matches_transitive_closure(
        n in 1usize..14,
        raw in prop::collection::vec((0usize..14, 0usize..14), 0..40),
    ) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let g = ChainGraph::from_edges(n, edges.iter().copied());
        let r = closure(n, &edges);
        let cr: Vec<usize> = (0..n).filter(|&v| r[v][v]).collect();
        prop_assert_eq!(g.chain_recurrent_set().to_indices(), cr);
        for v in 0..n {
            let reach: Vec<usize> = (0..n).filter(|&w| r[v][w]).collect();
            prop_assert_eq!(g.forward_reachable(v).to_indices(), reach);
        }
        let scc = g.scc();
        for v in 0..n {
            for w in 0..n {
                let same = v == w || (r[v][w] && r[w][v]);
                prop_assert_eq!(scc.component[v] == scc.component[w], same);
            }
        }
    }
}

/// Edges of the chain graph computed box pair by box pair.
fn naive_edges(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    eps: f64,
    params: &ChainParams,
    omega: &OmegaPath,
    sampling: &SamplingSpec,
) -> BTreeSet<(usize, usize)> {
    let d = grid.dim();
    let lo = grid.lower().to_vec();
    let hi = grid.upper().to_vec();
    let res = grid.resolution().to_vec();
    let w: Vec<f64> = (0..d).map(|k| (hi[k] - lo[k]) / res[k] as f64).collect();
    let half_diam = 0.5 * w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unflatten = |mut f: usize| -> Vec<usize> {
        (0..d)
            .map(|k| {
                let i = f % res[k];
                f /= res[k];
                i
            })
            .collect()
    };
    let ext = grid.len();
    let mut out = BTreeSet::new();
    for b in 0..grid.len() {
        for t in params.min_step..=params.t_max {
            let pts = sample_points(grid, b, t, sampling);
            for p in pts.chunks(d) {
                let q = pullback_apply(system, t, omega, p).unwrap();
                if (0..d).any(|k| q[k] < lo[k] || q[k] > hi[k]) {
                    out.insert((b, ext));
                }
                for b2 in 0..grid.len() {
                    let idx = unflatten(b2);
                    let dist2: f64 = (0..d)
                        .map(|k| {
                            let a = lo[k] + idx[k] as f64 * w[k];
                            let z = lo[k] + (idx[k] + 1) as f64 * w[k];
                            let gap = (a - q[k]).max(q[k] - z).max(0.0);
                            gap * gap
                        })
                        .sum();
                    if dist2.sqrt() < eps + half_diam {
                        out.insert((b, b2));
                    }
                }
            }
        }
    }
    out.insert((ext, ext));
    out
}

#[test]
fn chain_graph_matches_pairwise_edge_rule() {
    let cases: Vec<(RandomMapSystem, BoxGrid)> = vec![
        (
            RandomMapSystem::translation2d(),
            BoxGrid::new(&[[-2.0, 2.0], [-2.0, 2.0]], &[6, 5]).unwrap(),
        ),
        (
            RandomMapSystem::contraction2d(0.5),
            BoxGrid::new(&[[-1.0, 1.0], [-1.0, 1.0]], &[5, 5]).unwrap(),
        ),
        (RandomMapSystem::bistable1d(0.5), BoxGrid::new(&[[-2.0, 2.0]], &[17]).unwrap()),
    ];
    let params = ChainParams::new(1, 3, 1, 3).unwrap();
    let sampling = SamplingSpec {
        interior_points: Some(3),
        seed: 11,
    };
    for (system, grid) in cases {
        let omega = OmegaPath::constant(0, 3);
        for eps in [0.01, 0.3] {
            let field = EpsilonField::constant(eps).unwrap();
            let g = build_chain_graph(&system, &grid, &field, &params, &omega, &sampling).unwrap();
            let got: BTreeSet<(usize, usize)> = g.edges().collect();
            assert_eq!(got, naive_edges(&system, &grid, eps, &params, &omega, &sampling), "{}", system.name());
        }
    }
}

#[test]
fn contraction_attractor_is_the_boxes_around_zero() {
    for n in [4usize, 6, 8, 16] {
        let grid = BoxGrid::new(&[[-1.0, 1.0]], &[n]).unwrap();
        let system = RandomMapSystem::contraction1d(0.5);
        let omega = OmegaPath::constant(0, 12);
        let params = ChainParams::new(1, 4, 1, 12).unwrap();
        let dynamics = SetDynamics::new(&system, &grid, &omega, params, SamplingSpec::new(2), 0.0).unwrap();
        let a = dynamics.attractor(&BoxSet::full(n), 1).unwrap();
        // closure of box i is [−1 + 2i/n, −1 + 2(i+1)/n]
        let expected: Vec<usize> = (0..n)
            .filter(|&i| {
                let lo = -1.0 + 2.0 * i as f64 / n as f64;
                let hi = -1.0 + 2.0 * (i + 1) as f64 / n as f64;
                lo <= 0.0 && 0.0 <= hi
            })
            .collect();
        assert_eq!(a.set.to_indices(), expected, "n = {n}");
        // every orbit reaches the middle boxes
        let middle = BoxSet::from_nodes(n, expected.iter().copied());
        assert_eq!(dynamics.basin(&middle).len(), n);
    }
}

#[test]
fn bistable_basins_follow_orbits() {
    let grid = common::bistable_grid();
    let system = RandomMapSystem::bistable1d(0.5);
    let omega = OmegaPath::constant(0, common::BISTABLE_H);
    let dynamics =
        SetDynamics::new(&system, &grid, &omega, common::bistable_params(), SamplingSpec::new(3), 0.0).unwrap();
    let left = grid.node_of(&[-1.0]);
    let right = grid.node_of(&[1.0]);
    // small closed neighbourhoods of the two stable points
    let u_left = BoxSet::from_nodes(64, [left - 1, left, left + 1]);
    let u_right = BoxSet::from_nodes(64, [right - 1, right, right + 1]);
    let b_left = dynamics.basin(&u_left);
    let b_right = dynamics.basin(&u_right);
    let mut decided = 0;
    for b in 0..grid.len() {
        // boxes straddling a preimage of 0 are left undecided
        let (lo, hi) = grid.box_extent(b);
        let limits: Vec<f64> = (0..=16)
            .map(|k| common::bistable_orbit(0.5, lo[0] + (hi[0] - lo[0]) * k as f64 / 16.0, 200))
            .collect();
        let limit = if limits.iter().all(|&l| l < -0.5) {
            -1.0
        } else if limits.iter().all(|&l| l > 0.5) {
            1.0
        } else {
            continue;
        };
        decided += 1;
        if limit < -0.5 {
            assert!(b_left.contains(b) && !b_right.contains(b), "box {b}");
        } else if limit > 0.5 {
            assert!(b_right.contains(b) && !b_left.contains(b), "box {b}");
        }
    }
    assert!(decided >= 56, "{decided}");
}

#[test]
fn sampled_images_contain_sampled_orbits() {
    // every random point of a box, pushed forward, lands in the box image
    let grid = BoxGrid::new(&[[-3.0, 3.0], [-3.0, 3.0]], &[12, 12]).unwrap();
    let system = RandomMapSystem::contraction2d(0.7);
    let omega = OmegaPath::constant(0, 5);
    let sampling = SamplingSpec::new(0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let b = rng.gen_range(0..grid.len());
        let (lo, hi) = grid.box_extent(b);
        let p: Vec<f64> = (0..2).map(|k| rng.gen_range(lo[k]..hi[k])).collect();
        let t = rng.gen_range(1..=5);
        let img = conley_box::box_image(&system, &grid, t, &omega, b, &sampling, 0.0).unwrap();
        let q = pullback_apply(&system, t, &omega, &p).unwrap();
        // a contraction by 0.7ᵗ maps the box into at most a box-sized region around its centre image
        let c = pullback_apply(&system, t, &omega, &grid.center(b)).unwrap();
        assert!(img.contains(grid.node_of(&c)));
        let near = img.iter().any(|n| grid.distance_to_box(&q, n) <= 0.5 * grid.diameter());
        assert!(near);
    }
}

#[test]
fn lazy_recurrence_agrees_with_full_graph() {
    let grid = BoxGrid::new(&[[-2.0, 2.0], [-2.0, 2.0]], &[10, 10]).unwrap();
    let params = ChainParams::new(1, 3, 1, 3).unwrap();
    let sampling = SamplingSpec::new(4);
    let eps = EpsilonField::constant(0.1).unwrap();
    let omega = OmegaPath::constant(0, 3);
    for sys in [
        RandomMapSystem::translation2d(),
        RandomMapSystem::contraction2d(0.5),
        RandomMapSystem::identity(2),
    ] {
        let cr = build_chain_graph(&sys, &grid, &eps, &params, &omega, &sampling)
            .unwrap()
            .chain_recurrent_set();
        for b in 0..grid.len() {
            let lazy = conley_box::chaingraph::is_recurrent_node(&sys, &grid, &eps, &params, &omega, &sampling, b).unwrap();
            assert_eq!(lazy, cr.contains(b), "{} box {b}", sys.name());
        }
    }
}

#[test]
fn noncompact_basin_depends_on_pre_attractor() {
    // regression fixture: on [-2.5, 2.5] the bistable map throws the outer
    // boxes out of the window, so adding the exterior to a neighbourhood of
    // -1 keeps the attractor but enlarges the basin
    let grid = BoxGrid::new(&[[-2.5, 2.5]], &[80]).unwrap();
    let system = RandomMapSystem::bistable1d(0.5);
    let omega = OmegaPath::constant(0, common::BISTABLE_H);
    let dynamics =
        SetDynamics::new(&system, &grid, &omega, common::bistable_params(), SamplingSpec::new(2), 0.0).unwrap();
    let near = Region::Rect {
        lower: vec![-1.1],
        upper: vec![-0.9],
    };
    let u1 = near.covering(&grid).unwrap();
    let mut u2 = u1.clone();
    u2.insert_exterior();
    for u in [&u1, &u2] {
        assert!(dynamics.is_pre_attractor(u, 1).unwrap().holds);
    }
    let a1 = dynamics.attractor(&u1, 1).unwrap().set;
    let a2 = dynamics.attractor(&u2, 1).unwrap().set;
    assert_eq!(a1, a2);
    assert!(!a1.is_empty());
    let (b1, b2) = (dynamics.basin(&u1), dynamics.basin(&u2));
    assert!(b1.is_subset(&b2));
    assert!(b2.without_exterior().len() > b1.len(), "{} vs {}", b2.len(), b1.len());
}
