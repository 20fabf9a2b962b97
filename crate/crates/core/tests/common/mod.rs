#![allow(dead_code)]

use conley_box::conley::PreAttractorSpec;
use conley_box::rds::MapKind;
use conley_box::{BoxGrid, ChainParams, EpsilonField, RandomMapSystem, Region, SamplingSpec};

/// Window, system and parameters of the exponential-wedge translation example.
pub struct WedgeCase {
    pub grid: BoxGrid,
    pub system: RandomMapSystem,
    pub eps: EpsilonField,
    pub params: ChainParams,
    pub sampling: SamplingSpec,
    pub pre: Vec<PreAttractorSpec>,
}

pub const WEDGE_H: usize = 12;

pub fn wedge_case(half: f64, n: usize) -> WedgeCase {
    WedgeCase {
        grid: BoxGrid::new(&[[-half, half], [-half, half]], &[n, n]).unwrap(),
        system: RandomMapSystem::translation2d(),
        eps: EpsilonField::constant(0.05).unwrap(),
        params: ChainParams::new(1, 4, 1, WEDGE_H).unwrap(),
        sampling: SamplingSpec {
            interior_points: Some(4),
            seed: 7,
        },
        // translation moves 4 boxes per step, so 4·H boxes of halo cover every pullback
        pre: vec![PreAttractorSpec {
            name: "wedge".into(),
            region: Region::ExpWedge,
            halo: 4 * WEDGE_H,
            tau: None,
        }],
    }
}

pub const BISTABLE_H: usize = 20;

pub fn bistable_grid() -> BoxGrid {
    BoxGrid::new(&[[-2.0, 2.0]], &[64]).unwrap()
}

pub fn bistable_params() -> ChainParams {
    ChainParams::new(3, 6, 1, BISTABLE_H).unwrap()
}

/// The two-map system used by the index experiments: symbol 0 holds still,
/// symbol 1 translates by one unit.
pub fn still_or_shift() -> RandomMapSystem {
    RandomMapSystem::new(
        "still-or-shift",
        vec![
            MapKind::Identity { dim: 2 },
            MapKind::Translation {
                shift: vec![1.0, 0.0],
            },
        ],
    )
    .unwrap()
}

/// x ↦ x + c·(x − x³), iterated directly.
pub fn bistable_orbit(c: f64, mut x: f64, steps: usize) -> f64 {
    for _ in 0..steps {
        x += c * (x - x * x * x);
    }
    x
}
