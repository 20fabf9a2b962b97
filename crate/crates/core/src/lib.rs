//! Box-grid approximation of chain recurrence and Conley decompositions for
//! random dynamical systems driven by a finite-symbol noise shift.
//!
//! The crate is organised as a pipeline:
//!
//! * [`grid`]: uniform box grids with an absorbing exterior node, and box sets.
//! * [`rds`]: noise paths, random map systems, cocycles and box images.
//! * [`chaingraph`]: ε-chain graphs, strongly connected components and the
//!   chain recurrent set.
//! * [`conley`]: pre-attractors, attractors, basins, the decomposition and
//!   the chain-recurrence index.
//! * [`report`]: run configuration, JSON/CSV output and rasters.
//!
//! ```
//! use conley_box::{BoxGrid, BoxId};
//!
//! let grid = BoxGrid::new(&[[0.0, 1.0], [0.0, 1.0]], &[4, 4]).unwrap();
//! assert_eq!(grid.len(), 16);
//! assert_eq!(grid.box_of(&[0.3, 0.8]).unwrap(), BoxId::Interior(vec![1, 3]));
//! ```

pub mod chaingraph;
pub mod conley;
pub mod error;
pub mod grid;
pub mod rds;
pub mod report;

pub use chaingraph::{build_chain_graph, ChainGraph, ChainParams, EpsilonField, Scc};
pub use conley::{
    chain_recurrence_index, conley_decomposition, enumerate_attractors, AttractorTriple,
    ConleyDecomposition, DecompositionSetup, PreAttractorSpec, Region, SetDynamics,
};
pub use error::{Error, Result};
pub use grid::{BoxGrid, BoxId, BoxSet};
pub use rds::{
    box_image, cocycle_apply, pullback_apply, sample_omega, MapKind, NoiseLaw, NoiseModel,
    OmegaPath, RandomMapSystem, SamplingSpec,
};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/cocycles.md")]
    mod cocycles {}
    #[doc = include_str!("../../../book/src/chain-graphs.md")]
    mod chain_graphs {}
    #[doc = include_str!("../../../book/src/attractors.md")]
    mod attractors {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
