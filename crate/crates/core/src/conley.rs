//! Pre-attractors, attractors, basins and the Conley decomposition on box
//! sets.
//!
//! For a box set `U` (optionally containing the exterior node) and a lag τ:
//!
//! * `U` is a pre-attractor when every pullback image `φ(t, θ_{-t} ω) U` with
//!   `τ ≤ t ≤ H` lands inside `U`.
//! * The attractor is `A = ⋂_n U(nτ)` with
//!   `U(s) = ⋃_{s ≤ t ≤ H} φ(t, θ_{-t} ω) U`; the sequence `U(nτ)` is
//!   nonincreasing by construction and is iterated until it stops changing.
//! * The basin `B(A, U)` holds the boxes whose forward image `φ(t, ω) b`
//!   lies entirely inside `U` for some `0 ≤ t ≤ H`.
//!
//! Candidate pre-attractors are the forward-reachable sets of the chain
//! graph, one per box, plus the whole space. The decomposition compares
//! `X − CR` with `⋃ (B − A)` and reports the symmetric difference.

use std::collections::HashSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaingraph::{build_chain_graph, is_recurrent_node, ChainGraph, ChainParams, EpsilonField};
use crate::error::{Error, Result};
use crate::grid::{BoxGrid, BoxSet};
use crate::rds::{
    image_nodes, sample_omega, sample_points, sub_seed, Direction, NoiseModel, OmegaPath,
    RandomMapSystem, SamplingSpec,
};

/// Per-box image lists for times `0..=H`, filled on demand; the row of
/// `(t, b)` holds the sorted nodes met by the time-`t` image of `b`.
#[derive(Debug)]
struct ImageTable {
    direction: Direction,
    nodes: usize,
    cells: Vec<OnceLock<Vec<usize>>>,
}

impl ImageTable {
    fn new(direction: Direction, horizon: usize, nodes: usize) -> Self {
        ImageTable {
            direction,
            nodes,
            cells: (0..(horizon + 1) * nodes).map(|_| OnceLock::new()).collect(),
        }
    }
}

/// Box-set dynamics of one system on one grid along one noise path.
pub struct SetDynamics<'a> {
    system: &'a RandomMapSystem,
    grid: &'a BoxGrid,
    omega: &'a OmegaPath,
    params: ChainParams,
    sampling: SamplingSpec,
    pad: f64,
    pullback: ImageTable,
    forward: ImageTable,
    one_step: OnceLock<Vec<Vec<Vec<usize>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreAttractorCheck {
    pub holds: bool,
    /// First `(t, node)` found with the time-`t` image of `U` leaving `U`.
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractorResult {
    /// The attractor with the exterior stripped; may be empty.
    pub set: BoxSet,
    /// Number of lagged image sets computed.
    pub iterations: usize,
    /// Set when the iteration hit the horizon before stabilizing.
    pub truncated: bool,
    /// Whether every lagged image set was contained in the previous one.
    pub monotone: bool,
}

impl<'a> SetDynamics<'a> {
    pub fn new(
        system: &'a RandomMapSystem,
        grid: &'a BoxGrid,
        omega: &'a OmegaPath,
        params: ChainParams,
        sampling: SamplingSpec,
        pad: f64,
    ) -> Result<Self> {
        params.validate()?;
        if system.dim() != grid.dim() {
            return Err(Error::Dimension {
                expected: grid.dim(),
                found: system.dim(),
            });
        }
        if !(pad >= 0.0 && pad.is_finite()) {
            return Err(Error::config("image_pad", "pad must be finite and nonnegative"));
        }
        let h = params.horizon as i64;
        omega.symbol(-h)?;
        omega.symbol(h - 1)?;
        Ok(SetDynamics {
            system,
            grid,
            omega,
            params,
            sampling,
            pad,
            pullback: ImageTable::new(Direction::Pullback, params.horizon, grid.node_count()),
            forward: ImageTable::new(Direction::Forward, params.horizon, grid.node_count()),
            one_step: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &BoxGrid {
        self.grid
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    fn row<'t>(&self, table: &'t ImageTable, t: usize, b: usize) -> &'t [usize] {
        table.cells[t * table.nodes + b].get_or_init(|| {
            if t == 0 || b == self.grid.exterior() {
                return vec![b];
            }
            let mut out = Vec::new();
            image_nodes(
                self.system, self.grid, t, self.omega, b, &self.sampling, self.pad, table.direction, &mut out,
            )
            .expect("noise window checked at construction");
            out.sort_unstable();
            out.dedup();
            out
        })
    }

    /// Fills the rows of every node of `set` at time `t`, in parallel.
    fn fill(&self, table: &ImageTable, t: usize, set: &BoxSet) {
        let missing: Vec<usize> = set
            .nodes()
            .filter(|&b| table.cells[t * table.nodes + b].get().is_none())
            .collect();
        missing.par_iter().for_each(|&b| {
            self.row(table, t, b);
        });
    }

    fn union_of_rows(&self, table: &ImageTable, set: &BoxSet, t: usize) -> BoxSet {
        self.fill(table, t, set);
        let mut out = BoxSet::empty(self.grid.len());
        for b in set.nodes() {
            for &n in self.row(table, t, b) {
                out.insert(n);
            }
        }
        out
    }

    /// One-step images under each symbol read by the slots `-H .. -1`.
    fn one_step_rows(&self) -> &Vec<Vec<Vec<usize>>> {
        self.one_step.get_or_init(|| {
            let symbols = self
                .omega
                .symbols_in(-(self.params.horizon as i64), 0)
                .expect("noise window checked at construction");
            let d = self.grid.dim();
            symbols
                .into_iter()
                .map(|s| {
                    let map = self.system.map_for(s);
                    let mut rows: Vec<Vec<usize>> = (0..self.grid.len())
                        .into_par_iter()
                        .map(|b| {
                            let mut pts = sample_points(self.grid, b, 1, &self.sampling);
                            let mut out = Vec::new();
                            for p in pts.chunks_mut(d) {
                                map.apply(p);
                                push_near(self.grid, p, self.pad, &mut out);
                            }
                            out.sort_unstable();
                            out.dedup();
                            out
                        })
                        .collect();
                    rows.push(vec![self.grid.exterior()]);
                    rows
                })
                .collect()
        })
    }

    /// Sampled pullback image φ(t, θ_{-t} ω) of a box set.
    pub fn image(&self, set: &BoxSet, t: usize) -> Result<BoxSet> {
        self.check_time(t)?;
        Ok(self.union_of_rows(&self.pullback, set, t))
    }

    /// Sampled forward image φ(t, ω) of a box set.
    pub fn forward_image(&self, set: &BoxSet, t: usize) -> Result<BoxSet> {
        self.check_time(t)?;
        Ok(self.union_of_rows(&self.forward, set, t))
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t > self.params.horizon {
            return Err(Error::WindowExhausted {
                slot: -(t as i64),
                first: -(self.params.horizon as i64),
                end: self.params.horizon as i64,
            });
        }
        Ok(())
    }

    /// Smallest superset of `set` closed under the one-step box map of every
    /// symbol occurring in the slots `-H .. -1`.
    pub fn forward_invariant_hull(&self, set: &BoxSet) -> BoxSet {
        let tables = self.one_step_rows();
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.nodes().collect();
        while let Some(b) = stack.pop() {
            for rows in tables {
                for &n in &rows[b] {
                    if !out.contains(n) {
                        out.insert(n);
                        stack.push(n);
                    }
                }
            }
        }
        out
    }

    pub fn is_forward_invariant(&self, set: &BoxSet) -> bool {
        self.one_step_rows()
            .iter()
            .all(|rows| set.nodes().all(|b| rows[b].iter().all(|&n| set.contains(n))))
    }

    /// Checks that the pullback image of `u` at every `t ∈ [tau, H]` lies in `u`.
    pub fn is_pre_attractor(&self, u: &BoxSet, tau: usize) -> Result<PreAttractorCheck> {
        if tau == 0 {
            return Err(Error::config("tau", "tau must be at least 1"));
        }
        let table = &self.pullback;
        for t in tau..=self.params.horizon {
            self.fill(table, t, u);
            for b in u.nodes() {
                if let Some(&n) = self.row(table, t, b).iter().find(|&&n| !u.contains(n)) {
                    return Ok(PreAttractorCheck {
                        holds: false,
                        witness: Some((t, n)),
                    });
                }
            }
        }
        Ok(PreAttractorCheck {
            holds: true,
            witness: None,
        })
    }

    /// The local attractor determined by `u` with lag `tau`.
    pub fn attractor(&self, u: &BoxSet, tau: usize) -> Result<AttractorResult> {
        if tau == 0 {
            return Err(Error::config("tau", "tau must be at least 1"));
        }
        let h = self.params.horizon;
        if tau > h {
            return Err(Error::config("tau", format!("tau ({tau}) exceeds the horizon ({h})")));
        }
        // tails[i] = U(tau + i) = ⋃_{tau + i ≤ t ≤ H} image_t(U)
        let mut tails = vec![BoxSet::empty(self.grid.len()); h - tau + 2];
        for t in (tau..=h).rev() {
            let img = self.image(u, t)?;
            let i = t - tau;
            tails[i] = img.union(&tails[i + 1]);
        }
        let mut current = tails[0].clone();
        let mut iterations = 1;
        let mut monotone = true;
        let mut n = 2;
        while n * tau <= h {
            let next = &tails[n * tau - tau];
            monotone &= next.is_subset(&current);
            iterations += 1;
            if *next == current {
                return Ok(AttractorResult {
                    set: current.without_exterior(),
                    iterations,
                    truncated: false,
                    monotone,
                });
            }
            current.intersect_with(next);
            n += 1;
        }
        Ok(AttractorResult {
            set: current.without_exterior(),
            iterations,
            truncated: true,
            monotone,
        })
    }

    /// Boxes whose forward image lies inside `u` at some `t ∈ [0, H]`.
    /// Always contains `u`.
    pub fn basin(&self, u: &BoxSet) -> BoxSet {
        let table = &self.forward;
        let everything = BoxSet::full(self.grid.len());
        for t in 0..=self.params.horizon {
            self.fill(table, t, &everything);
        }
        let mut out = BoxSet::empty(self.grid.len());
        for b in 0..self.grid.node_count() {
            if (0..=self.params.horizon).any(|t| self.row(table, t, b).iter().all(|&n| u.contains(n))) {
                out.insert(b);
            }
        }
        out
    }
}

fn push_near(grid: &BoxGrid, p: &[f64], pad: f64, out: &mut Vec<usize>) {
    let inside = grid.contains_point(p);
    if !inside {
        out.push(grid.exterior());
    }
    if pad > 0.0 || inside {
        grid.for_each_box_near(p, pad, false, |b| out.push(b));
    }
}

/// Where a candidate pre-attractor came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleSource {
    /// Chain end points of all chains starting in this node.
    Reachable(usize),
    WholeSpace,
    /// A named region supplied by the caller.
    Region(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorTriple {
    /// Pre-attractor; keeps the exterior flag.
    pub u: BoxSet,
    /// Local attractor; interior boxes only.
    pub a: BoxSet,
    /// Basin; keeps the exterior flag.
    pub b: BoxSet,
    pub tau: usize,
    pub iterations: usize,
    pub truncated: bool,
    pub monotone: bool,
    pub source: TripleSource,
}

/// Attractor triples of the forward-reachable sets of `graph` that pass the
/// pre-attractor test, plus the whole-space triple. Triples with equal
/// attractors are merged, keeping the largest basin.
pub fn enumerate_attractors(dynamics: &SetDynamics<'_>, graph: &ChainGraph) -> Result<Vec<AttractorTriple>> {
    let grid = dynamics.grid();
    if graph.interior_count() != grid.len() {
        return Err(Error::InvalidGrid("chain graph and grid disagree on box count".into()));
    }
    let tau = dynamics.params().tau;
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for node in 0..graph.interior_count() {
        let u = graph.forward_reachable(node);
        if !u.is_empty() && seen.insert(u.clone()) {
            candidates.push((u, TripleSource::Reachable(node)));
        }
    }
    let whole = BoxSet::full(grid.len());
    if seen.insert(whole.clone()) {
        candidates.push((whole, TripleSource::WholeSpace));
    } else if let Some(c) = candidates.iter_mut().find(|(u, _)| u.len() == grid.len() && u.contains_exterior()) {
        c.1 = TripleSource::WholeSpace;
    }

    let triples: Vec<Option<AttractorTriple>> = candidates
        .into_par_iter()
        .map(|(u, source)| -> Result<Option<AttractorTriple>> {
            if !dynamics.is_pre_attractor(&u, tau)?.holds {
                return Ok(None);
            }
            let a = dynamics.attractor(&u, tau)?;
            let b = dynamics.basin(&u);
            Ok(Some(AttractorTriple {
                u,
                a: a.set,
                b,
                tau,
                iterations: a.iterations,
                truncated: a.truncated,
                monotone: a.monotone,
                source,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(merge_by_attractor(triples.into_iter().flatten()))
}

fn merge_by_attractor(triples: impl IntoIterator<Item = AttractorTriple>) -> Vec<AttractorTriple> {
    let mut out: Vec<AttractorTriple> = Vec::new();
    for t in triples {
        match out.iter_mut().find(|k| k.a == t.a) {
            Some(kept) if t.b.len() > kept.b.len() => *kept = t,
            Some(_) => {}
            None => out.push(t),
        }
    }
    out
}

/// Closed-form subsets of ℝᵈ usable as pre-attractor candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// `{(x, y) : |y| ≤ eˣ}`.
    ExpWedge,
    Ball { center: Vec<f64>, radius: f64 },
    Rect { lower: Vec<f64>, upper: Vec<f64> },
    Whole,
}

impl Region {
    fn validate(&self, dim: usize) -> Result<()> {
        let ok = match self {
            Region::ExpWedge => dim == 2,
            Region::Ball { center, radius } => center.len() == dim && *radius > 0.0,
            Region::Rect { lower, upper } => {
                lower.len() == dim && upper.len() == dim && lower.iter().zip(upper).all(|(l, u)| l <= u)
            }
            Region::Whole => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("region", format!("{self:?} does not fit a {dim}-D grid")))
        }
    }

    fn meets_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        match self {
            Region::ExpWedge => {
                let min_abs_y = if lo[1] <= 0.0 && hi[1] >= 0.0 {
                    0.0
                } else {
                    lo[1].abs().min(hi[1].abs())
                };
                min_abs_y <= hi[0].exp()
            }
            Region::Ball { center, radius } => {
                let d2: f64 = center
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| (c - c.clamp(lo[k], hi[k])).powi(2))
                    .sum();
                d2 <= radius * radius
            }
            Region::Rect { lower, upper } => (0..lo.len()).all(|k| lower[k] <= hi[k] && upper[k] >= lo[k]),
            Region::Whole => true,
        }
    }

    fn inside_window(&self, grid: &BoxGrid) -> bool {
        let (wl, wh) = (grid.lower(), grid.upper());
        match self {
            Region::ExpWedge | Region::Whole => false,
            Region::Ball { center, radius } => {
                (0..center.len()).all(|k| center[k] - radius >= wl[k] && center[k] + radius <= wh[k])
            }
            Region::Rect { lower, upper } => (0..lower.len()).all(|k| lower[k] >= wl[k] && upper[k] <= wh[k]),
        }
    }

    /// Boxes whose closure meets the region, plus the exterior when the
    /// region is not contained in the window.
    pub fn covering(&self, grid: &BoxGrid) -> Result<BoxSet> {
        self.validate(grid.dim())?;
        let mut out = BoxSet::empty(grid.len());
        for b in 0..grid.len() {
            let (lo, hi) = grid.box_extent(b);
            if self.meets_box(&lo, &hi) {
                out.insert(b);
            }
        }
        if !self.inside_window(grid) {
            out.insert_exterior();
        }
        Ok(out)
    }
}

/// A caller-supplied pre-attractor. With `halo > 0` the attractor is computed
/// on the window enlarged by `halo` boxes per side and then cut back to the
/// window, so mass entering the window from outside is accounted for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreAttractorSpec {
    pub name: String,
    pub region: Region,
    #[serde(default)]
    pub halo: usize,
    #[serde(default)]
    pub tau: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedCandidate {
    pub name: String,
    pub witness: Option<(usize, usize)>,
}

/// Triple for a region pre-attractor, or the failed check.
pub fn region_triple(
    dynamics: &SetDynamics<'_>,
    pre: &PreAttractorSpec,
) -> Result<std::result::Result<AttractorTriple, RejectedCandidate>> {
    let grid = dynamics.grid();
    let tau = pre.tau.unwrap_or(dynamics.params().tau);
    let u = pre.region.covering(grid)?;
    let (check, attractor) = if pre.halo == 0 {
        (dynamics.is_pre_attractor(&u, tau)?, dynamics.attractor(&u, tau)?)
    } else {
        let wide = grid.dilated(pre.halo)?;
        let wide_dyn = SetDynamics::new(
            dynamics.system,
            &wide,
            dynamics.omega,
            dynamics.params,
            dynamics.sampling,
            dynamics.pad,
        )?;
        let wide_u = pre.region.covering(&wide)?;
        let check = wide_dyn.is_pre_attractor(&wide_u, tau)?;
        let mut a = wide_dyn.attractor(&wide_u, tau)?;
        a.set = wide.transfer(&a.set, grid)?.without_exterior();
        (check, a)
    };
    if !check.holds {
        return Ok(Err(RejectedCandidate {
            name: pre.name.clone(),
            witness: check.witness,
        }));
    }
    let b = dynamics.basin(&u);
    Ok(Ok(AttractorTriple {
        u,
        a: attractor.set,
        b,
        tau,
        iterations: attractor.iterations,
        truncated: attractor.truncated,
        monotone: attractor.monotone,
        source: TripleSource::Region(pre.name.clone()),
    }))
}

/// Box-level checks relating chain recurrence to attractor triples, as violation counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    /// Boxes of `CR ∩ U` outside `A`, summed over triples.
    pub cr_in_u_outside_a: usize,
    /// Boxes of `CR ∩ B` outside `A`, summed over triples.
    pub cr_in_b_outside_a: usize,
    /// Boxes of `⋃ (B − A) ∩ CR`.
    pub basin_gap_meets_cr: usize,
    /// Boxes of `U` missing from `B`, summed over triples.
    pub u_outside_b: usize,
    /// Boxes of the time-τ image of `A` outside `A` and the exterior.
    pub attractor_escape: usize,
    /// Triples whose lagged image sets failed to shrink monotonically.
    pub nonmonotone_triples: usize,
}

impl InvariantReport {
    /// The hard invariants checked by every run.
    pub fn holds(&self) -> bool {
        self.cr_in_u_outside_a == 0 && self.basin_gap_meets_cr == 0
    }

    /// Every check, as used by the verification suite.
    pub fn all_hold(&self) -> bool {
        self.holds()
            && self.cr_in_b_outside_a == 0
            && self.u_outside_b == 0
            && self.attractor_escape == 0
            && self.nonmonotone_triples == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConleyDecomposition {
    pub omega_digest: String,
    pub cr: BoxSet,
    pub triples: Vec<AttractorTriple>,
    /// `⋃ (B − A)` over all triples, interior only.
    pub basin_gaps: BoxSet,
    /// `(X − CR) Δ ⋃ (B − A)`.
    pub residual: BoxSet,
    pub invariants: InvariantReport,
    pub rejected: Vec<RejectedCandidate>,
    pub edge_count: usize,
}

/// How one box is classified by a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxClass {
    pub in_cr: bool,
    /// Index of the smallest attractor containing the box.
    pub attractor: Option<usize>,
    /// Indices of all basins containing the box.
    pub basins: Vec<usize>,
    pub residual: bool,
}

impl ConleyDecomposition {
    /// Assembles a decomposition from a chain recurrent set and triples.
    pub fn assemble(
        omega_digest: String,
        cr: BoxSet,
        triples: Vec<AttractorTriple>,
        rejected: Vec<RejectedCandidate>,
        edge_count: usize,
    ) -> Self {
        let n = cr.universe();
        let mut gaps = BoxSet::empty(n);
        let mut inv = InvariantReport::default();
        for t in &triples {
            gaps.union_with(&t.b.difference(&t.a));
            inv.cr_in_u_outside_a += cr.intersection(&t.u).difference(&t.a).len();
            inv.cr_in_b_outside_a += cr.intersection(&t.b).difference(&t.a).len();
            inv.u_outside_b += t.u.difference(&t.b).node_len();
            inv.nonmonotone_triples += usize::from(!t.monotone);
        }
        let gaps = gaps.without_exterior();
        inv.basin_gap_meets_cr = gaps.intersection(&cr).len();
        let non_cr = BoxSet::interior_full(n).difference(&cr);
        let residual = non_cr.symmetric_difference(&gaps);
        ConleyDecomposition {
            omega_digest,
            cr,
            triples,
            basin_gaps: gaps,
            residual,
            invariants: inv,
            rejected,
            edge_count,
        }
    }

    pub fn box_count(&self) -> usize {
        self.cr.universe()
    }

    pub fn cr_fraction(&self) -> f64 {
        self.cr.len() as f64 / self.box_count() as f64
    }

    pub fn residual_fraction(&self) -> f64 {
        self.residual.len() as f64 / self.box_count() as f64
    }

    pub fn classify(&self) -> Vec<BoxClass> {
        (0..self.box_count())
            .map(|b| {
                let attractor = self
                    .triples
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.a.contains(b))
                    .min_by_key(|(i, t)| (t.a.len(), *i))
                    .map(|(i, _)| i);
                BoxClass {
                    in_cr: self.cr.contains(b),
                    attractor,
                    basins: (0..self.triples.len()).filter(|&i| self.triples[i].b.contains(b)).collect(),
                    residual: self.residual.contains(b),
                }
            })
            .collect()
    }
}

/// Everything a decomposition run needs besides the noise path.
#[derive(Debug, Clone)]
pub struct DecompositionSetup<'a> {
    pub system: &'a RandomMapSystem,
    pub grid: &'a BoxGrid,
    pub eps: &'a EpsilonField,
    pub params: ChainParams,
    pub sampling: SamplingSpec,
    pub image_pad: f64,
    pub preattractors: &'a [PreAttractorSpec],
}

/// Chain recurrent set, attractor triples and residual for one noise path.
pub fn conley_decomposition(setup: &DecompositionSetup<'_>, omega: &OmegaPath) -> Result<ConleyDecomposition> {
    let graph = build_chain_graph(setup.system, setup.grid, setup.eps, &setup.params, omega, &setup.sampling)?;
    decomposition_from_graph(setup, omega, &graph)
}

pub fn decomposition_from_graph(
    setup: &DecompositionSetup<'_>,
    omega: &OmegaPath,
    graph: &ChainGraph,
) -> Result<ConleyDecomposition> {
    let dynamics = SetDynamics::new(
        setup.system,
        setup.grid,
        omega,
        setup.params,
        setup.sampling,
        setup.image_pad,
    )?;
    let cr = graph.chain_recurrent_set();
    let mut triples = Vec::new();
    let mut rejected = Vec::new();
    for pre in setup.preattractors {
        match region_triple(&dynamics, pre)? {
            Ok(t) => triples.push(t),
            Err(r) => rejected.push(r),
        }
    }
    triples.extend(enumerate_attractors(&dynamics, graph)?);
    let triples = merge_by_attractor(triples);
    let mut escape = 0;
    for t in &triples {
        escape += dynamics.image(&t.a, t.tau)?.without_exterior().difference(&t.a).len();
    }
    let mut d = ConleyDecomposition::assemble(omega.digest(), cr, triples, rejected, graph.edge_count());
    d.invariants.attractor_escape = escape;
    Ok(d)
}

/// A random point x(ω): fixed, or chosen by the symbol at slot 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSelector {
    Constant(Vec<f64>),
    PerSymbol { per_symbol: Vec<Vec<f64>> },
}

impl PointSelector {
    pub fn at(&self, omega: &OmegaPath) -> Result<&[f64]> {
        match self {
            PointSelector::Constant(p) => Ok(p),
            PointSelector::PerSymbol { per_symbol } => {
                let s = omega.symbol(0)?;
                per_symbol
                    .get(s)
                    .map(Vec::as_slice)
                    .ok_or_else(|| Error::config("point", format!("no point for symbol {s}")))
            }
        }
    }
}

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainIndexEstimate {
    pub point: PointSelector,
    pub samples: usize,
    pub hits: usize,
    pub delta_hat: f64,
    pub interval: (f64, f64),
}

/// Monte Carlo estimate of the probability over ω that the box of x(ω) is
/// chain recurrent.
#[allow(clippy::too_many_arguments)]
pub fn chain_recurrence_index(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    eps: &EpsilonField,
    params: &ChainParams,
    sampling: &SamplingSpec,
    point: &PointSelector,
    noise: &NoiseModel,
    samples: usize,
    seed: u64,
) -> Result<ChainIndexEstimate> {
    if samples == 0 {
        return Err(Error::config("samples", "at least one noise sample is required"));
    }
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let omega = sample_omega(noise, params.horizon, sub_seed(seed, 0x006f_6d65_6761, i as u64))?;
            let x = point.at(&omega)?;
            grid.box_of(x)?;
            let node = grid.node_of(x);
            if node == grid.exterior() {
                return Ok(0);
            }
            Ok(usize::from(is_recurrent_node(system, grid, eps, params, &omega, sampling, node)?))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ChainIndexEstimate {
        point: point.clone(),
        samples,
        hits,
        delta_hat: hits as f64 / samples as f64,
        interval: wilson_interval(hits, samples),
    })
}
