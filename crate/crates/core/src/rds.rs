//! Discrete-time random dynamical systems driven by symbol sequences.
//!
//! The noise space is the set of bi-infinite symbol sequences over a finite
//! alphabet; the driving flow θ is the left shift. We only ever hold a finite
//! window of a sequence (an [`OmegaPath`]), and every operation that would
//! read a symbol outside that window fails with
//! [`Error::WindowExhausted`] instead of inventing one.
//!
//! The cocycle of a [`RandomMapSystem`] is the composition of the per-symbol
//! maps along the path:
//!
//! ```text
//! φ(n, ω) x = f_{ω_{n-1}} ∘ … ∘ f_{ω_0} (x)
//! ```
//!
//! so `φ(n + m, ω) = φ(n, θ_m ω) ∘ φ(m, ω)` holds by construction. The
//! pullback image `φ(t, θ_{-t} ω)` reads the slots `-t .. -1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{BoxGrid, BoxSet};

/// Relative inset applied to box corners before sampling, as a fraction of
/// the box width. Keeps corner samples inside their half-open box so that
/// maps which move boxes onto boxes exactly do not spill into neighbours.
pub const CORNER_INSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLaw {
    /// Each slot drawn independently.
    Iid,
    /// ω is a constant sequence; its single symbol is drawn once.
    ConstantMixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    alphabet: Vec<String>,
    law: NoiseLaw,
    probabilities: Vec<f64>,
}

impl NoiseModel {
    pub fn new(alphabet: Vec<String>, law: NoiseLaw, probabilities: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Noise("alphabet must not be empty".into()));
        }
        if alphabet.len() != probabilities.len() {
            return Err(Error::Noise(format!(
                "{} symbols but {} probabilities",
                alphabet.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Noise("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Noise(format!("probabilities sum to {total}, not 1")));
        }
        Ok(NoiseModel {
            alphabet,
            law,
            probabilities,
        })
    }

    /// Single-symbol noise; every path is constant.
    pub fn deterministic() -> Self {
        NoiseModel {
            alphabet: vec!["0".into()],
            law: NoiseLaw::Iid,
            probabilities: vec![1.0],
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn law(&self) -> NoiseLaw {
        self.law
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (s, p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return s;
            }
        }
        // rounding left u above the final partial sum
        self.probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(0)
    }
}

/// A finite window of a noise realization. Slot `j` drives the step from
/// time `j` to `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaPath {
    first: i64,
    symbols: Vec<usize>,
    seed: Option<u64>,
}

impl OmegaPath {
    /// Path covering slots `-radius .. radius - 1`.
    pub fn from_symbols(symbols: Vec<usize>, seed: Option<u64>) -> Result<Self> {
        if symbols.is_empty() || !symbols.len().is_multiple_of(2) {
            return Err(Error::Noise(format!(
                "a centred path needs an even, nonzero number of symbols (got {})",
                symbols.len()
            )));
        }
        Ok(OmegaPath {
            first: -(symbols.len() as i64 / 2),
            symbols,
            seed,
        })
    }

    /// Constant path of a single symbol.
    pub fn constant(symbol: usize, radius: usize) -> Self {
        OmegaPath {
            first: -(radius as i64),
            symbols: vec![symbol; 2 * radius],
            seed: None,
        }
    }

    /// First covered slot.
    pub fn first_slot(&self) -> i64 {
        self.first
    }

    /// One past the last covered slot.
    pub fn end_slot(&self) -> i64 {
        self.first + self.symbols.len() as i64
    }

    /// Largest `N` such that slots `-N .. N - 1` are all covered.
    pub fn window_radius(&self) -> usize {
        (-self.first).min(self.end_slot()).max(0) as usize
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn symbol(&self, slot: i64) -> Result<usize> {
        if slot < self.first || slot >= self.end_slot() {
            return Err(Error::WindowExhausted {
                slot,
                first: self.first,
                end: self.end_slot(),
            });
        }
        Ok(self.symbols[(slot - self.first) as usize])
    }

    /// θ_k: the shifted path has `shift(ω, k)[j] = ω[j + k]`.
    pub fn shift(&self, k: i64) -> Result<OmegaPath> {
        let shifted = OmegaPath {
            first: self.first - k,
            symbols: self.symbols.clone(),
            seed: self.seed,
        };
        if shifted.window_radius() == 0 {
            return Err(Error::Noise(format!(
                "shift by {k} leaves no slot on both sides of time 0"
            )));
        }
        Ok(shifted)
    }

    /// Distinct symbols read by slots in `[from, to)`.
    pub fn symbols_in(&self, from: i64, to: i64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for slot in from..to {
            let s = self.symbol(slot)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Short content hash used to identify a path in reports.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.first.to_le_bytes());
        for &s in &self.symbols {
            hasher.update((s as u64).to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Draws a path over slots `-window_radius .. window_radius - 1`.
pub fn sample_omega(model: &NoiseModel, window_radius: usize, seed: u64) -> Result<OmegaPath> {
    if window_radius == 0 {
        return Err(Error::Noise("window radius must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = match model.law {
        NoiseLaw::Iid => (0..2 * window_radius).map(|_| model.draw(&mut rng)).collect(),
        NoiseLaw::ConstantMixture => vec![model.draw(&mut rng); 2 * window_radius],
    };
    Ok(OmegaPath {
        first: -(window_radius as i64),
        symbols,
        seed: Some(seed),
    })
}

/// One continuous self-map of ℝᵈ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapKind {
    Identity { dim: usize },
    Translation { shift: Vec<f64> },
    /// `x ↦ λ x`.
    Scale { lambda: f64, dim: usize },
    /// `x ↦ x + c·x·(1 − x²)` on ℝ.
    Bistable { c: f64 },
    /// `x ↦ M x + b`, `matrix` given row by row.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
}

impl MapKind {
    pub fn dim(&self) -> usize {
        match self {
            MapKind::Identity { dim } | MapKind::Scale { dim, .. } => *dim,
            MapKind::Translation { shift } => shift.len(),
            MapKind::Bistable { .. } => 1,
            MapKind::Affine { offset, .. } => offset.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::config("system", m.to_string()));
        match self {
            MapKind::Identity { dim } | MapKind::Scale { dim, .. } if *dim == 0 => {
                bad("map dimension must be positive")
            }
            MapKind::Scale { lambda, .. } if !lambda.is_finite() => bad("lambda must be finite"),
            MapKind::Translation { shift } if shift.is_empty() || shift.iter().any(|v| !v.is_finite()) => {
                bad("translation needs a nonempty finite shift vector")
            }
            MapKind::Bistable { c } if !c.is_finite() => bad("c must be finite"),
            MapKind::Affine { matrix, offset } => {
                let d = offset.len();
                if d == 0 || matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
                    return bad("affine matrix must be square and match the offset length");
                }
                if matrix.iter().flatten().chain(offset).any(|v| !v.is_finite()) {
                    return bad("affine coefficients must be finite");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Applies the map in place.
    pub fn apply(&self, x: &mut [f64]) {
        match self {
            MapKind::Identity { .. } => {}
            MapKind::Translation { shift } => x.iter_mut().zip(shift).for_each(|(v, s)| *v += s),
            MapKind::Scale { lambda, .. } => x.iter_mut().for_each(|v| *v *= lambda),
            MapKind::Bistable { c } => {
                let v = x[0];
                x[0] = v + c * v * (1.0 - v * v);
            }
            MapKind::Affine { matrix, offset } => {
                let y: Vec<f64> = matrix
                    .iter()
                    .zip(offset)
                    .map(|(row, b)| row.iter().zip(x.iter()).map(|(m, v)| m * v).sum::<f64>() + b)
                    .collect();
                x.copy_from_slice(&y);
            }
        }
    }
}

/// Per-symbol maps composed as a cocycle. A system with a single map uses it
/// for every symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomMapSystem {
    name: String,
    dim: usize,
    maps: Vec<MapKind>,
}

impl RandomMapSystem {
    pub fn new(name: impl Into<String>, maps: Vec<MapKind>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::config("system", "at least one map is required"))?;
        let dim = first.dim();
        for m in &maps {
            m.validate()?;
            if m.dim() != dim {
                return Err(Error::config(
                    "system",
                    format!("maps disagree on dimension ({} vs {dim})", m.dim()),
                ));
            }
        }
        Ok(RandomMapSystem {
            name: name.into(),
            dim,
            maps,
        })
    }

    /// `f(x, y) = (x + 1, y)` for every symbol.
    pub fn translation2d() -> Self {
        Self::single("translation2d", MapKind::Translation { shift: vec![1.0, 0.0] })
    }

    pub fn contraction1d(lambda: f64) -> Self {
        Self::single("contraction1d", MapKind::Scale { lambda, dim: 1 })
    }

    pub fn contraction2d(lambda: f64) -> Self {
        Self::single("contraction2d", MapKind::Scale { lambda, dim: 2 })
    }

    pub fn identity(dim: usize) -> Self {
        Self::single("identity", MapKind::Identity { dim })
    }

    pub fn bistable1d(c: f64) -> Self {
        Self::single("bistable1d", MapKind::Bistable { c })
    }

    fn single(name: &str, map: MapKind) -> Self {
        Self::new(name, vec![map]).expect("catalog maps are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[MapKind] {
        &self.maps
    }

    /// Number of distinct per-symbol maps (1 for symbol-independent systems).
    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn map_for(&self, symbol: usize) -> &MapKind {
        if self.maps.len() == 1 {
            &self.maps[0]
        } else {
            &self.maps[symbol]
        }
    }

    /// Applies the maps for slots `from .. to` in order, in place.
    pub fn run_slots(&self, omega: &OmegaPath, from: i64, to: i64, x: &mut [f64]) -> Result<()> {
        if from < to {
            // fail before mutating anything
            omega.symbol(from)?;
            omega.symbol(to - 1)?;
        }
        for slot in from..to {
            self.map_for(omega.symbols[(slot - omega.first) as usize]).apply(x);
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// φ(n, ω) x.
pub fn cocycle_apply(system: &RandomMapSystem, n: usize, omega: &OmegaPath, x: &[f64]) -> Result<Vec<f64>> {
    system.check_dim(x)?;
    let mut y = x.to_vec();
    system.run_slots(omega, 0, n as i64, &mut y)?;
    Ok(y)
}

/// φ(t, θ_{-t} ω) x.
pub fn pullback_apply(system: &RandomMapSystem, t: usize, omega: &OmegaPath, x: &[f64]) -> Result<Vec<f64>> {
    system.check_dim(x)?;
    let mut y = x.to_vec();
    system.run_slots(omega, -(t as i64), 0, &mut y)?;
    Ok(y)
}

/// Which time-`t` map a box image uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// φ(t, θ_{-t} ω): slots `-t .. -1`.
    Pullback,
    /// φ(t, ω): slots `0 .. t - 1`.
    Forward,
}

impl Direction {
    pub(crate) fn slots(self, t: usize) -> (i64, i64) {
        match self {
            Direction::Pullback => (-(t as i64), 0),
            Direction::Forward => (0, t as i64),
        }
    }
}

/// How sample points are placed inside a box: every (inset) corner, the
/// centre, and `interior_points` uniformly random points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub interior_points: Option<usize>,
    pub seed: u64,
}

impl SamplingSpec {
    pub fn new(seed: u64) -> Self {
        SamplingSpec {
            interior_points: None,
            seed,
        }
    }

    pub fn interior_count(&self, dim: usize) -> usize {
        self.interior_points.unwrap_or(1 << dim.min(16))
    }
}

/// SplitMix64 finaliser; used to derive sub-seeds.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn sub_seed(seed: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ a) ^ b)
}

/// Sample points of box `flat` for time `t`, concatenated (`dim` values each).
pub fn sample_points(grid: &BoxGrid, flat: usize, t: usize, sampling: &SamplingSpec) -> Vec<f64> {
    let d = grid.dim();
    let (lo, hi) = grid.box_extent(flat);
    let inset: Vec<f64> = grid.widths().iter().map(|w| w * CORNER_INSET).collect();
    let m = sampling.interior_count(d);
    let mut pts = Vec::with_capacity(((1usize << d) + 1 + m) * d);
    for corner in 0..(1usize << d) {
        for k in 0..d {
            pts.push(if corner >> k & 1 == 0 {
                lo[k] + inset[k]
            } else {
                hi[k] - inset[k]
            });
        }
    }
    pts.extend(lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)));
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(sampling.seed, flat as u64, t as u64));
    for _ in 0..m {
        for k in 0..d {
            pts.push(lo[k] + rng.gen::<f64>() * (hi[k] - lo[k]));
        }
    }
    pts
}

/// Nodes hit by the time-`t` images of the samples of `flat`: every box
/// meeting the closed `pad`-neighbourhood of an image point, plus the
/// exterior node when an image point leaves the window. Appends to `out`
/// without deduplicating.
#[allow(clippy::too_many_arguments)]
pub(crate) fn image_nodes(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    t: usize,
    omega: &OmegaPath,
    flat: usize,
    sampling: &SamplingSpec,
    pad: f64,
    direction: Direction,
    out: &mut Vec<usize>,
) -> Result<()> {
    if flat >= grid.len() {
        out.push(grid.exterior());
        return Ok(());
    }
    let d = grid.dim();
    let (from, to) = direction.slots(t);
    let mut pts = sample_points(grid, flat, t, sampling);
    for p in pts.chunks_mut(d) {
        system.run_slots(omega, from, to, p)?;
        if !grid.contains_point(p) {
            out.push(grid.exterior());
        }
        if pad == 0.0 {
            if grid.contains_point(p) {
                // a point on a shared face meets both closed boxes
                grid.for_each_box_near(p, 0.0, false, |b| out.push(b));
            }
        } else {
            grid.for_each_box_near(p, pad, false, |b| out.push(b));
        }
    }
    Ok(())
}

/// Outer box enclosure of the sampled pullback image φ(t, θ_{-t} ω) of one box.
pub fn box_image(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    t: usize,
    omega: &OmegaPath,
    flat: usize,
    sampling: &SamplingSpec,
    pad: f64,
) -> Result<BoxSet> {
    directed_box_image(system, grid, t, omega, flat, sampling, pad, Direction::Pullback)
}

/// Same as [`box_image`] for either direction.
#[allow(clippy::too_many_arguments)]
pub fn directed_box_image(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    t: usize,
    omega: &OmegaPath,
    flat: usize,
    sampling: &SamplingSpec,
    pad: f64,
    direction: Direction,
) -> Result<BoxSet> {
    if !(pad >= 0.0 && pad.is_finite()) {
        return Err(Error::config("image_pad", "pad must be finite and nonnegative"));
    }
    let mut nodes = Vec::new();
    image_nodes(system, grid, t, omega, flat, sampling, pad, direction, &mut nodes)?;
    Ok(BoxSet::from_nodes(grid.len(), nodes))
}
