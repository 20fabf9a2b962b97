//! Run configuration, experiment orchestration and output files.
//!
//! A run reads a strict JSON [`RunConfig`], samples `count` noise paths,
//! decomposes each one on a worker pool and writes:
//!
//! * `report.json`, tagged with [`SCHEMA`];
//! * `boxes_<digest>.csv` with one classification row per box;
//! * optionally `edges_<digest>.csv` with an `edges_<digest>.json` provenance record;
//! * optionally `classes_<digest>.pgm` / `.svg` rasters for 2-D grids.
//!
//! Everything except the `timings` object is a deterministic function of
//! the configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaingraph::{build_chain_graph, ChainParams, EpsilonField};
use crate::conley::{
    chain_recurrence_index, decomposition_from_graph, AttractorTriple, ChainIndexEstimate,
    ConleyDecomposition, DecompositionSetup, InvariantReport, PointSelector, PreAttractorSpec,
    RejectedCandidate, TripleSource,
};
use crate::error::{Error, Result};
use crate::grid::{BoxGrid, BoxSet, BoxSetRecord};
use crate::rds::{sample_omega, sub_seed, MapKind, NoiseLaw, NoiseModel, RandomMapSystem, SamplingSpec};

pub const SCHEMA: &str = "conley-box/report/v1";
pub const FAILURE_SCHEMA: &str = "conley-box/failure/v1";
/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONLEY_BOX_WORKERS";

/// Names accepted by [`SystemSpec::name`].
pub const CATALOG: &[&str] = &[
    "translation2d",
    "contraction1d",
    "contraction2d",
    "identity",
    "bistable1d",
    "custom",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub bounds: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_boxes: Option<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<BoxGrid> {
        match self.max_boxes {
            Some(cap) => BoxGrid::with_cap(&self.bounds, &self.resolution, cap),
            None => BoxGrid::new(&self.bounds, &self.resolution),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// A [`CATALOG`] entry.
    pub name: String,
    /// Contraction factor of the contraction systems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Shape parameter of `bistable1d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Dimension of `identity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Map list of `custom`, one per noise symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<MapKind>>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<RandomMapSystem> {
        let sys = match self.name.as_str() {
            "translation2d" => RandomMapSystem::translation2d(),
            "contraction1d" => RandomMapSystem::contraction1d(self.lambda.unwrap_or(0.5)),
            "contraction2d" => RandomMapSystem::contraction2d(self.lambda.unwrap_or(0.5)),
            "identity" => RandomMapSystem::identity(self.dim.unwrap_or(2)),
            "bistable1d" => RandomMapSystem::bistable1d(self.c.unwrap_or(0.5)),
            "custom" => {
                let maps = self
                    .maps
                    .clone()
                    .ok_or_else(|| Error::config("system.maps", "`custom` needs a map list"))?;
                return RandomMapSystem::new("custom", maps);
            }
            other => {
                return Err(Error::config(
                    "system.name",
                    format!("unknown system \"{other}\"; available: {}", CATALOG.join(", ")),
                ))
            }
        };
        // catalog constructors do not check their parameters
        for m in sys.maps() {
            m.validate()?;
        }
        Ok(sys)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub alphabet: Vec<String>,
    pub law: NoiseLaw,
    pub probabilities: Vec<f64>,
}

impl NoiseSpec {
    pub fn build(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.alphabet.clone(), self.law, self.probabilities.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsilonForm {
    Constant(f64),
    /// `a + b·|x|`.
    Radial { a: f64, b: f64 },
    /// One value per box, interpolated between box centres.
    Tabulated(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSpec {
    pub form: EpsilonForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol_multipliers: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<f64>,
}

impl EpsilonSpec {
    pub fn build(&self, grid: &BoxGrid) -> Result<EpsilonField> {
        let mut eps = match &self.form {
            EpsilonForm::Constant(v) => EpsilonField::constant(*v)?,
            EpsilonForm::Radial { a, b } => EpsilonField::radial(*a, *b)?,
            EpsilonForm::Tabulated(v) => EpsilonField::tabulated(grid, v.clone())?,
        };
        if let Some(m) = &self.symbol_multipliers {
            eps = eps.with_symbol_multipliers(m.clone())?;
        }
        if let Some(cap) = self.clamp {
            eps = eps.with_clamp(cap)?;
        }
        Ok(eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub count: usize,
    pub seed: u64,
    pub window_radius: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub point: PointSelector,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub per_box_csv: bool,
    #[serde(default)]
    pub edges_csv: bool,
    #[serde(default)]
    pub pgm: bool,
    #[serde(default)]
    pub svg: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Decompose,
    Index,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub system: SystemSpec,
    /// Defaults to the one-symbol deterministic model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    pub epsilon: EpsilonSpec,
    pub chain: ChainParams,
    pub omega: OmegaSpec,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub image_pad: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preattractors: Vec<PreAttractorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexSpec>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_sampling() -> SamplingSpec {
    SamplingSpec::new(0)
}

/// Validated, built form of a [`RunConfig`].
#[derive(Debug)]
pub struct Prepared {
    pub config: RunConfig,
    pub grid: BoxGrid,
    pub system: RandomMapSystem,
    pub noise: NoiseModel,
    pub eps: EpsilonField,
}

impl RunConfig {
    pub fn prepare(self) -> Result<Prepared> {
        let grid = self.grid.build()?;
        let system = self.system.build()?;
        if system.dim() != grid.dim() {
            return Err(Error::config(
                "system",
                format!("system is {}-D but the grid is {}-D", system.dim(), grid.dim()),
            ));
        }
        let noise = match &self.noise {
            Some(n) => n.build()?,
            None => NoiseModel::deterministic(),
        };
        if system.map_count() > 1 && system.map_count() != noise.alphabet().len() {
            return Err(Error::config(
                "noise.alphabet",
                format!(
                    "{} symbols for a system with {} maps",
                    noise.alphabet().len(),
                    system.map_count()
                ),
            ));
        }
        let eps = self.epsilon.build(&grid)?;
        self.chain.validate()?;
        if self.omega.window_radius < self.chain.horizon {
            return Err(Error::config(
                "omega.window_radius",
                format!(
                    "window radius ({}) must be at least H ({})",
                    self.omega.window_radius, self.chain.horizon
                ),
            ));
        }
        if self.omega.count == 0 {
            return Err(Error::config("omega.count", "at least one noise path is required"));
        }
        if !(self.image_pad >= 0.0 && self.image_pad.is_finite()) {
            return Err(Error::config("image_pad", "pad must be finite and nonnegative"));
        }
        if self.mode == Mode::Index && self.index.is_none() {
            return Err(Error::config("index", "index mode needs an `index` section"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "worker count must be positive"));
        }
        if let Some(out) = &self.outputs {
            if (out.pgm || out.svg) && grid.dim() != 2 {
                return Err(Error::UnsupportedDimension(grid.dim()));
            }
            std::fs::create_dir_all(&out.dir).map_err(|e| Error::io(&out.dir, e))?;
            let probe = out.dir.join(".conley-box-write-test");
            std::fs::write(&probe, b"").map_err(|e| Error::io(&out.dir, e))?;
            let _ = std::fs::remove_file(probe);
        }
        Ok(Prepared {
            config: self,
            grid,
            system,
            noise,
            eps,
        })
    }
}

/// Parses and validates a JSON configuration document.
///
/// ```
/// let doc = r#"{
///     "grid": {"bounds": [[-4, 4], [-4, 4]], "resolution": [32, 32]},
///     "system": {"name": "translation2d"},
///     "epsilon": {"form": {"constant": 0.05}},
///     "chain": {"T": 1, "t_max": 4, "tau": 1, "H": 10},
///     "omega": {"count": 1, "seed": 1, "window_radius": 10}
/// }"#;
/// let cfg = conley_box::report::parse_config(doc).unwrap();
/// assert_eq!(cfg.grid.len(), 1024);
/// ```
pub fn parse_config(document: &str) -> Result<Prepared> {
    let cfg: RunConfig = serde_json::from_str(document).map_err(|source| Error::Parse {
        what: "run configuration".into(),
        source,
    })?;
    cfg.prepare()
}

pub fn load_config(path: &Path) -> Result<Prepared> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleRecord {
    pub source: String,
    pub u: BoxSetRecord,
    pub a: Vec<usize>,
    pub b: BoxSetRecord,
    pub tau: usize,
    pub iterations: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaRecord {
    pub omega_digest: String,
    pub omega_seed: Option<u64>,
    pub cr: Vec<usize>,
    pub triples: Vec<TripleRecord>,
    pub residual: Vec<usize>,
    pub cr_fraction: f64,
    pub residual_fraction: f64,
    pub edge_count: usize,
    pub invariants: InvariantRecord,
    pub rejected: Vec<RejectedRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantRecord {
    pub cr_in_u_outside_a: usize,
    pub cr_in_b_outside_a: usize,
    pub basin_gap_meets_cr: usize,
    pub u_outside_b: usize,
    pub attractor_escape: usize,
    pub nonmonotone_triples: usize,
    pub hard_invariants_hold: bool,
}

impl From<&InvariantReport> for InvariantRecord {
    fn from(r: &InvariantReport) -> Self {
        InvariantRecord {
            cr_in_u_outside_a: r.cr_in_u_outside_a,
            cr_in_b_outside_a: r.cr_in_b_outside_a,
            basin_gap_meets_cr: r.basin_gap_meets_cr,
            u_outside_b: r.u_outside_b,
            attractor_escape: r.attractor_escape,
            nonmonotone_triples: r.nonmonotone_triples,
            hard_invariants_hold: r.holds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RejectedRecord {
    pub name: String,
    pub witness: Option<(usize, usize)>,
}

impl From<&RejectedCandidate> for RejectedRecord {
    fn from(r: &RejectedCandidate) -> Self {
        RejectedRecord {
            name: r.name.clone(),
            witness: r.witness,
        }
    }
}

fn source_label(s: &TripleSource) -> String {
    match s {
        TripleSource::Reachable(b) => format!("reachable:{b}"),
        TripleSource::WholeSpace => "whole_space".into(),
        TripleSource::Region(name) => format!("region:{name}"),
    }
}

impl OmegaRecord {
    pub fn new(d: &ConleyDecomposition, seed: Option<u64>) -> Self {
        OmegaRecord {
            omega_digest: d.omega_digest.clone(),
            omega_seed: seed,
            cr: d.cr.to_indices(),
            triples: d
                .triples
                .iter()
                .map(|t| TripleRecord {
                    source: source_label(&t.source),
                    u: (&t.u).into(),
                    a: t.a.to_indices(),
                    b: (&t.b).into(),
                    tau: t.tau,
                    iterations: t.iterations,
                    truncated: t.truncated,
                })
                .collect(),
            residual: d.residual.to_indices(),
            cr_fraction: d.cr_fraction(),
            residual_fraction: d.residual_fraction(),
            edge_count: d.edge_count,
            invariants: (&d.invariants).into(),
            rejected: d.rejected.iter().map(Into::into).collect(),
        }
    }

    /// Rebuilds the decomposition for a grid with `boxes` interior boxes.
    pub fn to_decomposition(&self, boxes: usize) -> Result<ConleyDecomposition> {
        let set = |v: &[usize]| -> Result<BoxSet> {
            BoxSetRecord {
                indices: v.to_vec(),
                exterior: false,
            }
            .to_set(boxes)
        };
        let triples = self
            .triples
            .iter()
            .map(|t| -> Result<AttractorTriple> {
                Ok(AttractorTriple {
                    u: t.u.to_set(boxes)?,
                    a: set(&t.a)?,
                    b: t.b.to_set(boxes)?,
                    tau: t.tau,
                    iterations: t.iterations,
                    truncated: t.truncated,
                    monotone: true,
                    source: TripleSource::Region(t.source.clone()),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConleyDecomposition::assemble(
            self.omega_digest.clone(),
            set(&self.cr)?,
            triples,
            Vec::new(),
            self.edge_count,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    pub omega_count: usize,
    pub mean_cr_fraction: f64,
    pub mean_residual_fraction: f64,
    pub hard_invariants_hold: bool,
    pub all_checks_hold: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexRecord {
    pub samples: usize,
    pub hits: usize,
    pub delta_hat: f64,
    pub interval: (f64, f64),
}

impl From<&ChainIndexEstimate> for IndexRecord {
    fn from(e: &ChainIndexEstimate) -> Self {
        IndexRecord {
            samples: e.samples,
            hits: e.hits,
            delta_hat: e.delta_hat,
            interval: e.interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub total_seconds: f64,
    pub per_omega_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub schema: String,
    pub config: RunConfig,
    pub omegas: Vec<OmegaRecord>,
    pub aggregate: Aggregate,
    pub timings: Timings,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: RunReport = serde_json::from_str(text).map_err(|source| Error::Parse {
            what: "report".into(),
            source,
        })?;
        if r.schema != SCHEMA {
            return Err(Error::config("schema", format!("expected {SCHEMA}, found {}", r.schema)));
        }
        Ok(r)
    }

    /// Machine-readable record of the paths whose hard invariants failed.
    pub fn failure_record(&self, strict: bool) -> Option<serde_json::Value> {
        let failed: Vec<_> = self
            .omegas
            .iter()
            .filter(|o| {
                let inv = &o.invariants;
                !inv.hard_invariants_hold
                    || (strict
                        && (inv.cr_in_b_outside_a
                            + inv.u_outside_b
                            + inv.attractor_escape
                            + inv.nonmonotone_triples
                            > 0))
            })
            .map(|o| serde_json::json!({"omega_digest": o.omega_digest, "invariants": o.invariants}))
            .collect();
        (!failed.is_empty()).then(|| serde_json::json!({"schema": FAILURE_SCHEMA, "failures": failed}))
    }
}

/// Runs `f` on a pool sized by `workers`, the environment, or the default.
fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let n = workers.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs every noise path of the configuration and writes the requested
/// files. Invariant failures are reported in the returned report, not as
/// errors.
pub fn run(prepared: &Prepared) -> Result<RunReport> {
    with_pool(prepared.config.workers, || run_in_pool(prepared))?
}

fn run_in_pool(p: &Prepared) -> Result<RunReport> {
    let start = Instant::now();
    let cfg = &p.config;
    let setup = DecompositionSetup {
        system: &p.system,
        grid: &p.grid,
        eps: &p.eps,
        params: cfg.chain,
        sampling: cfg.sampling,
        image_pad: cfg.image_pad,
        preattractors: &cfg.preattractors,
    };
    let results: Vec<(OmegaRecord, f64)> = (0..cfg.omega.count)
        .into_par_iter()
        .map(|i| -> Result<(OmegaRecord, f64)> {
            let t0 = Instant::now();
            let seed = sub_seed(cfg.omega.seed, 0x7061_7468, i as u64);
            let omega = sample_omega(&p.noise, cfg.omega.window_radius, seed)?;
            let graph = build_chain_graph(&p.system, &p.grid, &p.eps, &cfg.chain, &omega, &cfg.sampling)?;
            let d = decomposition_from_graph(&setup, &omega, &graph)?;
            if let Some(out) = &cfg.outputs {
                write_omega_files(out, &p.grid, &d, &graph)?;
            }
            Ok((OmegaRecord::new(&d, Some(seed)), t0.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let (omegas, per_omega_seconds): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let index = match (&cfg.index, cfg.mode) {
        (Some(ix), Mode::Index) => Some(IndexRecord::from(&chain_recurrence_index(
            &p.system,
            &p.grid,
            &p.eps,
            &cfg.chain,
            &cfg.sampling,
            &ix.point,
            &p.noise,
            ix.samples,
            ix.seed,
        )?)),
        _ => None,
    };

    let n = omegas.len() as f64;
    let aggregate = Aggregate {
        omega_count: omegas.len(),
        mean_cr_fraction: omegas.iter().map(|o| o.cr_fraction).sum::<f64>() / n,
        mean_residual_fraction: omegas.iter().map(|o| o.residual_fraction).sum::<f64>() / n,
        hard_invariants_hold: omegas.iter().all(|o| o.invariants.hard_invariants_hold),
        all_checks_hold: omegas.iter().all(|o| {
            let i = &o.invariants;
            i.hard_invariants_hold
                && i.cr_in_b_outside_a + i.u_outside_b + i.attractor_escape + i.nonmonotone_triples == 0
        }),
        index,
    };
    let report = RunReport {
        schema: SCHEMA.into(),
        config: cfg.clone(),
        omegas,
        aggregate,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            per_omega_seconds,
        },
    };
    if let Some(out) = &cfg.outputs {
        let path = out.dir.join("report.json");
        std::fs::write(&path, report.to_json()).map_err(|e| Error::io(&path, e))?;
        if let Some(failure) = report.failure_record(cfg.mode == Mode::Verify) {
            let path = out.dir.join("failure.json");
            std::fs::write(&path, failure.to_string()).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(report)
}

fn write_omega_files(
    out: &OutputSpec,
    grid: &BoxGrid,
    d: &ConleyDecomposition,
    graph: &crate::chaingraph::ChainGraph,
) -> Result<()> {
    let tag = &d.omega_digest;
    let write = |name: String, bytes: &[u8]| -> Result<()> {
        let path = out.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
    };
    if out.per_box_csv {
        write(format!("boxes_{tag}.csv"), classification_csv(d).as_bytes())?;
    }
    if out.edges_csv {
        let mut buf = Vec::new();
        graph.write_csv(&mut buf).map_err(|e| Error::io(&out.dir, e))?;
        write(format!("edges_{tag}.csv"), &buf)?;
        let prov = serde_json::to_string_pretty(&graph.provenance()).expect("serializable");
        write(format!("edges_{tag}.json"), prov.as_bytes())?;
    }
    if out.pgm {
        write(format!("classes_{tag}.pgm"), &render_pgm(grid, d)?)?;
    }
    if out.svg {
        write(format!("classes_{tag}.svg"), render_svg(grid, d)?.as_bytes())?;
    }
    Ok(())
}

/// Per-box CSV: flat index, CR flag, attractor id (or −1), basin ids.
pub fn classification_csv(d: &ConleyDecomposition) -> String {
    let mut s = String::from("flat_index,in_CR,attractor_id,basin_ids\n");
    for (b, c) in d.classify().iter().enumerate() {
        let basins: Vec<String> = c.basins.iter().map(usize::to_string).collect();
        let _ = writeln!(
            s,
            "{b},{},{},{}",
            u8::from(c.in_cr),
            c.attractor.map_or(-1, |a| a as i64),
            basins.join(";")
        );
    }
    s
}

pub const LEVEL_CR: u8 = 0;
pub const LEVEL_ATTRACTOR: u8 = 64;
pub const LEVEL_RESIDUAL: u8 = 128;
pub const LEVEL_BASIN: u8 = 192;
pub const LEVEL_BACKGROUND: u8 = 255;

/// Gray level of every box. CR beats attractor beats residual beats basin;
/// attractor `i` is drawn at `64 + 8·(i mod 8)`.
pub fn gray_levels(grid: &BoxGrid, d: &ConleyDecomposition) -> Result<Vec<u8>> {
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if d.box_count() != grid.len() {
        return Err(Error::InvalidGrid("decomposition and grid disagree on box count".into()));
    }
    Ok(d.classify()
        .iter()
        .map(|c| {
            if c.in_cr {
                LEVEL_CR
            } else if let Some(a) = c.attractor {
                LEVEL_ATTRACTOR + 8 * (a % 8) as u8
            } else if c.residual {
                LEVEL_RESIDUAL
            } else if !c.basins.is_empty() {
                LEVEL_BASIN
            } else {
                LEVEL_BACKGROUND
            }
        })
        .collect())
}

/// Binary PGM, one pixel per box, highest `y` on the top row.
pub fn render_pgm(grid: &BoxGrid, d: &ConleyDecomposition) -> Result<Vec<u8>> {
    let levels = gray_levels(grid, d)?;
    let (nx, ny) = (grid.resolution()[0], grid.resolution()[1]);
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for row in (0..ny).rev() {
        out.extend_from_slice(&levels[row * nx..(row + 1) * nx]);
    }
    Ok(out)
}

/// SVG with one unit square per box, same palette and orientation as the PGM.
pub fn render_svg(grid: &BoxGrid, d: &ConleyDecomposition) -> Result<String> {
    let levels = gray_levels(grid, d)?;
    let (nx, ny) = (grid.resolution()[0], grid.resolution()[1]);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {nx} {ny}\" shape-rendering=\"crispEdges\">\n"
    );
    for j in 0..ny {
        for i in 0..nx {
            let g = levels[j * nx + i];
            let _ = writeln!(
                s,
                "<rect x=\"{i}\" y=\"{}\" width=\"1\" height=\"1\" fill=\"rgb({g},{g},{g})\"/>",
                ny - 1 - j
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Raster of the path with the given digest from a saved report.
pub fn render_from_report(report: &RunReport, digest: &str) -> Result<Vec<u8>> {
    let grid = report.config.grid.build()?;
    let rec = report
        .omegas
        .iter()
        .find(|o| o.omega_digest == digest)
        .ok_or_else(|| Error::config("omega", format!("no path with digest {digest} in the report")))?;
    render_pgm(&grid, &rec.to_decomposition(grid.len())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "grid": {"bounds": [[-4, 4], [-4, 4]], "resolution": [32, 32]},
            "system": {"name": "translation2d"},
            "epsilon": {"form": {"constant": 0.05}},
            "chain": {"T": 1, "t_max": 4, "tau": 1, "H": 10},
            "omega": {"count": 1, "seed": 1, "window_radius": 10}
        })
    }

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_parses() {
        let p = parse_config(&base().to_string()).unwrap();
        assert_eq!(p.grid.len(), 1024);
        assert_eq!(p.config.mode, Mode::Decompose);
        let echo = serde_json::to_value(&p.config).unwrap();
        let again: RunConfig = serde_json::from_value(echo).unwrap();
        assert_eq!(again, p.config);
    }

    #[test]
    fn config_errors_name_the_field() {
        let mut doc = base();
        doc["chain"]["T"] = 5.into();
        assert_eq!(field_of(parse_config(&doc.to_string()).unwrap_err()), "t_max");

        let mut doc = base();
        doc["system"]["name"] = "lorenz96".into();
        let err = parse_config(&doc.to_string()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lorenz96") && msg.contains("bistable1d"), "{msg}");

        let mut doc = base();
        doc["omega"]["window_radius"] = 4.into();
        assert_eq!(field_of(parse_config(&doc.to_string()).unwrap_err()), "omega.window_radius");
    }

    #[test]
    fn unknown_keys_are_fatal() {
        let mut doc = base();
        doc["colour"] = "blue".into();
        assert!(matches!(parse_config(&doc.to_string()), Err(Error::Parse { .. })));
        let mut doc = base();
        doc["grid"]["cells"] = 3.into();
        assert!(matches!(parse_config(&doc.to_string()), Err(Error::Parse { .. })));
    }

    fn single_row_decomposition() -> (BoxGrid, ConleyDecomposition) {
        let grid = BoxGrid::new(&[[0.0, 4.0], [0.0, 4.0]], &[4, 4]).unwrap();
        let row: Vec<usize> = (4..8).collect();
        let triple = AttractorTriple {
            u: BoxSet::full(16),
            a: BoxSet::from_nodes(16, row),
            b: BoxSet::full(16),
            tau: 1,
            iterations: 1,
            truncated: false,
            monotone: true,
            source: TripleSource::WholeSpace,
        };
        let d = ConleyDecomposition::assemble("d".into(), BoxSet::empty(16), vec![triple], vec![], 0);
        (grid, d)
    }

    #[test]
    fn pgm_palette_and_orientation() {
        let (grid, d) = single_row_decomposition();
        let img = render_pgm(&grid, &d).unwrap();
        let header = b"P5\n4 4\n255\n";
        assert_eq!(&img[..header.len()], header);
        let px = &img[header.len()..];
        // row j = 1 is the third raster row from the top
        assert_eq!(&px[8..12], &[LEVEL_ATTRACTOR; 4]);
        assert!(px[..8].iter().chain(&px[12..]).all(|&g| g == LEVEL_BASIN));
    }

    #[test]
    fn empty_decomposition_is_background() {
        let grid = BoxGrid::new(&[[0.0, 1.0], [0.0, 1.0]], &[2, 2]).unwrap();
        let cr = BoxSet::empty(4);
        let mut d = ConleyDecomposition::assemble("e".into(), cr, vec![], vec![], 0);
        // no triples and no CR makes every box residual; clear it to test the background level
        d.residual = BoxSet::empty(4);
        let img = render_pgm(&grid, &d).unwrap();
        assert!(img[img.len() - 4..].iter().all(|&g| g == LEVEL_BACKGROUND));
    }

    #[test]
    fn one_dimensional_render_is_rejected() {
        let grid = BoxGrid::new(&[[0.0, 1.0]], &[4]).unwrap();
        let d = ConleyDecomposition::assemble("x".into(), BoxSet::empty(4), vec![], vec![], 0);
        assert!(matches!(render_pgm(&grid, &d), Err(Error::UnsupportedDimension(1))));
        assert!(matches!(render_svg(&grid, &d), Err(Error::UnsupportedDimension(1))));
    }

    #[test]
    fn classification_rows() {
        let (_, d) = single_row_decomposition();
        let csv = classification_csv(&d);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "flat_index,in_CR,attractor_id,basin_ids");
        assert_eq!(lines[1], "0,0,-1,0");
        assert_eq!(lines[5], "4,0,0,0");
        assert_eq!(lines.len(), 17);
    }
}
