//! The (ε, T)(ω)-chain graph over the boxes of a grid.
//!
//! For a fixed noise path ω there is an edge `b → b'` when some sample point
//! `p` of `b` and some step time `t ∈ [T, t_max]` give a pullback image
//! `q = φ(t, θ_{-t} ω) p` with
//!
//! ```text
//! dist(q, b') < ε(q, ω) + diam / 2
//! ```
//!
//! The tolerance is evaluated at the image point `q`, not at either end of
//! the jump. The half-diameter slack makes the graph an outer approximation:
//! every true chain step between points of two boxes shows up as an edge.
//!
//! Paths in the graph are chains; boxes on cycles make up the chain
//! recurrent set, and forward reachability from a box is the combinatorial
//! set of chain end points.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoxGrid, BoxSet};
use crate::rds::{sample_points, OmegaPath, RandomMapSystem, SamplingSpec};

#[derive(Debug, Clone, PartialEq)]
enum Form {
    Constant(f64),
    Radial { a: f64, b: f64 },
    Tabulated { grid: BoxGrid, values: Vec<f64> },
}

/// State- and noise-dependent chain tolerance ε(x, ω): continuous in `x`,
/// and depending on ω only through the symbol at slot 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonField {
    form: Form,
    symbol_multipliers: Option<Vec<f64>>,
    clamp: Option<f64>,
}

impl EpsilonField {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::config("epsilon.value", "must be finite and positive"));
        }
        Ok(Self::from_form(Form::Constant(value)))
    }

    /// `ε(x) = a + b·|x|`.
    pub fn radial(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b >= 0.0 && b.is_finite()) {
            return Err(Error::config("epsilon", "radial form needs a > 0 and b ≥ 0"));
        }
        Ok(Self::from_form(Form::Radial { a, b }))
    }

    /// One value per box of `grid`, attached to box centres and interpolated
    /// multilinearly in between (held constant beyond the outermost centres).
    pub fn tabulated(grid: &BoxGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(
                "epsilon.values",
                format!("expected {} values, got {}", grid.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::config("epsilon.values", "all values must be finite and positive"));
        }
        Ok(Self::from_form(Form::Tabulated {
            grid: grid.clone(),
            values,
        }))
    }

    fn from_form(form: Form) -> Self {
        EpsilonField {
            form,
            symbol_multipliers: None,
            clamp: None,
        }
    }

    /// Scales ε by a factor chosen by the symbol at slot 0 of ω.
    pub fn with_symbol_multipliers(mut self, multipliers: Vec<f64>) -> Result<Self> {
        if multipliers.is_empty() || multipliers.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::config("epsilon.symbol_multipliers", "must be finite and positive"));
        }
        self.symbol_multipliers = Some(multipliers);
        Ok(self)
    }

    /// Caps ε from above.
    pub fn with_clamp(mut self, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::config("epsilon.clamp", "must be finite and positive"));
        }
        self.clamp = Some(cap);
        Ok(self)
    }

    /// Pointwise multiple of this field.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::config("epsilon", "scale factor must be positive"));
        }
        let form = match &self.form {
            Form::Constant(c) => Form::Constant(c * factor),
            Form::Radial { a, b } => Form::Radial {
                a: a * factor,
                b: b * factor,
            },
            Form::Tabulated { grid, values } => Form::Tabulated {
                grid: grid.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        };
        Ok(EpsilonField {
            form,
            symbol_multipliers: self.symbol_multipliers.clone(),
            clamp: self.clamp.map(|c| c * factor),
        })
    }

    pub fn eval(&self, x: &[f64], omega: &OmegaPath) -> Result<f64> {
        let base = match &self.form {
            Form::Constant(c) => *c,
            Form::Radial { a, b } => a + b * x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Form::Tabulated { grid, values } => interpolate(grid, values, x),
        };
        let mut value = base;
        if let Some(m) = &self.symbol_multipliers {
            let s = omega.symbol(0)?;
            value *= m.get(s).copied().ok_or_else(|| {
                Error::config("epsilon.symbol_multipliers", format!("no multiplier for symbol {s}"))
            })?;
        }
        if let Some(cap) = self.clamp {
            value = value.min(cap);
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Epsilon {
                value,
                point: x.to_vec(),
            });
        }
        Ok(value)
    }

    pub fn describe(&self) -> String {
        let mut s = match &self.form {
            Form::Constant(c) => format!("constant({c})"),
            Form::Radial { a, b } => format!("radial({a} + {b}|x|)"),
            Form::Tabulated { values, .. } => format!("tabulated({} values)", values.len()),
        };
        if let Some(m) = &self.symbol_multipliers {
            let _ = write!(s, " x symbol{m:?}");
        }
        if let Some(c) = self.clamp {
            let _ = write!(s, " clamped at {c}");
        }
        s
    }
}

fn interpolate(grid: &BoxGrid, values: &[f64], x: &[f64]) -> f64 {
    let d = grid.dim();
    let res = grid.resolution();
    let mut base = vec![0usize; d];
    let mut frac = vec![0.0; d];
    for k in 0..d {
        let w = grid.widths()[k];
        let n = res[k];
        let u = ((x[k] - grid.lower()[k] - 0.5 * w) / w).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n.saturating_sub(2));
        base[k] = i;
        frac[k] = if n > 1 { u - i as f64 } else { 0.0 };
    }
    let mut total = 0.0;
    for corner in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut flat = 0;
        let mut stride = 1;
        for k in 0..d {
            let up = corner >> k & 1 == 1;
            if up && res[k] == 1 {
                weight = 0.0;
                break;
            }
            weight *= if up { frac[k] } else { 1.0 - frac[k] };
            flat += (base[k] + usize::from(up)) * stride;
            stride *= res[k];
        }
        if weight != 0.0 {
            total += weight * values[flat];
        }
    }
    total
}

/// Step-time window and horizons for chains and pre-attractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    /// Minimum step time `T` of a chain link.
    #[serde(rename = "T")]
    pub min_step: usize,
    /// Largest step time considered.
    pub t_max: usize,
    /// Pre-attractor lag τ.
    pub tau: usize,
    /// Time horizon `H`; the noise window must cover `[-H, H)`.
    #[serde(rename = "H")]
    pub horizon: usize,
}

impl ChainParams {
    pub fn new(min_step: usize, t_max: usize, tau: usize, horizon: usize) -> Result<Self> {
        let p = ChainParams {
            min_step,
            t_max,
            tau,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_step < 1 {
            return Err(Error::config("T", "minimum step time must be at least 1"));
        }
        if self.t_max < self.min_step {
            return Err(Error::config(
                "t_max",
                format!("t_max ({}) must be at least T ({})", self.t_max, self.min_step),
            ));
        }
        if self.horizon < self.t_max {
            return Err(Error::config(
                "H",
                format!("horizon ({}) must be at least t_max ({})", self.horizon, self.t_max),
            ));
        }
        if self.tau < 1 {
            return Err(Error::config("tau", "tau must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphProvenance {
    pub system: String,
    pub bounds: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
    pub epsilon: String,
    pub params: ChainParams,
    pub omega_digest: String,
    pub sampling: SamplingSpec,
}

/// Directed graph over interior boxes plus the exterior node, stored in
/// compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGraph {
    interior: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    provenance: Option<GraphProvenance>,
}

impl ChainGraph {
    /// Graph over `interior + 1` nodes from an explicit edge list. The last
    /// node is the exterior and always gets exactly its self-loop.
    pub fn from_edges(interior: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); interior + 1];
        for (a, b) in edges {
            assert!(a <= interior && b <= interior, "edge ({a}, {b}) out of range");
            if a < interior {
                adj[a].push(b);
            }
        }
        adj[interior].push(interior);
        Self::from_adjacency(interior, adj, None)
    }

    fn from_adjacency(interior: usize, mut adj: Vec<Vec<usize>>, provenance: Option<GraphProvenance>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        ChainGraph {
            interior,
            offsets,
            targets,
            provenance,
        }
    }

    pub fn node_count(&self) -> usize {
        self.interior + 1
    }

    pub fn interior_count(&self) -> usize {
        self.interior
    }

    pub fn exterior(&self) -> usize {
        self.interior
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.successors(a).binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |a| self.successors(a).iter().map(move |&b| (a, b)))
    }

    pub fn provenance(&self) -> Option<&GraphProvenance> {
        self.provenance.as_ref()
    }

    /// True when every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &ChainGraph) -> bool {
        self.node_count() == other.node_count()
            && (0..self.node_count()).all(|a| {
                let theirs = other.successors(a);
                self.successors(a).iter().all(|b| theirs.binary_search(b).is_ok())
            })
    }

    pub fn scc(&self) -> Scc {
        Scc::compute(self)
    }

    /// Boxes admitting a chain back to themselves: members of strongly
    /// connected components with at least two nodes or an explicit
    /// self-loop. The exterior is never reported.
    pub fn chain_recurrent_set(&self) -> BoxSet {
        let scc = self.scc();
        let mut out = BoxSet::empty(self.interior);
        for (c, members) in scc.members.iter().enumerate() {
            if scc.is_cyclic(self, c) {
                for &m in members {
                    if m < self.interior {
                        out.insert(m);
                    }
                }
            }
        }
        out
    }

    /// Nodes reachable from `start` along at least one edge. `start` itself
    /// is included only when it lies on a cycle.
    pub fn forward_reachable(&self, start: usize) -> BoxSet {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = self.successors(start).to_vec();
        let mut out = BoxSet::empty(self.interior);
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            out.insert(v);
            stack.extend(self.successors(v).iter().filter(|&&w| !seen[w]));
        }
        out
    }

    /// Nodes from which some node of `target` can be reached (including
    /// `target` itself).
    pub fn backward_reachable(&self, target: &BoxSet) -> BoxSet {
        let mut preds = vec![Vec::new(); self.node_count()];
        for (a, b) in self.edges() {
            preds[b].push(a);
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = target.nodes().collect();
        let mut out = BoxSet::empty(self.interior);
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            out.insert(v);
            stack.extend(preds[v].iter().filter(|&&w| !seen[w]));
        }
        out
    }

    /// Edge list as CSV with a `src_index,dst_index` header. The exterior
    /// node is written as the grid's box count.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "src_index,dst_index")?;
        for (a, b) in self.edges() {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    }
}

/// Strongly connected components of a [`ChainGraph`] and their condensation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scc {
    /// Component index of each node.
    pub component: Vec<usize>,
    /// Nodes of each component; components are listed sinks first.
    pub members: Vec<Vec<usize>>,
    /// Condensation DAG: deduplicated successor components, no self-edges.
    pub dag: Vec<Vec<usize>>,
}

impl Scc {
    /// Iterative Tarjan.
    fn compute(g: &ChainGraph) -> Scc {
        const UNSEEN: usize = usize::MAX;
        let n = g.node_count();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut component = vec![UNSEEN; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0;
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(top) = call.last_mut() {
                let v = top.0;
                let succ = g.successors(v);
                if top.1 < succ.len() {
                    let w = succ[top.1];
                    top.1 += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = members.len();
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component[w] = id;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    members.push(comp);
                }
            }
        }

        let mut dag = vec![Vec::new(); members.len()];
        for (a, b) in g.edges() {
            let (ca, cb) = (component[a], component[b]);
            if ca != cb {
                dag[ca].push(cb);
            }
        }
        for row in &mut dag {
            row.sort_unstable();
            row.dedup();
        }
        Scc {
            component,
            members,
            dag,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether component `c` carries a cycle.
    pub fn is_cyclic(&self, g: &ChainGraph, c: usize) -> bool {
        match self.members[c].as_slice() {
            [single] => g.has_edge(*single, *single),
            _ => true,
        }
    }
}

/// Builds the chain graph of `system` on `grid` for the path `omega`.
pub fn build_chain_graph(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    eps: &EpsilonField,
    params: &ChainParams,
    omega: &OmegaPath,
    sampling: &SamplingSpec,
) -> Result<ChainGraph> {
    params.validate()?;
    if system.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: system.dim(),
        });
    }
    // fail fast on a short path instead of inside every worker
    omega.symbol(-(params.horizon as i64))?;
    omega.symbol(params.horizon as i64 - 1)?;

    let mut adj: Vec<Vec<usize>> = (0..grid.len())
        .into_par_iter()
        .map(|b| chain_successors(system, grid, eps, params, omega, sampling, b))
        .collect::<Result<_>>()?;
    let ext = grid.exterior();
    adj.push(vec![ext]);

    let provenance = GraphProvenance {
        system: system.name().to_string(),
        bounds: grid.bounds(),
        resolution: grid.resolution().to_vec(),
        epsilon: eps.describe(),
        params: *params,
        omega_digest: omega.digest(),
        sampling: *sampling,
    };
    Ok(ChainGraph::from_adjacency(grid.len(), adj, Some(provenance)))
}

/// Out-neighbours of interior box `b`, unsorted and possibly repeated.
fn chain_successors(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    eps: &EpsilonField,
    params: &ChainParams,
    omega: &OmegaPath,
    sampling: &SamplingSpec,
    b: usize,
) -> Result<Vec<usize>> {
    let d = grid.dim();
    let half_diam = 0.5 * grid.diameter();
    let mut row = Vec::new();
    for t in params.min_step..=params.t_max {
        let mut pts = sample_points(grid, b, t, sampling);
        for q in pts.chunks_mut(d) {
            system.run_slots(omega, -(t as i64), 0, q)?;
            if !grid.contains_point(q) {
                row.push(grid.exterior());
            }
            let r = eps.eval(q, omega)? + half_diam;
            grid.for_each_box_near(q, r, true, |b2| row.push(b2));
        }
    }
    Ok(row)
}

/// Whether `node` lies on a cycle of the chain graph. Explores only the
/// part of the graph reachable from `node` and stops as soon as it returns.
pub fn is_recurrent_node(
    system: &RandomMapSystem,
    grid: &BoxGrid,
    eps: &EpsilonField,
    params: &ChainParams,
    omega: &OmegaPath,
    sampling: &SamplingSpec,
    node: usize,
) -> Result<bool> {
    params.validate()?;
    if system.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: system.dim(),
        });
    }
    if node >= grid.len() {
        return Ok(false);
    }
    omega.symbol(-(params.t_max as i64))?;
    let mut seen = BoxSet::empty(grid.len());
    let mut stack = vec![node];
    while let Some(b) = stack.pop() {
        for n in chain_successors(system, grid, eps, params, omega, sampling, b)? {
            if n == node {
                return Ok(true);
            }
            // the exterior never leads back
            if n < grid.len() && !seen.contains(n) {
                seen.insert(n);
                stack.push(n);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> ChainGraph {
        ChainGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn scc_small_cases() {
        let g = cycle3();
        let scc = g.scc();
        // the 3-cycle plus the exterior self-loop
        assert_eq!(scc.len(), 2);
        assert_eq!(scc.members.iter().find(|m| m.len() == 3).unwrap(), &vec![0, 1, 2]);
        assert_eq!(g.chain_recurrent_set().to_indices(), vec![0, 1, 2]);

        let edgeless = ChainGraph::from_edges(5, []);
        let scc = edgeless.scc();
        assert_eq!(scc.len(), 6);
        assert!(scc.members.iter().all(|m| m.len() == 1));
        assert!(edgeless.chain_recurrent_set().is_empty());
        assert!(edgeless.forward_reachable(2).is_empty());
    }

    #[test]
    fn self_loop_convention() {
        let g = ChainGraph::from_edges(2, [(0, 0), (0, 1)]);
        assert_eq!(g.chain_recurrent_set().to_indices(), vec![0]);
        assert!(g.forward_reachable(0).contains(0));
        assert!(!g.forward_reachable(1).contains(1));
    }

    #[test]
    fn condensation_is_acyclic_and_sinks_first() {
        let g = ChainGraph::from_edges(6, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (3, 4), (5, 6)]);
        let scc = g.scc();
        for (c, succ) in scc.dag.iter().enumerate() {
            for &s in succ {
                assert!(s < c, "condensation edge {c} -> {s} is not sink-first");
            }
        }
        let reached = g.forward_reachable(0);
        assert_eq!(reached.to_indices(), vec![0, 1, 2, 3, 4]);
        assert!(!reached.contains_exterior());
        assert!(g.forward_reachable(5).contains_exterior());
    }

    #[test]
    fn backward_reachability() {
        let g = ChainGraph::from_edges(4, [(0, 1), (1, 2), (3, 4)]);
        let target = BoxSet::from_nodes(4, [2]);
        assert_eq!(g.backward_reachable(&target).to_indices(), vec![0, 1, 2]);
        let ext = BoxSet::from_nodes(4, [4]);
        let b = g.backward_reachable(&ext);
        assert_eq!(b.to_indices(), vec![3]);
        assert!(b.contains_exterior());
    }

    #[test]
    fn epsilon_forms() {
        let w = OmegaPath::constant(1, 2);
        assert_eq!(EpsilonField::constant(0.1).unwrap().eval(&[3.0], &w).unwrap(), 0.1);
        let r = EpsilonField::radial(0.5, 2.0).unwrap();
        assert!((r.eval(&[3.0, 4.0], &w).unwrap() - 10.5).abs() < 1e-12);
        let capped = r.clone().with_clamp(1.0).unwrap();
        assert_eq!(capped.eval(&[3.0, 4.0], &w).unwrap(), 1.0);
        let per_symbol = EpsilonField::constant(0.1)
            .unwrap()
            .with_symbol_multipliers(vec![1.0, 3.0])
            .unwrap();
        assert!((per_symbol.eval(&[0.0], &w).unwrap() - 0.3).abs() < 1e-15);

        assert!(EpsilonField::constant(0.0).is_err());
        assert!(EpsilonField::radial(0.0, 1.0).is_err());
    }

    #[test]
    fn tabulated_interpolates_between_centres() {
        let g = BoxGrid::new(&[[0.0, 2.0], [0.0, 1.0]], &[2, 1]).unwrap();
        let eps = EpsilonField::tabulated(&g, vec![1.0, 3.0]).unwrap();
        let w = OmegaPath::constant(0, 1);
        assert!((eps.eval(&[0.5, 0.5], &w).unwrap() - 1.0).abs() < 1e-12);
        assert!((eps.eval(&[1.0, 0.2], &w).unwrap() - 2.0).abs() < 1e-12);
        assert!((eps.eval(&[1.5, 0.9], &w).unwrap() - 3.0).abs() < 1e-12);
        assert!((eps.eval(&[-7.0, 0.0], &w).unwrap() - 1.0).abs() < 1e-12);
        assert!(EpsilonField::tabulated(&g, vec![1.0]).is_err());
        assert!(EpsilonField::tabulated(&g, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn params_validation_names_fields() {
        assert!(ChainParams::new(1, 4, 1, 4).is_ok());
        let err = ChainParams::new(5, 4, 1, 8).unwrap_err();
        assert!(err.to_string().contains("t_max"), "{err}");
        assert!(ChainParams::new(0, 4, 1, 8).is_err());
        assert!(ChainParams::new(1, 4, 0, 8).is_err());
        assert!(ChainParams::new(1, 4, 1, 3).is_err());
    }

    #[test]
    fn identity_single_box_self_loop() {
        let grid = BoxGrid::new(&[[0.0, 1.0]], &[1]).unwrap();
        let g = build_chain_graph(
            &RandomMapSystem::identity(1),
            &grid,
            &EpsilonField::constant(0.1).unwrap(),
            &ChainParams::new(1, 1, 1, 1).unwrap(),
            &OmegaPath::constant(0, 1),
            &SamplingSpec::new(0),
        )
        .unwrap();
        assert!(g.has_edge(0, 0));
        assert_eq!(g.successors(0), &[0]);
        assert_eq!(g.successors(1), &[1]);
        assert_eq!(g.chain_recurrent_set().to_indices(), vec![0]);
        assert_eq!(g.forward_reachable(0).to_indices(), vec![0]);
    }

    #[test]
    fn short_paths_are_rejected() {
        let grid = BoxGrid::new(&[[0.0, 1.0]], &[2]).unwrap();
        let err = build_chain_graph(
            &RandomMapSystem::identity(1),
            &grid,
            &EpsilonField::constant(0.1).unwrap(),
            &ChainParams::new(1, 3, 1, 3).unwrap(),
            &OmegaPath::constant(0, 2),
            &SamplingSpec::new(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::WindowExhausted { .. }));
    }

    #[test]
    fn csv_export() {
        let g = ChainGraph::from_edges(2, [(0, 1), (1, 2)]);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "src_index,dst_index\n0,1\n1,2\n2,2\n");
    }
}
