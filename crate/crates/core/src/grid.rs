//! Box coverings of a rectangular window of ℝᵈ.
//!
//! A [`BoxGrid`] tiles the window `[lo_0, hi_0] × … × [lo_{d-1}, hi_{d-1}]`
//! with `n_0 × … × n_{d-1}` congruent cells. Cells are half-open
//! `[lo + i·w, lo + (i+1)·w)` except the last cell along each axis, which is
//! closed at `hi`, so every point of the window lies in exactly one cell.
//!
//! Everything outside the window is collapsed into a single absorbing
//! [`BoxId::Exterior`] node. Internally boxes are addressed by a flat node
//! index: interior cells use `0..len()` with axis 0 varying fastest, and the
//! exterior node is `len()`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of interior boxes of a grid.
pub const DEFAULT_MAX_BOXES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxId {
    Interior(Vec<usize>),
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    resolution: Vec<usize>,
    #[serde(skip)]
    width: Vec<f64>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    total: usize,
}

impl BoxGrid {
    /// Builds a grid over `bounds` (one `[lo, hi]` pair per axis) with the
    /// default box-count cap.
    pub fn new(bounds: &[[f64; 2]], resolution: &[usize]) -> Result<Self> {
        Self::with_cap(bounds, resolution, DEFAULT_MAX_BOXES)
    }

    pub fn with_cap(bounds: &[[f64; 2]], resolution: &[usize], max_boxes: usize) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidGrid("bounds must name at least one axis".into()));
        }
        if bounds.len() != resolution.len() {
            return Err(Error::InvalidGrid(format!(
                "{} bound pairs but {} resolution entries",
                bounds.len(),
                resolution.len()
            )));
        }
        let mut total: usize = 1;
        for (k, (&[lo, hi], &n)) in bounds.iter().zip(resolution).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidGrid(format!("axis {k}: bounds must be finite")));
            }
            if lo >= hi {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: lower bound {lo} is not below upper bound {hi}"
                )));
            }
            if n == 0 {
                return Err(Error::InvalidGrid(format!("axis {k}: resolution must be positive")));
            }
            total = total
                .checked_mul(n)
                .filter(|&t| t <= max_boxes)
                .ok_or_else(|| {
                    Error::InvalidGrid(format!("box count exceeds the cap of {max_boxes}"))
                })?;
        }
        let lo: Vec<f64> = bounds.iter().map(|b| b[0]).collect();
        let hi: Vec<f64> = bounds.iter().map(|b| b[1]).collect();
        Ok(Self::assemble(lo, hi, resolution.to_vec()))
    }

    fn assemble(lo: Vec<f64>, hi: Vec<f64>, resolution: Vec<usize>) -> Self {
        let width = lo
            .iter()
            .zip(&hi)
            .zip(&resolution)
            .map(|((l, h), &n)| (h - l) / n as f64)
            .collect();
        let mut strides = Vec::with_capacity(resolution.len());
        let mut acc = 1;
        for &n in &resolution {
            strides.push(acc);
            acc *= n;
        }
        BoxGrid {
            lo,
            hi,
            resolution,
            width,
            strides,
            total: acc,
        }
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    /// Number of interior boxes.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat node index of the exterior.
    pub fn exterior(&self) -> usize {
        self.total
    }

    /// Interior boxes plus the exterior node.
    pub fn node_count(&self) -> usize {
        self.total + 1
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn widths(&self) -> &[f64] {
        &self.width
    }

    pub fn bounds(&self) -> Vec<[f64; 2]> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| [l, h]).collect()
    }

    /// Euclidean diameter of a single box.
    pub fn diameter(&self) -> f64 {
        self.width.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Coordinate of the `i`-th cell edge along `axis`; edge `n` is exactly `hi`.
    fn edge(&self, axis: usize, i: usize) -> f64 {
        if i >= self.resolution[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.width[axis]
        }
    }

    pub fn flat(&self, id: &BoxId) -> Result<usize> {
        match id {
            BoxId::Exterior => Ok(self.total),
            BoxId::Interior(idx) => {
                if idx.len() != self.dim() {
                    return Err(Error::Dimension {
                        expected: self.dim(),
                        found: idx.len(),
                    });
                }
                let mut flat = 0;
                for (k, &i) in idx.iter().enumerate() {
                    if i >= self.resolution[k] {
                        return Err(Error::InvalidGrid(format!(
                            "index {i} out of range on axis {k}"
                        )));
                    }
                    flat += i * self.strides[k];
                }
                Ok(flat)
            }
        }
    }

    pub fn box_id(&self, node: usize) -> BoxId {
        if node >= self.total {
            BoxId::Exterior
        } else {
            BoxId::Interior(self.multi_index(node))
        }
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        self.resolution
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| (flat / s) % n)
            .collect()
    }

    /// Closed extent `(lower corner, upper corner)` of an interior box.
    pub fn box_extent(&self, flat: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.multi_index(flat);
        let lo = idx.iter().enumerate().map(|(k, &i)| self.edge(k, i)).collect();
        let hi = idx.iter().enumerate().map(|(k, &i)| self.edge(k, i + 1)).collect();
        (lo, hi)
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        let (lo, hi) = self.box_extent(flat);
        lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: point.len(),
            });
        }
        if let Some((index, &value)) = point.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(())
    }

    /// The box containing `point`, or `Exterior` outside the window.
    pub fn box_of(&self, point: &[f64]) -> Result<BoxId> {
        self.check_point(point)?;
        Ok(self.box_id(self.node_of(point)))
    }

    /// Flat-index form of [`box_of`](Self::box_of) for finite points of the right dimension.
    pub fn node_of(&self, point: &[f64]) -> usize {
        let mut flat = 0;
        for (k, &x) in point.iter().enumerate() {
            // written so that NaN also lands outside
            if !(x >= self.lo[k] && x <= self.hi[k]) {
                return self.total;
            }
            let n = self.resolution[k];
            let i = ((x - self.lo[k]) / self.width[k]).floor() as usize;
            flat += i.min(n - 1) * self.strides[k];
        }
        flat
    }

    pub fn contains_point(&self, point: &[f64]) -> bool {
        point
            .iter()
            .enumerate()
            .all(|(k, &x)| x >= self.lo[k] && x <= self.hi[k])
    }

    /// Euclidean distance from `point` to the closed box `flat`.
    pub fn distance_to_box(&self, point: &[f64], flat: usize) -> f64 {
        let idx = self.multi_index(flat);
        let mut acc = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            let (l, h) = (self.edge(k, i), self.edge(k, i + 1));
            let x = point[k];
            let gap = if x < l {
                l - x
            } else if x > h {
                x - h
            } else {
                0.0
            };
            acc += gap * gap;
        }
        acc.sqrt()
    }

    /// Calls `visit` for every interior box whose closure lies within `radius`
    /// of `point` (`dist ≤ radius`, or `dist < radius` when `strict`).
    pub fn for_each_box_near(
        &self,
        point: &[f64],
        radius: f64,
        strict: bool,
        mut visit: impl FnMut(usize),
    ) {
        let d = self.dim();
        let mut first = vec![0usize; d];
        let mut last = vec![0usize; d];
        for k in 0..d {
            let n = self.resolution[k] as f64;
            let a = ((point[k] - radius - self.lo[k]) / self.width[k]).floor() - 1.0;
            let b = ((point[k] + radius - self.lo[k]) / self.width[k]).floor() + 1.0;
            if b < 0.0 || a > n - 1.0 {
                return;
            }
            first[k] = a.max(0.0) as usize;
            last[k] = b.min(n - 1.0) as usize;
        }
        let mut cursor = first.clone();
        loop {
            let flat: usize = cursor.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
            let dist = self.distance_to_box(point, flat);
            if dist < radius || (!strict && dist <= radius) {
                visit(flat);
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                if cursor[k] < last[k] {
                    cursor[k] += 1;
                    break;
                }
                cursor[k] = first[k];
                k += 1;
            }
        }
    }

    /// Euclidean distance from `point` to the union of the closed interior
    /// boxes of `set`; `f64::INFINITY` when `set` has no interior boxes.
    pub fn point_to_set_distance(&self, point: &[f64], set: &BoxSet) -> Result<f64> {
        self.check_point(point)?;
        Ok(set
            .iter()
            .map(|b| self.distance_to_box(point, b))
            .fold(f64::INFINITY, f64::min))
    }

    /// The grid obtained by adding `halo` boxes of the same size on every
    /// side of every axis.
    pub fn dilated(&self, halo: usize) -> Result<Self> {
        let bounds: Vec<[f64; 2]> = (0..self.dim())
            .map(|k| {
                let pad = halo as f64 * self.width[k];
                [self.lo[k] - pad, self.hi[k] + pad]
            })
            .collect();
        let resolution: Vec<usize> = self.resolution.iter().map(|n| n + 2 * halo).collect();
        Self::new(&bounds, &resolution)
    }

    /// True when both grids have the same box size and their cell edges
    /// line up, so boxes correspond one to one on the overlap.
    pub fn is_aligned_with(&self, other: &BoxGrid) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        (0..self.dim()).all(|k| {
            let w = self.width[k];
            let same_size = (w - other.width[k]).abs() <= 1e-9 * w;
            let offset = (other.lo[k] - self.lo[k]) / w;
            same_size && (offset - offset.round()).abs() <= 1e-6
        })
    }

    /// Carries `set` onto an aligned grid `target`. Boxes falling outside
    /// `target` are folded into its exterior flag.
    pub fn transfer(&self, set: &BoxSet, target: &BoxGrid) -> Result<BoxSet> {
        if !self.is_aligned_with(target) {
            return Err(Error::InvalidGrid("grids are not aligned".into()));
        }
        let mut out = BoxSet::empty(target.len());
        for b in set.iter() {
            out.insert(target.node_of(&self.center(b)));
        }
        if set.contains_exterior() {
            out.insert_exterior();
        }
        Ok(out)
    }
}

/// A set of boxes of one grid: a bitset over interior boxes plus a flag for
/// the exterior node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxSet {
    words: Vec<u64>,
    interior: usize,
    exterior: bool,
}

impl BoxSet {
    pub fn empty(interior: usize) -> Self {
        BoxSet {
            words: vec![0; interior.div_ceil(64)],
            interior,
            exterior: false,
        }
    }

    /// Every interior box, without the exterior.
    pub fn interior_full(interior: usize) -> Self {
        let mut s = Self::empty(interior);
        s.words.iter_mut().for_each(|w| *w = !0);
        s.trim();
        s
    }

    /// Every interior box and the exterior.
    pub fn full(interior: usize) -> Self {
        let mut s = Self::interior_full(interior);
        s.exterior = true;
        s
    }

    pub fn from_nodes(interior: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(interior);
        for n in nodes {
            s.insert(n);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.interior % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Number of interior boxes of the underlying grid.
    pub fn universe(&self) -> usize {
        self.interior
    }

    /// Inserts a node; `universe()` denotes the exterior.
    pub fn insert(&mut self, node: usize) {
        if node >= self.interior {
            self.exterior = true;
        } else {
            self.words[node / 64] |= 1 << (node % 64);
        }
    }

    pub fn remove(&mut self, node: usize) {
        if node >= self.interior {
            self.exterior = false;
        } else {
            self.words[node / 64] &= !(1 << (node % 64));
        }
    }

    pub fn contains(&self, node: usize) -> bool {
        if node >= self.interior {
            self.exterior
        } else {
            self.words[node / 64] & (1 << (node % 64)) != 0
        }
    }

    pub fn insert_exterior(&mut self) {
        self.exterior = true;
    }

    pub fn contains_exterior(&self) -> bool {
        self.exterior
    }

    pub fn without_exterior(&self) -> Self {
        let mut s = self.clone();
        s.exterior = false;
        s
    }

    /// Number of interior boxes in the set.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of nodes, counting the exterior.
    pub fn node_len(&self) -> usize {
        self.len() + usize::from(self.exterior)
    }

    /// True when the set holds no interior box and not the exterior.
    pub fn is_empty(&self) -> bool {
        !self.exterior && self.words.iter().all(|&w| w == 0)
    }

    /// Interior boxes in increasing flat order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + tz)
            })
        })
    }

    /// Interior boxes followed by the exterior node when present.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter().chain(self.exterior.then_some(self.interior))
    }

    fn check(&self, other: &BoxSet) {
        assert_eq!(self.interior, other.interior, "box sets over different grids");
    }

    pub fn union(&self, other: &BoxSet) -> BoxSet {
        self.check(other);
        BoxSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            interior: self.interior,
            exterior: self.exterior || other.exterior,
        }
    }

    pub fn intersection(&self, other: &BoxSet) -> BoxSet {
        self.check(other);
        BoxSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            interior: self.interior,
            exterior: self.exterior && other.exterior,
        }
    }

    pub fn difference(&self, other: &BoxSet) -> BoxSet {
        self.check(other);
        BoxSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
            interior: self.interior,
            exterior: self.exterior && !other.exterior,
        }
    }

    pub fn symmetric_difference(&self, other: &BoxSet) -> BoxSet {
        self.check(other);
        BoxSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            interior: self.interior,
            exterior: self.exterior != other.exterior,
        }
    }

    /// Complement relative to all interior boxes plus the exterior.
    pub fn complement(&self) -> BoxSet {
        let mut s = BoxSet {
            words: self.words.iter().map(|w| !w).collect(),
            interior: self.interior,
            exterior: !self.exterior,
        };
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &BoxSet) {
        self.check(other);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
        self.exterior |= other.exterior;
    }

    pub fn intersect_with(&mut self, other: &BoxSet) {
        self.check(other);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a &= b);
        self.exterior &= other.exterior;
    }

    pub fn is_subset(&self, other: &BoxSet) -> bool {
        self.check(other);
        (!self.exterior || other.exterior)
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &BoxSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Serialized form: sorted interior flat indices plus the exterior flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSetRecord {
    pub indices: Vec<usize>,
    pub exterior: bool,
}

impl From<&BoxSet> for BoxSetRecord {
    fn from(s: &BoxSet) -> Self {
        BoxSetRecord {
            indices: s.to_indices(),
            exterior: s.contains_exterior(),
        }
    }
}

impl BoxSetRecord {
    pub fn to_set(&self, interior: usize) -> Result<BoxSet> {
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= interior) {
            return Err(Error::config(
                "indices",
                format!("index {bad} exceeds the grid's {interior} boxes"),
            ));
        }
        let mut s = BoxSet::from_nodes(interior, self.indices.iter().copied());
        if self.exterior {
            s.insert_exterior();
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square4() -> BoxGrid {
        BoxGrid::new(&[[-2.0, 2.0], [-2.0, 2.0]], &[4, 4]).unwrap()
    }

    fn interior(g: &BoxGrid, idx: &[usize]) -> usize {
        g.flat(&BoxId::Interior(idx.to_vec())).unwrap()
    }

    #[test]
    fn tiling_counts_and_diameter() {
        let g = square4();
        assert_eq!(g.len(), 16);
        assert_eq!(g.widths(), &[1.0, 1.0]);

        let unit = BoxGrid::new(&[[0.0, 1.0]], &[1]).unwrap();
        assert_eq!(unit.len(), 1);
        assert_eq!(unit.box_extent(0), (vec![0.0], vec![1.0]));

        let fine = BoxGrid::new(&[[-4.0, 4.0], [-4.0, 4.0]], &[32, 32]).unwrap();
        assert_eq!(fine.len(), 1024);
        assert!((fine.diameter() - 2f64.sqrt() * 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(BoxGrid::new(&[[1.0, 1.0]], &[3]).is_err());
        assert!(BoxGrid::new(&[[2.0, 1.0]], &[3]).is_err());
        assert!(BoxGrid::new(&[[0.0, 1.0]], &[0]).is_err());
        assert!(BoxGrid::new(&[[0.0, f64::INFINITY]], &[2]).is_err());
        assert!(BoxGrid::with_cap(&[[0.0, 1.0], [0.0, 1.0]], &[100, 100], 9_999).is_err());
        assert!(BoxGrid::with_cap(&[[0.0, 1.0], [0.0, 1.0]], &[100, 100], 10_000).is_ok());
    }

    #[test]
    fn box_of_convention() {
        let g = square4();
        assert_eq!(g.box_of(&[0.5, 0.5]).unwrap(), BoxId::Interior(vec![2, 2]));
        assert_eq!(g.box_of(&[3.0, 0.0]).unwrap(), BoxId::Exterior);
        assert_eq!(g.box_of(&[1.0, 0.0]).unwrap(), BoxId::Interior(vec![3, 2]));
        // last cell is closed at hi
        assert_eq!(g.box_of(&[2.0, 2.0]).unwrap(), BoxId::Interior(vec![3, 3]));
        assert_eq!(g.box_of(&[-2.0, -2.0]).unwrap(), BoxId::Interior(vec![0, 0]));
        assert!(matches!(g.box_of(&[f64::NAN, 0.0]), Err(Error::NonFinite { index: 0, .. })));
        assert!(g.box_of(&[0.0]).is_err());
    }

    #[test]
    fn distance_to_sets() {
        let g = square4();
        let origin_box = g.node_of(&[0.0, 0.0]);
        let s = BoxSet::from_nodes(g.len(), [origin_box]);
        assert_eq!(g.point_to_set_distance(&[0.0, 0.0], &s).unwrap(), 0.0);

        let corner = BoxSet::from_nodes(g.len(), [interior(&g, &[0, 0])]);
        let d = g.point_to_set_distance(&[2.0, 2.0], &corner).unwrap();
        assert!((d - 18f64.sqrt()).abs() < 1e-12);

        let none = BoxSet::empty(g.len());
        assert!(g.point_to_set_distance(&[0.3, 0.1], &none).unwrap().is_infinite());
    }

    #[test]
    fn neighbourhood_queries_respect_closure() {
        let g = square4();
        let mut hits = Vec::new();
        // a point on an interior edge touches both adjacent closed boxes
        g.for_each_box_near(&[1.0, 0.5], 0.0, false, |b| hits.push(b));
        hits.sort();
        assert_eq!(hits, vec![interior(&g, &[2, 2]), interior(&g, &[3, 2])]);

        hits.clear();
        g.for_each_box_near(&[1.0, 0.5], 0.0, true, |b| hits.push(b));
        assert!(hits.is_empty());

        hits.clear();
        g.for_each_box_near(&[5.0, 5.0], 1.0, false, |b| hits.push(b));
        assert!(hits.is_empty());
    }

    #[test]
    fn set_algebra_basics() {
        let n = 70;
        let a = BoxSet::from_nodes(n, [0, 5, 64, 69]);
        let b = BoxSet::from_nodes(n, [5, 6, 70]);
        assert_eq!(a.union(&b).node_len(), 6);
        assert_eq!(a.intersection(&b).to_indices(), vec![5]);
        assert!(b.contains_exterior());
        assert_eq!(a.complement().len(), 66);
        assert!(a.complement().contains_exterior());
        assert_eq!(BoxSet::full(n).complement(), BoxSet::empty(n));
        assert!(a.intersection(&b).is_subset(&a));
        assert!(!b.is_subset(&a));
    }

    #[test]
    fn dilation_and_transfer() {
        let g = square4();
        let big = g.dilated(2).unwrap();
        assert_eq!(big.resolution(), &[8, 8]);
        assert_eq!(big.bounds(), vec![[-4.0, 4.0], [-4.0, 4.0]]);
        assert!(g.is_aligned_with(&big));

        let s = BoxSet::from_nodes(g.len(), [interior(&g, &[0, 3])]);
        let up = g.transfer(&s, &big).unwrap();
        assert_eq!(up.to_indices(), vec![big.flat(&BoxId::Interior(vec![2, 5])).unwrap()]);
        let back = big.transfer(&BoxSet::from_nodes(big.len(), [0]), &g).unwrap();
        assert!(back.contains_exterior());
        assert_eq!(back.len(), 0);

        let skew = BoxGrid::new(&[[-2.3, 1.7], [-2.0, 2.0]], &[4, 4]).unwrap();
        assert!(!g.is_aligned_with(&skew));
    }

    #[test]
    fn record_round_trip() {
        let s = BoxSet::from_nodes(10, [3, 1, 10]);
        let rec = BoxSetRecord::from(&s);
        assert_eq!(rec.indices, vec![1, 3]);
        assert!(rec.exterior);
        assert_eq!(rec.to_set(10).unwrap(), s);
        assert!(BoxSetRecord { indices: vec![11], exterior: false }.to_set(10).is_err());
    }
}
