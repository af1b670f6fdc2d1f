//! Sign-assignment search for hyperbolic sums `Σ_{|R|=2^{-n}} ε_R h_R`.
//!
//! Rectangles are enumerated shape-lexicographically, then by row-major
//! position; sign vectors and bitstrings follow that order (`1` for +1).
//! The objective is the sup norm, evaluated on the grid with `n+1` levels
//! per axis, where every `h_R` is constant on cells.

use std::ops::{Add, Neg, Sub};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::ShapeVector;
use crate::hyperbolic::count_rectangles;
use crate::stats::{self, LinearFit};
use crate::{Error, Result};

/// Largest `M` accepted by [`exhaustive_min`].
pub const MAX_EXHAUSTIVE: usize = 24;

/// Cap on `2^{d(n+1)}` grid cells for cover-list based search.
pub const MAX_SEARCH_CELLS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    BranchAndBound,
    LocalSearch,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The value is the true minimum.
    Proved,
    /// Best value found before the budget ran out.
    Incumbent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientModel {
    Signs,
    Gaussian,
}

/// Outcome of a search or a Monte-Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub n: u32,
    pub d: usize,
    pub method: Method,
    /// Minimum (or, for Monte-Carlo, mean) sup norm.
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    /// Certified lower bound for the sup norm of any sign assignment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "bitstring")]
    pub assignment: Option<Vec<i8>>,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<CoefficientModel>,
}

fn bitstring<S: serde::Serializer>(v: &Option<Vec<i8>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(signs) => s.serialize_str(&to_bitstring(signs)),
        None => s.serialize_none(),
    }
}

/// `1` for +1, `0` for −1.
pub fn to_bitstring(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '1' } else { '0' }).collect()
}

pub fn from_bitstring(bits: &str) -> Result<Vec<i8>> {
    bits.chars()
        .map(|c| match c {
            '1' => Ok(1),
            '0' => Ok(-1),
            _ => Err(Error::InvalidInput(format!("invalid bit {c:?}"))),
        })
        .collect()
}

impl SearchResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Lower bound for `‖Σ ε_R h_R‖_∞` valid for every ±1 assignment.
///
/// In the plane the Riesz product gives `n+1`. In general every cell value
/// is a sum of `S` signs (one per shape), so it has the parity of `S`, and
/// the mean of the squares is `S`; hence at least `⌈√S⌉` rounded up to the
/// parity of `S`.
pub fn certified_lower_bound(n: u32, d: usize) -> f64 {
    let s = ShapeVector::with_order(n, d).len() as u64;
    if d == 2 {
        return (n + 1) as f64;
    }
    let mut b = (s as f64).sqrt().ceil() as u64;
    while b * b < s {
        b += 1;
    }
    if (b + s) % 2 == 1 {
        b += 1;
    }
    b as f64
}

/// Which cells each rectangle covers, and with which sign of `h_R`.
#[derive(Clone, Debug)]
pub struct CoverLists {
    cells: usize,
    shapes: usize,
    per_rect: usize,
    cover_cells: Vec<u32>,
    cover_signs: Vec<i8>,
}

impl CoverLists {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let total_level = d as u64 * (n as u64 + 1);
        if total_level > MAX_SEARCH_CELLS.trailing_zeros() as u64 {
            return Err(Error::budget(
                format!("search grid 2^{total_level} cells for n = {n}, d = {d}"),
                "lower n; use mc for larger scales",
            ));
        }
        let m = count_rectangles(n, d)? as usize;
        let cells = 1usize << total_level;
        let per_rect = 1usize << (total_level - n as u64);
        let shapes = ShapeVector::with_order(n, d);
        let mut cover_cells = vec![0u32; m * per_rect];
        let mut cover_signs = vec![0i8; m * per_rect];
        let level = n + 1;
        let mut fill = vec![0usize; m];
        let mut offset = 0;
        let mut coords = vec![0usize; d];
        for shape in &shapes {
            let r = shape.entries();
            for flat in 0..cells {
                let mut rest = flat;
                for j in (0..d).rev() {
                    coords[j] = rest & ((1usize << level) - 1);
                    rest >>= level;
                }
                let mut pos = 0usize;
                let mut negative = false;
                for j in 0..d {
                    let drop = level - r[j];
                    pos = (pos << r[j]) | (coords[j] >> drop);
                    negative ^= (coords[j] >> (drop - 1)) & 1 == 0;
                }
                let rect = offset + pos;
                let slot = rect * per_rect + fill[rect];
                cover_cells[slot] = flat as u32;
                cover_signs[slot] = if negative { -1 } else { 1 };
                fill[rect] += 1;
            }
            offset += 1usize << shape.order();
        }
        debug_assert!(fill.iter().all(|&f| f == per_rect));
        Ok(Self {
            cells,
            shapes: shapes.len(),
            per_rect,
            cover_cells,
            cover_signs,
        })
    }

    pub fn rectangles(&self) -> usize {
        self.cover_cells.len() / self.per_rect
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cells covered by every rectangle: `2^{d(n+1)−n}`.
    pub fn per_rect(&self) -> usize {
        self.per_rect
    }

    fn cover(&self, rect: usize) -> impl Iterator<Item = (usize, i32)> + '_ {
        let range = rect * self.per_rect..(rect + 1) * self.per_rect;
        self.cover_cells[range.clone()]
            .iter()
            .zip(&self.cover_signs[range])
            .map(|(&c, &s)| (c as usize, s as i32))
    }

    /// Cell values of `Σ ε_R h_R`.
    pub fn values(&self, signs: &[i8]) -> Vec<i32> {
        let mut v = vec![0i32; self.cells];
        for (rect, &e) in signs.iter().enumerate() {
            for (c, s) in self.cover(rect) {
                v[c] += e as i32 * s;
            }
        }
        v
    }

    pub fn sup(&self, signs: &[i8]) -> i32 {
        self.values(signs).iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// Cell values with a histogram of `|value|` for O(1) amortized sup updates.
struct Tracker {
    values: Vec<i32>,
    hist: Vec<u32>,
    top: usize,
}

impl Tracker {
    fn new(values: Vec<i32>, range: usize) -> Self {
        let mut hist = vec![0u32; range + 1];
        for v in &values {
            hist[v.unsigned_abs() as usize] += 1;
        }
        let top = hist.iter().rposition(|&h| h > 0).unwrap_or(0);
        Self { values, hist, top }
    }

    fn flip(&mut self, cover: &CoverLists, rect: usize, old_sign: i8) {
        let delta = -2 * old_sign as i32;
        for (c, s) in cover.cover(rect) {
            let v = &mut self.values[c];
            self.hist[v.unsigned_abs() as usize] -= 1;
            *v += delta * s;
            let a = v.unsigned_abs() as usize;
            self.hist[a] += 1;
            if a > self.top {
                self.top = a;
            }
        }
        while self.top > 0 && self.hist[self.top] == 0 {
            self.top -= 1;
        }
    }

    /// `(sup, number of cells at the sup)` after flipping `rect`, without
    /// changing state.
    fn probe(&mut self, cover: &CoverLists, rect: usize, old_sign: i8) -> (usize, u32) {
        let delta = -2 * old_sign as i32;
        let mut top = self.top;
        for (c, s) in cover.cover(rect) {
            let v = self.values[c];
            self.hist[v.unsigned_abs() as usize] -= 1;
            let a = (v + delta * s).unsigned_abs() as usize;
            self.hist[a] += 1;
            top = top.max(a);
        }
        while top > 0 && self.hist[top] == 0 {
            top -= 1;
        }
        let result = (top, self.hist[top]);
        for (c, s) in cover.cover(rect) {
            let v = self.values[c];
            self.hist[(v + delta * s).unsigned_abs() as usize] -= 1;
            self.hist[v.unsigned_abs() as usize] += 1;
        }
        result
    }
}

/// Exact minimum of the sup norm over all `2^M` sign assignments.
///
/// The first rectangle is fixed to +1 (the sup norm is invariant under the
/// global flip). The remaining assignments are split into blocks by their
/// high bits; each block walks its low bits in Gray-code order so that
/// consecutive assignments differ by one flip.
pub fn exhaustive_min(n: u32, d: usize) -> Result<SearchResult> {
    let m = count_rectangles(n, d)? as usize;
    if m > MAX_EXHAUSTIVE {
        return Err(Error::budget(
            format!("exhaustive search over 2^{m} assignments"),
            format!("M <= {MAX_EXHAUSTIVE}; use branch_and_bound"),
        ));
    }
    let cover = CoverLists::new(n, d)?;
    let free = m - 1;
    let high = free.min(6);
    let low = free - high;
    let blocks: Vec<(i32, u64, Vec<i8>)> = (0..1u64 << high)
        .into_par_iter()
        .map(|block| {
            let mut signs = vec![1i8; m];
            for b in 0..high {
                if block >> b & 1 == 1 {
                    signs[1 + low + b] = -1;
                }
            }
            let mut t = Tracker::new(cover.values(&signs), cover.shapes);
            let mut best = (t.top as i32, 0u64);
            for g in 1..1u64 << low {
                let rect = 1 + g.trailing_zeros() as usize;
                t.flip(&cover, rect, signs[rect]);
                signs[rect] = -signs[rect];
                if (t.top as i32) < best.0 {
                    best = (t.top as i32, g);
                }
            }
            // reconstruct the assignment at Gray index best.1
            let gray = best.1 ^ (best.1 >> 1);
            let mut arg = vec![1i8; m];
            arg[1 + low..].copy_from_slice(&signs[1 + low..]);
            for b in 0..low {
                if gray >> b & 1 == 1 {
                    arg[1 + b] = -1;
                }
            }
            (best.0, block, arg)
        })
        .collect();
    let (value, _, assignment) = blocks
        .into_iter()
        .min_by_key(|(v, block, _)| (*v, *block))
        .expect("at least one block");
    debug_assert_eq!(cover.sup(&assignment), value);
    Ok(SearchResult {
        n,
        d,
        method: Method::Exhaustive,
        value: value as f64,
        stderr: None,
        status: Some(Status::Proved),
        certificate: Some(certified_lower_bound(n, d)),
        assignment: Some(assignment),
        evaluations: 1u64 << free,
        seed: None,
        model: None,
    })
}

/// Limits for [`branch_and_bound`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub time: Duration,
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            time: Duration::from_secs(60),
            nodes: 1 << 32,
        }
    }
}

struct Bnb<'a> {
    cover: &'a CoverLists,
    partial: Vec<i32>,
    unfixed: Vec<i32>,
    /// histogram of `|partial| − unfixed + offset`
    hist: Vec<u32>,
    offset: i32,
    signs: Vec<i8>,
    best: i32,
    best_signs: Vec<i8>,
    lower: i32,
    nodes: u64,
    budget: SearchBudget,
    start: Instant,
    stopped: bool,
}

impl Bnb<'_> {
    fn key(&self, c: usize) -> usize {
        (self.partial[c].abs() - self.unfixed[c] + self.offset) as usize
    }

    fn apply(&mut self, rect: usize, sign: i32, undo: bool) {
        for (c, s) in self.cover.cover(rect) {
            let k = self.key(c);
            self.hist[k] -= 1;
            if undo {
                self.partial[c] -= sign * s;
                self.unfixed[c] += 1;
            } else {
                self.partial[c] += sign * s;
                self.unfixed[c] -= 1;
            }
            let k = self.key(c);
            self.hist[k] += 1;
        }
    }

    fn bound(&self) -> i32 {
        self.hist.iter().rposition(|&h| h > 0).unwrap_or(0) as i32 - self.offset
    }

    fn search(&mut self, rect: usize) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 0 && (self.nodes >= self.budget.nodes || self.start.elapsed() >= self.budget.time) {
            self.stopped = true;
            return;
        }
        let bound = self.bound();
        if bound >= self.best {
            return;
        }
        if rect == self.signs.len() {
            self.best = bound;
            self.best_signs.copy_from_slice(&self.signs);
            if self.best <= self.lower {
                self.stopped = true;
            }
            return;
        }
        let choices: &[i8] = if rect == 0 { &[1] } else { &[1, -1] };
        for &s in choices {
            self.signs[rect] = s;
            self.apply(rect, s as i32, false);
            self.search(rect + 1);
            self.apply(rect, s as i32, true);
            if self.stopped {
                return;
            }
        }
    }
}

/// Depth-first branch and bound over sign assignments.
///
/// A partial assignment is cut when `max_c (|partial_c| − unfixed_c)` is at
/// least the incumbent: each unfixed rectangle moves a cell by at most 1,
/// so no completion can do strictly better. The search stops early when
/// the incumbent meets [`certified_lower_bound`].
pub fn branch_and_bound(n: u32, d: usize, budget: SearchBudget) -> Result<SearchResult> {
    let cover = CoverLists::new(n, d)?;
    let m = cover.rectangles();
    let s = cover.shapes as i32;
    let lower = certified_lower_bound(n, d);
    let mut hist = vec![0u32; 2 * s as usize + 1];
    hist[0] = cover.cells as u32;
    let mut state = Bnb {
        cover: &cover,
        partial: vec![0; cover.cells],
        unfixed: vec![s; cover.cells],
        hist,
        offset: s,
        signs: vec![1; m],
        best: s + 1,
        best_signs: vec![1; m],
        lower: lower as i32,
        nodes: 0,
        budget,
        start: Instant::now(),
        stopped: false,
    };
    state.search(0);
    let proved = !state.stopped || state.best <= state.lower;
    Ok(SearchResult {
        n,
        d,
        method: Method::BranchAndBound,
        value: state.best as f64,
        stderr: None,
        status: Some(if proved { Status::Proved } else { Status::Incumbent }),
        certificate: Some(lower),
        assignment: Some(state.best_signs),
        evaluations: state.nodes,
        seed: None,
        model: None,
    })
}

/// Best single-flip local minimum over `restarts` random starts.
///
/// Each step applies the flip that most improves the pair (sup, number of
/// cells at the sup), ties going to the lowest rectangle index.
pub fn local_search(n: u32, d: usize, restarts: usize, seed: u64) -> Result<SearchResult> {
    if restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    let cover = CoverLists::new(n, d)?;
    let m = cover.rectangles();
    let runs: Vec<(i32, Vec<i8>, u64)> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            let mut signs: Vec<i8> = (0..m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut t = Tracker::new(cover.values(&signs), cover.shapes);
            let mut evaluations = 1u64;
            loop {
                let current = (t.top, t.hist[t.top]);
                let mut best = current;
                let mut best_rect = None;
                for rect in 0..m {
                    let cand = t.probe(&cover, rect, signs[rect]);
                    evaluations += 1;
                    if cand < best {
                        best = cand;
                        best_rect = Some(rect);
                    }
                }
                match best_rect {
                    Some(rect) => {
                        t.flip(&cover, rect, signs[rect]);
                        signs[rect] = -signs[rect];
                    }
                    None => break,
                }
            }
            (t.top as i32, signs, evaluations)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (value, assignment, _) = runs
        .into_iter()
        .min_by_key(|r| r.0)
        .expect("at least one restart");
    Ok(SearchResult {
        n,
        d,
        method: Method::LocalSearch,
        value: value as f64,
        stderr: None,
        status: Some(Status::Incumbent),
        certificate: Some(certified_lower_bound(n, d)),
        assignment: Some(assignment),
        evaluations,
        seed: Some(seed),
        model: None,
    })
}

/// Arithmetic needed by the sup evaluator.
pub trait Scalar:
    Copy + Default + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Send + Sync
{
}

impl Scalar for f64 {}
impl Scalar for i32 {}

/// Exact sup norm of a hyperbolic sum without materializing the grid.
///
/// For each cell of the first `d−1` axes, the sum restricted to that cell is
/// a one-variable Haar series in the last coordinate with levels `0..=n`.
/// Its extreme values over leaves are found by a bottom-up pass over the
/// dyadic tree: at node `J` with coefficient `β_J`,
/// `max(J) = max(max(J−) − β_J, max(J+) + β_J)`, and likewise for the min.
#[derive(Clone, Debug)]
pub struct SupEvaluator {
    n: u32,
    d: usize,
    shapes: Vec<Vec<u32>>,
    offsets: Vec<usize>,
    rectangles: usize,
}

impl SupEvaluator {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let rectangles = count_rectangles(n, d)? as usize;
        if (d - 1) as u64 * (n as u64 + 1) > 40 || n > 30 {
            return Err(Error::budget(
                format!("sup evaluation for n = {n}, d = {d}"),
                "lower n",
            ));
        }
        let shapes: Vec<Vec<u32>> = ShapeVector::with_order(n, d)
            .into_iter()
            .map(|s| s.entries().to_vec())
            .collect();
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut acc = 0;
        for _ in &shapes {
            offsets.push(acc);
            acc += 1usize << n;
        }
        Ok(Self {
            n,
            d,
            shapes,
            offsets,
            rectangles,
        })
    }

    pub fn rectangles(&self) -> usize {
        self.rectangles
    }

    /// `max |Σ α_R h_R|` for coefficients in rectangle-enumeration order.
    pub fn sup<T: Scalar>(&self, coeffs: &[T]) -> T {
        assert_eq!(coeffs.len(), self.rectangles);
        let d = self.d;
        let level = self.n + 1;
        let prefix_cells = 1usize << ((d - 1) as u32 * level);
        let mut beta = vec![T::default(); (1usize << level) - 1];
        let mut hi = vec![T::default(); 1usize << level];
        let mut lo = vec![T::default(); 1usize << level];
        let mut coords = vec![0usize; d - 1];
        let mut best = T::default();
        for p in 0..prefix_cells {
            let mut rest = p;
            for j in (0..d - 1).rev() {
                coords[j] = rest & ((1usize << level) - 1);
                rest >>= level;
            }
            beta.iter_mut().for_each(|b| *b = T::default());
            for (shape, &offset) in self.shapes.iter().zip(&self.offsets) {
                let mut pos = 0usize;
                let mut negative = false;
                for j in 0..d - 1 {
                    let drop = level - shape[j];
                    pos = (pos << shape[j]) | (coords[j] >> drop);
                    negative ^= (coords[j] >> (drop - 1)) & 1 == 0;
                }
                let r_last = shape[d - 1];
                let width = 1usize << r_last;
                let block = &coeffs[offset + (pos << r_last)..offset + ((pos + 1) << r_last)];
                let target = &mut beta[width - 1..2 * width - 1];
                if negative {
                    for (t, &a) in target.iter_mut().zip(block) {
                        *t = *t - a;
                    }
                } else {
                    for (t, &a) in target.iter_mut().zip(block) {
                        *t = *t + a;
                    }
                }
            }
            hi.iter_mut().for_each(|v| *v = T::default());
            lo.iter_mut().for_each(|v| *v = T::default());
            for l in (0..level).rev() {
                let width = 1usize << l;
                let b = &beta[width - 1..2 * width - 1];
                for k in 0..width {
                    let (h0, h1) = (hi[2 * k] - b[k], hi[2 * k + 1] + b[k]);
                    let (l0, l1) = (lo[2 * k] - b[k], lo[2 * k + 1] + b[k]);
                    hi[k] = if h0 > h1 { h0 } else { h1 };
                    lo[k] = if l0 < l1 { l0 } else { l1 };
                }
            }
            if hi[0] > best {
                best = hi[0];
            }
            if -lo[0] > best {
                best = -lo[0];
            }
        }
        best
    }
}

/// Mean and standard error of the sup norm over `trials` independent draws
/// of all coefficients. Trial `t` uses ChaCha8 stream `t` of `seed`.
pub fn mc_expectation(n: u32, d: usize, trials: usize, seed: u64, model: CoefficientModel) -> Result<SearchResult> {
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let eval = SupEvaluator::new(n, d)?;
    let m = eval.rectangles();
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            match model {
                CoefficientModel::Signs => {
                    let c: Vec<i32> = (0..m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
                    eval.sup(&c) as f64
                }
                CoefficientModel::Gaussian => {
                    let c: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                    eval.sup(&c)
                }
            }
        })
        .collect();
    let (mean, se) = stats::mean_stderr(&samples);
    Ok(SearchResult {
        n,
        d,
        method: Method::MonteCarlo,
        value: mean,
        stderr: Some(se),
        status: None,
        certificate: match model {
            CoefficientModel::Signs => Some(certified_lower_bound(n, d)),
            CoefficientModel::Gaussian => None,
        },
        assignment: None,
        evaluations: trials as u64,
        seed: Some(seed),
        model: Some(model),
    })
}

/// Least squares of `log value` against `log n`.
pub fn exponent_fit(series: &[(f64, f64)]) -> Result<LinearFit> {
    let xs: Vec<f64> = series.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = series.iter().map(|s| s.1).collect();
    stats::exponent_fit(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridBudget;
    use crate::hyperbolic::{sup_norm, HaarExpansion};

    fn expansion(n: u32, d: usize, coeffs: &[f64]) -> HaarExpansion {
        let mut e = HaarExpansion::new(d, n).unwrap();
        let mut at = 0;
        for shape in ShapeVector::with_order(n, d) {
            let k = shape.count().unwrap() as usize;
            e.set_shape(&shape, coeffs[at..at + k].to_vec()).unwrap();
            at += k;
        }
        e
    }

    #[test]
    fn bitstrings() {
        let s = vec![1, -1, -1, 1];
        assert_eq!(to_bitstring(&s), "1001");
        assert_eq!(from_bitstring("1001").unwrap(), s);
        assert!(from_bitstring("12").is_err());
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(certified_lower_bound(3, 2), 4.0);
        assert_eq!(certified_lower_bound(2, 3), 4.0);
        assert_eq!(certified_lower_bound(5, 1), 1.0);
        // S = 15 at n = 4, d = 3: √15 ≈ 3.87 → 4 → parity of 15 → 5
        assert_eq!(certified_lower_bound(4, 3), 5.0);
    }

    #[test]
    fn cover_lists_match_grid() {
        for (n, d) in [(2, 2), (1, 3), (3, 1)] {
            let cover = CoverLists::new(n, d).unwrap();
            let m = cover.rectangles();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let signs: Vec<i8> = (0..m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let coeffs: Vec<f64> = signs.iter().map(|&s| s as f64).collect();
            let g = expansion(n, d, &coeffs).to_grid(GridBudget::default()).unwrap();
            let v = cover.values(&signs);
            assert!(v.iter().zip(g.values()).all(|(a, b)| *a as f64 == *b));
        }
    }

    #[test]
    fn sup_evaluator_matches_grid() {
        for (n, d) in [(0, 1), (4, 1), (3, 2), (2, 3), (1, 4)] {
            let eval = SupEvaluator::new(n, d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let c: Vec<f64> = (0..eval.rectangles()).map(|_| rng.sample(StandardNormal)).collect();
            let g = expansion(n, d, &c).to_grid(GridBudget::default()).unwrap();
            assert!((eval.sup(&c) - sup_norm(&g)).abs() < 1e-12, "n={n} d={d}");
        }
    }

    #[test]
    fn exhaustive_small() {
        let r = exhaustive_min(1, 2).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.evaluations, 8);
        let r = exhaustive_min(3, 1).unwrap();
        assert_eq!(r.value, 1.0);
        let r = exhaustive_min(2, 2).unwrap();
        assert!(r.value >= 3.0);
        assert!(exhaustive_min(3, 2).is_err());
    }

    /// Plain enumeration of every assignment.
    fn brute_min(n: u32, d: usize) -> i32 {
        let cover = CoverLists::new(n, d).unwrap();
        let m = cover.rectangles();
        (0..1u64 << m)
            .map(|mask| {
                let signs: Vec<i8> = (0..m).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }).collect();
                cover.sup(&signs)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        // d = 4, n = 1: four shapes, M = 8; the min is not forced by a bound
        for (n, d) in [(1, 2), (2, 2), (1, 3), (1, 4)] {
            let r = exhaustive_min(n, d).unwrap();
            assert_eq!(r.value as i32, brute_min(n, d), "n={n} d={d}");
            let cover = CoverLists::new(n, d).unwrap();
            assert_eq!(cover.sup(r.assignment.as_ref().unwrap()) as f64, r.value);
        }
    }

    #[test]
    fn branch_and_bound_agrees() {
        for (n, d) in [(1, 2), (2, 2), (1, 3), (1, 4)] {
            let b = branch_and_bound(n, d, SearchBudget::default()).unwrap();
            assert_eq!(b.status, Some(Status::Proved));
            assert_eq!(b.value, exhaustive_min(n, d).unwrap().value);
        }
        let b = branch_and_bound(3, 2, SearchBudget::default()).unwrap();
        assert!(b.value >= 4.0);
    }

    #[test]
    fn local_search_is_deterministic_upper_bound() {
        let a = local_search(2, 2, 4, 11).unwrap();
        assert_eq!(a, local_search(2, 2, 4, 11).unwrap());
        assert!(a.value >= exhaustive_min(2, 2).unwrap().value);
        let cover = CoverLists::new(2, 2).unwrap();
        assert_eq!(cover.sup(a.assignment.as_ref().unwrap()) as f64, a.value);
    }

    #[test]
    fn mc_small_case_matches_enumeration() {
        // d = 2, n = 1: every assignment has sup exactly 2
        let r = mc_expectation(1, 2, 50, 3, CoefficientModel::Signs).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.stderr, Some(0.0));
        let g = mc_expectation(2, 2, 50, 3, CoefficientModel::Gaussian).unwrap();
        assert_eq!(g, mc_expectation(2, 2, 50, 3, CoefficientModel::Gaussian).unwrap());
        assert!(g.value > 0.0);
    }

    #[test]
    fn json_line() {
        let r = exhaustive_min(1, 2).unwrap();
        let j = r.to_json().unwrap();
        assert!(j.contains("\"method\":\"exhaustive\""));
        assert!(j.contains("\"assignment\":\"1"));
    }
}
