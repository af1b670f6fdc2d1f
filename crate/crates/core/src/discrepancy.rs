//! The discrepancy function `D_N(x) = ♯(P ∩ [0,x)) − N·Π x_j`.
//!
//! Box membership is strict in every coordinate. `D_N` is piecewise
//! multilinear, so its Haar coefficients, its L² norm and its pairing with
//! any grid function have closed forms; only the L^p (p ≠ 2) and Orlicz
//! norms are estimated by quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicInterval, DyadicRectangle, ShapeVector};
use crate::grid::{pairwise_sum, pairwise_sum_by, GridBudget, GridFunction};
use crate::hyperbolic::{orlicz_norm_uniform, OrliczSpec, RFunction, DEFAULT_ORLICZ_TOL};
use crate::points::PointSet;
use crate::stats::mean_stderr;
use crate::{Error, Result};

/// Largest `N` for the pairwise L² formula.
pub const MAX_L2_POINTS: usize = 1 << 16;

/// Largest `|r|` for a dense per-shape coefficient table.
pub const MAX_SHAPE_ORDER: u32 = 26;

/// Independent replicates in [`DiscrepancyField::lp_norm_sampled`].
pub const SAMPLING_REPLICATES: usize = 16;

/// Default size guard of [`DiscrepancyField::star_discrepancy_exact`].
pub fn default_star_limit(d: usize) -> usize {
    match d {
        1 => 1 << 22,
        2 => 4096,
        3 => 64,
        _ => 16,
    }
}

/// Which one-sided limit attains the star discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKind {
    /// `♯(P ∩ [0,x]) − N|[0,x]|`, the limit from above.
    Closed,
    /// `N|[0,x)| − ♯(P ∩ [0,x))`, the limit from below.
    Open,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarDiscrepancy {
    pub value: f64,
    pub witness: Vec<f64>,
    pub kind: BoxKind,
}

/// Output of [`DiscrepancyField::lemma1_rfunction`].
#[derive(Clone, Debug, PartialEq)]
pub struct RFunctionPairing {
    pub rfunction: RFunction,
    /// `⟨D_N, f_r⟩ = Σ_R |⟨D_N, h_R⟩|`.
    pub pairing: f64,
}

/// Quadrature estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledNorm {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// `D_N` of a point set, with exact accessors.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyField {
    points: PointSet,
}

/// `∫ 1[t < x] h_I(x) dx`.
fn tent(t: f64, interval: &DyadicInterval) -> f64 {
    let (a, b) = (interval.left(), interval.right());
    let m = interval.midpoint();
    if t <= a || t >= b {
        0.0
    } else if t <= m {
        t - a
    } else {
        b - t
    }
}

impl DiscrepancyField {
    pub fn new(points: PointSet) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Number of points in `[0,x)`.
    pub fn count_open(&self, x: &[f64]) -> usize {
        self.points
            .iter()
            .filter(|p| p.iter().zip(x).all(|(pj, xj)| pj < xj))
            .count()
    }

    /// `D_N(x)` for `x ∈ [0,1]^d`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("query coordinate {v} outside [0, 1]")));
        }
        let vol: f64 = x.iter().product();
        Ok(self.count_open(x) as f64 - self.n() as f64 * vol)
    }

    /// `sup |D_N|` over the closed cube, with one-sided limits, under the
    /// default size guard.
    pub fn star_discrepancy_exact(&self) -> Result<StarDiscrepancy> {
        self.star_discrepancy_exact_with_limit(default_star_limit(self.dim()))
    }

    /// Exact star discrepancy on the critical grid `Π_j({p_j} ∪ {1})`.
    ///
    /// The corners of all but the last axis are enumerated and the last axis
    /// is swept with running counts, for `O(N^d)` work overall.
    pub fn star_discrepancy_exact_with_limit(&self, max_points: usize) -> Result<StarDiscrepancy> {
        let n = self.n();
        let d = self.dim();
        if n > max_points {
            return Err(Error::budget(
                format!("exact star discrepancy with N = {n} in d = {d} (limit {max_points})"),
                "use the sampled lower bound (star_discrepancy_sampled) instead",
            ));
        }
        let nf = n as f64;
        let gamma: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut g: Vec<f64> = self.points.iter().map(|p| p[j]).collect();
                g.push(1.0);
                g.sort_by(f64::total_cmp);
                g.dedup();
                g
            })
            .collect();
        let last = d - 1;
        let g_last = &gamma[last];
        let rank_last: Vec<usize> = self
            .points
            .iter()
            .map(|p| g_last.partition_point(|&v| v < p[last]))
            .collect();

        let mut best = StarDiscrepancy {
            value: 0.0,
            witness: vec![1.0; d],
            kind: BoxKind::Open,
        };
        let mut hist_closed = vec![0u32; g_last.len()];
        let mut hist_open = vec![0u32; g_last.len()];
        let mut idx = vec![0usize; last];
        let corners: usize = gamma[..last].iter().map(Vec::len).product();
        for _ in 0..corners {
            let prefix: Vec<f64> = idx.iter().zip(&gamma).map(|(&i, g)| g[i]).collect();
            let vol_prefix: f64 = prefix.iter().product();
            hist_closed.iter_mut().for_each(|h| *h = 0);
            hist_open.iter_mut().for_each(|h| *h = 0);
            for (p, &r) in self.points.iter().zip(&rank_last) {
                let mut closed = true;
                let mut open = true;
                for (pj, xj) in p[..last].iter().zip(&prefix) {
                    closed &= pj <= xj;
                    open &= pj < xj;
                }
                hist_closed[r] += closed as u32;
                hist_open[r] += open as u32;
            }
            let mut closed_count = 0u32;
            let mut open_count = 0u32;
            for (g, &x_last) in g_last.iter().enumerate() {
                closed_count += hist_closed[g];
                let vol = nf * vol_prefix * x_last;
                let up = closed_count as f64 - vol;
                let down = vol - open_count as f64;
                if up > best.value {
                    best.value = up;
                    best.kind = BoxKind::Closed;
                    best.witness = prefix.iter().copied().chain([x_last]).collect();
                }
                if down > best.value {
                    best.value = down;
                    best.kind = BoxKind::Open;
                    best.witness = prefix.iter().copied().chain([x_last]).collect();
                }
                open_count += hist_open[g];
            }
            for (j, i) in idx.iter_mut().enumerate().rev() {
                *i += 1;
                if *i < gamma[j].len() {
                    break;
                }
                *i = 0;
            }
        }
        Ok(best)
    }

    /// `max |D_N(x)|` over `probes` uniform random queries: a lower bound
    /// for the star discrepancy.
    pub fn star_discrepancy_sampled(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; self.dim()];
        let mut best = 0.0f64;
        for _ in 0..probes {
            x.iter_mut().for_each(|v| *v = rng.random::<f64>());
            let vol: f64 = x.iter().product();
            let v = self.count_open(&x) as f64 - self.n() as f64 * vol;
            best = best.max(v.abs());
        }
        best
    }

    /// `∫ D_N²` by the pairwise closed form
    /// `Σ_{p,q} Π(1 − max(p_j,q_j)) − 2N Σ_p Π (1 − p_j²)/2 + N² 3^{-d}`.
    pub fn l2_squared_exact(&self) -> Result<f64> {
        let n = self.n();
        if n > MAX_L2_POINTS {
            return Err(Error::budget(
                format!("pairwise L² formula with N = {n}"),
                format!("N <= {MAX_L2_POINTS}, or use lp_norm_sampled with p = 2"),
            ));
        }
        let d = self.dim() as i32;
        let pts = &self.points;
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = pts.point(i);
                let mut acc = 0.0;
                for q in pts.iter() {
                    let mut prod = 1.0;
                    for (a, b) in p.iter().zip(q) {
                        prod *= 1.0 - a.max(*b);
                    }
                    acc += prod;
                }
                acc
            })
            .collect();
        let quadratic = pairwise_sum(&rows);
        let single: Vec<f64> = pts
            .iter()
            .map(|p| p.iter().map(|v| (1.0 - v * v) / 2.0).product())
            .collect();
        let nf = n as f64;
        let linear = 2.0 * nf * pairwise_sum(&single);
        let constant = nf * nf * 3f64.powi(-d);
        Ok(quadratic - linear + constant)
    }

    /// Exact `‖D_N‖₂`.
    pub fn l2_norm_exact(&self) -> Result<f64> {
        Ok(self.l2_squared_exact()?.max(0.0).sqrt())
    }

    /// `⟨D_N, h_R⟩ = Σ_p Π_j A(p_j, R_j) − N Π_j |R_j|²/4`.
    pub fn haar_coefficient(&self, rect: &DyadicRectangle) -> Result<f64> {
        self.check_dim(rect.dim())?;
        let terms: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.iter().zip(rect.sides()).map(|(&t, s)| tent(t, s)).product())
            .collect();
        let linear: f64 = rect.sides().iter().map(|s| s.length().powi(2) / 4.0).product();
        Ok(pairwise_sum(&terms) - self.n() as f64 * linear)
    }

    /// All coefficients `⟨D_N, h_R⟩`, `R ∈ 𝒟_r`, in position-index order.
    ///
    /// Every point lies in exactly one rectangle of the partition, so this
    /// costs `O(2^|r| + N·d)`.
    pub fn shape_coefficients(&self, shape: &ShapeVector) -> Result<Vec<f64>> {
        self.check_dim(shape.dim())?;
        if shape.order() > MAX_SHAPE_ORDER {
            return Err(Error::budget(
                format!("dense coefficient table for |r| = {}", shape.order()),
                format!("|r| <= {MAX_SHAPE_ORDER}"),
            ));
        }
        let r = shape.entries();
        let linear: f64 = r.iter().map(|&l| (-2.0 * l as f64).exp2() / 4.0).product();
        let mut coeffs = vec![-(self.n() as f64) * linear; shape.count()? as usize];
        let mut position = vec![0u64; r.len()];
        for p in self.points.iter() {
            let mut value = 1.0;
            for ((pos, &t), &level) in position.iter_mut().zip(p).zip(r) {
                *pos = (t * (level as f64).exp2()).floor() as u64;
                value *= tent(t, &DyadicInterval::new(level, *pos)?);
            }
            coeffs[shape.position_index(&position)? as usize] += value;
        }
        Ok(coeffs)
    }

    /// The r-function with signs `ε_R = sgn⟨D_N, h_R⟩` (ties to +1) and its
    /// pairing with `D_N`.
    pub fn lemma1_rfunction(&self, shape: &ShapeVector) -> Result<RFunctionPairing> {
        let coeffs = self.shape_coefficients(shape)?;
        let signs = coeffs.iter().map(|&c| if c < 0.0 { -1 } else { 1 }).collect();
        let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
        Ok(RFunctionPairing {
            rfunction: RFunction::new(shape.clone(), signs)?,
            pairing: pairwise_sum(&abs),
        })
    }

    /// Exact `⟨D_N, G⟩` for a grid function `G`.
    ///
    /// Per axis a cell is either entirely past `p_j` (contributing its width
    /// `h_j` to `∫ 1[p_j < x_j]`), the cell containing `p_j` (contributing
    /// `δ_j = (c_j+1)h_j − p_j`), or before it (nothing). Summing over the
    /// subsets `S` of axes that are strictly past gives
    /// `Σ_p Σ_S Π_{S} h_j Π_{S^c} δ_j M_S[cell(p)]`, where `M_S` is the strict
    /// suffix sum of `G` along the axes of `S`.
    pub fn pair_with_grid(&self, g: &GridFunction) -> Result<f64> {
        self.check_dim(g.dim())?;
        let d = self.dim();
        let levels = g.levels().to_vec();
        let widths: Vec<f64> = levels.iter().map(|&m| (-(m as f64)).exp2()).collect();
        let strides: Vec<usize> = (0..d)
            .map(|j| 1usize << levels[j + 1..].iter().sum::<u32>())
            .collect();
        let mut cells = Vec::with_capacity(self.n());
        let mut deltas = Vec::with_capacity(self.n() * d);
        for p in self.points.iter() {
            let mut flat = 0;
            for j in 0..d {
                let c = (p[j] / widths[j]).floor() as usize;
                flat += c * strides[j];
                deltas.push((c + 1) as f64 * widths[j] - p[j]);
            }
            cells.push(flat);
        }
        let mut per_point = vec![0.0; self.n()];
        for subset in 0..(1usize << d) {
            let mut m = g.values().to_vec();
            for axis in (0..d).filter(|j| subset >> j & 1 == 1) {
                strict_suffix_along(&mut m, &levels, axis);
            }
            for (i, acc) in per_point.iter_mut().enumerate() {
                let mut w = 1.0;
                for j in 0..d {
                    w *= if subset >> j & 1 == 1 { widths[j] } else { deltas[i * d + j] };
                }
                *acc += w * m[cells[i]];
            }
        }
        let counting = pairwise_sum(&per_point);
        // N ∫ G Π x_j: each cell integrates Π x_j to Π h_j² (c_j + 1/2).
        let values = g.values();
        let linear = pairwise_sum_by(values.len(), &|flat| {
            let mut rest = flat;
            let mut w = 1.0;
            for j in (0..d).rev() {
                let c = rest & ((1usize << levels[j]) - 1);
                rest >>= levels[j];
                w *= widths[j] * widths[j] * (c as f64 + 0.5);
            }
            values[flat] * w
        });
        Ok(counting - self.n() as f64 * linear)
    }

    /// Fast counting oracle on a grid of the given levels.
    pub fn counting_index(&self, levels: &[u32], budget: GridBudget) -> Result<CountingIndex> {
        self.check_dim(levels.len())?;
        CountingIndex::new(&self.points, levels, budget)
    }

    /// Stratified estimate of `‖D_N‖_p` on the grid with `level`
    /// subdivisions per axis.
    ///
    /// [`SAMPLING_REPLICATES`] independent replicates each draw one uniform
    /// point per cell; the standard error is the spread of the replicate
    /// integrals. Within-cell pairs would underestimate it badly, since the
    /// variance sits in the few cells where `D_N` jumps.
    pub fn lp_norm_sampled(&self, p: f64, level: u32, seed: u64, budget: GridBudget) -> Result<SampledNorm> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("L^p exponent must be finite and ≥ 1, got {p}")));
        }
        let d = self.dim();
        let levels = vec![level; d];
        let index = self.counting_index(&levels, budget)?;
        let cells = 1usize << (level as usize * d);
        let row_len = 1usize << level;
        let rows = cells / row_len;
        let nf = self.n() as f64;
        let width = (-(level as f64)).exp2();
        let reps = SAMPLING_REPLICATES;
        // Per row: the integral contribution of each replicate.
        let per_row: Vec<[f64; SAMPLING_REPLICATES]> = (0..rows)
            .into_par_iter()
            .map(|row| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(row as u64);
                let mut x = vec![0.0; d];
                let mut acc = [0.0; SAMPLING_REPLICATES];
                for col in 0..row_len {
                    let flat = row * row_len + col;
                    for a in acc.iter_mut() {
                        let mut rest = flat;
                        for j in (0..d).rev() {
                            let c = rest & (row_len - 1);
                            rest >>= level;
                            x[j] = (c as f64 + rng.random::<f64>()) * width;
                        }
                        let vol: f64 = x.iter().product();
                        *a += (index.count_open(&x) as f64 - nf * vol).abs().powf(p);
                    }
                }
                acc
            })
            .collect();
        let c = cells as f64;
        let integrals: Vec<f64> = (0..reps)
            .map(|r| pairwise_sum_by(rows, &|row| per_row[row][r]) / c)
            .collect();
        let (integral, se_integral) = mean_stderr(&integrals);
        let value = integral.powf(1.0 / p);
        let stderr = if integral > 0.0 {
            se_integral * value / (p * integral)
        } else {
            0.0
        };
        Ok(SampledNorm {
            value,
            stderr,
            samples: (reps * cells) as u64,
        })
    }

    /// Finest positive gap between distinct coordinates on any axis
    /// (including the gaps to 0 and 1).
    pub fn finest_gap(&self) -> f64 {
        let mut gap = 1.0f64;
        for j in 0..self.dim() {
            let mut c: Vec<f64> = self.points.iter().map(|p| p[j]).collect();
            c.push(0.0);
            c.push(1.0);
            c.sort_by(f64::total_cmp);
            c.dedup();
            for w in c.windows(2) {
                gap = gap.min(w[1] - w[0]);
            }
        }
        gap
    }

    /// Grid level used by [`orlicz_norm_sampled`](Self::orlicz_norm_sampled) by default:
    /// at least 10 (d = 2) or 6 (d ≥ 3), fine enough that cells are at most
    /// half the finest coordinate gap, and within the budget.
    pub fn default_orlicz_level(&self, budget: GridBudget) -> u32 {
        let d = self.dim() as u32;
        let base = if d <= 2 { 10 } else { 6 };
        let needed = (2.0 / self.finest_gap()).log2().ceil().max(0.0) as u32;
        let cap = budget.max_total_level.saturating_sub(d) / d;
        base.max(needed).min(cap)
    }

    /// Orlicz norm of `D_N` by `2^d`-point Gauss–Legendre quadrature on every
    /// cell of the grid with `level` subdivisions per axis.
    ///
    /// Within a cell not cut by a point coordinate `D_N` is multilinear, and
    /// the rule integrates `ψ(|D_N|/K)` to quadrature accuracy; cells that
    /// do contain a coordinate are where the approximation error lives.
    pub fn orlicz_norm_sampled(&self, spec: OrliczSpec, level: u32, budget: GridBudget) -> Result<f64> {
        spec.validate()?;
        let d = self.dim();
        budget.check(&vec![level + 1; d])?;
        let levels = vec![level; d];
        let index = self.counting_index(&levels, budget)?;
        let width = (-(level as f64)).exp2();
        let nodes = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
        let nf = self.n() as f64;
        let row_len = 1usize << level;
        let cells = 1usize << (level as usize * d);
        let per_cell = 1usize << d;
        let mut values = vec![0.0; cells * per_cell];
        values
            .par_chunks_mut(row_len * per_cell)
            .enumerate()
            .for_each(|(row, out)| {
                let mut x = vec![0.0; d];
                for col in 0..row_len {
                    let flat = row * row_len + col;
                    let mut cell = vec![0usize; d];
                    let mut rest = flat;
                    for j in (0..d).rev() {
                        cell[j] = rest & (row_len - 1);
                        rest >>= level;
                    }
                    for node in 0..per_cell {
                        for j in 0..d {
                            x[j] = (cell[j] as f64 + nodes[node >> j & 1]) * width;
                        }
                        let vol: f64 = x.iter().product();
                        out[col * per_cell + node] = index.count_open(&x) as f64 - nf * vol;
                    }
                }
            });
        orlicz_norm_uniform(&values, spec, DEFAULT_ORLICZ_TOL)
    }
}

/// Replace `m` by its strict suffix sums along `axis`:
/// `m'[…c_j…] = Σ_{c' > c_j} m[…c'…]`.
fn strict_suffix_along(m: &mut [f64], levels: &[u32], axis: usize) {
    let n_axis = 1usize << levels[axis];
    let inner = 1usize << levels[axis + 1..].iter().sum::<u32>();
    for block in m.chunks_mut(n_axis * inner) {
        let mut run = vec![0.0; inner];
        for c in (0..n_axis).rev() {
            let slice = &mut block[c * inner..(c + 1) * inner];
            for (s, r) in slice.iter_mut().zip(run.iter_mut()) {
                let v = *s;
                *s = *r;
                *r += v;
            }
        }
    }
}

/// Counts `♯(P ∩ [0,x))` for `x ∈ [0,1)^d` in time proportional to the
/// number of points sharing a grid slab with `x`.
///
/// Points in cells strictly below `x`'s cell on every axis are read from an
/// exclusive prefix-sum table; the rest lie in one of the `d` slabs through
/// that cell and are tested directly, each under the first axis where it
/// shares `x`'s slab.
#[derive(Clone, Debug)]
pub struct CountingIndex {
    levels: Vec<u32>,
    strides: Vec<usize>,
    prefix: Vec<u32>,
    /// `slabs[j][c]`: indices of points whose axis-`j` cell is `c`.
    slabs: Vec<Vec<Vec<u32>>>,
    coords: Vec<f64>,
    cells: Vec<u32>,
}

impl CountingIndex {
    pub fn new(points: &PointSet, levels: &[u32], budget: GridBudget) -> Result<Self> {
        let d = points.dim();
        if levels.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: levels.len(),
            });
        }
        budget.check(levels)?;
        let strides: Vec<usize> = (0..d)
            .map(|j| 1usize << levels[j + 1..].iter().sum::<u32>())
            .collect();
        let total = 1usize << levels.iter().sum::<u32>();
        let mut prefix = vec![0u32; total];
        let mut slabs: Vec<Vec<Vec<u32>>> = levels.iter().map(|&m| vec![Vec::new(); 1 << m]).collect();
        let mut cells = Vec::with_capacity(points.len() * d);
        for (i, p) in points.iter().enumerate() {
            let mut flat = 0;
            for j in 0..d {
                let c = (p[j] * (levels[j] as f64).exp2()).floor() as usize;
                flat += c * strides[j];
                cells.push(c as u32);
                slabs[j][c].push(i as u32);
            }
            prefix[flat] += 1;
        }
        // Exclusive prefix sums along each axis.
        for axis in 0..d {
            let n_axis = 1usize << levels[axis];
            let inner = strides[axis];
            for block in prefix.chunks_mut(n_axis * inner) {
                let mut run = vec![0u32; inner];
                for c in 0..n_axis {
                    for (s, r) in block[c * inner..(c + 1) * inner].iter_mut().zip(run.iter_mut()) {
                        let v = *s;
                        *s = *r;
                        *r += v;
                    }
                }
            }
        }
        Ok(Self {
            levels: levels.to_vec(),
            strides,
            prefix,
            slabs,
            coords: points.coords().to_vec(),
            cells,
        })
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// `♯(P ∩ [0,x))`; requires `x ∈ [0,1)^d`.
    pub fn count_open(&self, x: &[f64]) -> usize {
        let d = self.levels.len();
        let mut flat = 0;
        let mut cx = [0u32; 8];
        let mut cx_heap;
        let cx: &mut [u32] = if d <= 8 {
            &mut cx[..d]
        } else {
            cx_heap = vec![0u32; d];
            &mut cx_heap
        };
        for j in 0..d {
            let c = (x[j] * (self.levels[j] as f64).exp2()).floor() as usize;
            cx[j] = c as u32;
            flat += c * self.strides[j];
        }
        let mut count = self.prefix[flat] as usize;
        for j in 0..d {
            'points: for &i in &self.slabs[j][cx[j] as usize] {
                let i = i as usize;
                let cells = &self.cells[i * d..(i + 1) * d];
                let p = &self.coords[i * d..(i + 1) * d];
                for a in 0..d {
                    if a < j && cells[a] == cx[a] {
                        continue 'points;
                    }
                    if !(p[a] < x[a]) {
                        continue 'points;
                    }
                }
                count += 1;
            }
        }
        count
    }
}
