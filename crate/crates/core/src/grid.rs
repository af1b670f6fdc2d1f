//! Exact carrier for functions that are constant on the cells of a dyadic
//! grid.
//!
//! A grid with per-axis levels `m = (m_1, …, m_d)` has `2^{m_j}` cells along
//! axis `j`. Cells are stored row-major in axis order: axis 0 is the slowest
//! index, the last axis is contiguous. Every cell has volume `2^-Σm`, so the
//! integral of a grid function is `2^-Σm · Σ values`.

use rayon::prelude::*;

use crate::{Error, Result};

/// Default cap on `Σ m_j` (64M cells).
pub const DEFAULT_MAX_TOTAL_LEVEL: u32 = 26;

/// Resolution guard for exact grid computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridBudget {
    pub max_total_level: u32,
}

impl Default for GridBudget {
    fn default() -> Self {
        Self {
            max_total_level: DEFAULT_MAX_TOTAL_LEVEL,
        }
    }
}

impl GridBudget {
    pub fn new(max_total_level: u32) -> Self {
        Self { max_total_level }
    }

    pub fn check(&self, levels: &[u32]) -> Result<()> {
        let total: u32 = levels.iter().sum();
        if total > self.max_total_level {
            return Err(Error::budget(
                format!(
                    "grid with levels {levels:?} has 2^{total} cells, budget is 2^{}",
                    self.max_total_level
                ),
                "lower n or N, or raise the grid budget",
            ));
        }
        Ok(())
    }
}

/// Piecewise-constant function on a dyadic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    levels: Vec<u32>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(levels: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one axis".into()));
        }
        let total: u32 = levels.iter().sum();
        if total >= usize::BITS {
            return Err(Error::Overflow(format!("2^{total} grid cells")));
        }
        if values.len() != 1usize << total {
            return Err(Error::InvalidInput(format!(
                "grid with levels {levels:?} needs {} values, got {}",
                1usize << total,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value in cell {bad}")));
        }
        Ok(Self { levels, values })
    }

    pub fn zeros(levels: Vec<u32>) -> Result<Self> {
        let total: u32 = levels.iter().sum();
        Self::new(levels, vec![0.0; 1usize << total])
    }

    pub fn constant(levels: Vec<u32>, c: f64) -> Result<Self> {
        let total: u32 = levels.iter().sum();
        Self::new(levels, vec![c; 1usize << total])
    }

    /// Skips the finiteness scan; callers guarantee finite values of the
    /// right length.
    pub(crate) fn from_raw(levels: Vec<u32>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << levels.iter().sum::<u32>());
        Self { levels, values }
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_level(&self) -> u32 {
        self.levels.iter().sum()
    }

    pub fn cell_volume(&self) -> f64 {
        (-(self.total_level() as f64)).exp2()
    }

    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.cell_volume()
    }

    /// Cell index vector of a flat index.
    pub fn cell_coords(&self, flat: usize) -> Vec<u64> {
        decode_cell(&self.levels, flat)
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        cell_center(&self.levels, flat)
    }

    /// Flat index of the cell containing `x ∈ [0,1)^d`.
    pub fn locate(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut flat = 0usize;
        for (&m, &t) in self.levels.iter().zip(x) {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::Domain(format!("coordinate {t} outside [0, 1)")));
            }
            let c = (t * (m as f64).exp2()) as usize;
            flat = (flat << m) | c;
        }
        Ok(flat)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.values[self.locate(x)?])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        let values: Vec<f64> = self.values.par_iter().map(|&v| f(v)).collect();
        Self::new(self.levels.clone(), values)
    }

    /// Re-expresses the function on a finer grid.
    pub fn refine(&self, levels: &[u32]) -> Result<Self> {
        if levels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: levels.len(),
            });
        }
        if levels.iter().zip(&self.levels).any(|(new, old)| new < old) {
            return Err(Error::GridMismatch {
                left: self.levels.clone(),
                right: levels.to_vec(),
            });
        }
        if levels == self.levels.as_slice() {
            return Ok(self.clone());
        }
        let total: u32 = levels.iter().sum();
        let mut values = vec![0.0; 1usize << total];
        values.par_iter_mut().enumerate().for_each(|(flat, v)| {
            let mut coarse = 0usize;
            let mut rest = flat;
            let mut parts = Vec::with_capacity(levels.len());
            for &m in levels.iter().rev() {
                parts.push(rest & ((1usize << m) - 1));
                rest >>= m;
            }
            for ((&m_new, &m_old), &c) in levels.iter().zip(&self.levels).zip(parts.iter().rev()) {
                coarse = (coarse << m_old) | (c >> (m_new - m_old));
            }
            *v = self.values[coarse];
        });
        Ok(Self::from_raw(levels.to_vec(), values))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        if self.levels != other.levels {
            return Err(Error::GridMismatch {
                left: self.levels.clone(),
                right: other.levels.clone(),
            });
        }
        let values: Vec<f64> = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.levels.clone(), values)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// `∫ f·g` for grid functions on identical grids.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.levels != other.levels {
            return Err(Error::GridMismatch {
                left: self.levels.clone(),
                right: other.levels.clone(),
            });
        }
        let products: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(pairwise_sum(&products) * self.cell_volume())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `f` at the centers of the cells of the `levels` grid.
///
/// `f` must be constant on each cell. With debug assertions enabled, a
/// second point per cell is sampled and a mismatch is reported as
/// [`Error::NotPiecewiseConstant`].
pub fn to_grid<F>(f: F, levels: &[u32], budget: GridBudget) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if levels.is_empty() {
        return Err(Error::InvalidInput("grid needs at least one axis".into()));
    }
    budget.check(levels)?;
    let total: u32 = levels.iter().sum();
    let values: Vec<f64> = (0..1usize << total)
        .into_par_iter()
        .map(|flat| f(&cell_center(levels, flat)))
        .collect();
    if cfg!(debug_assertions) {
        let offender = (0..values.len()).into_par_iter().find_first(|&flat| {
            let probe = cell_point(levels, flat, 0.25);
            f(&probe) != values[flat]
        });
        if let Some(cell) = offender {
            return Err(Error::NotPiecewiseConstant { cell });
        }
    }
    GridFunction::new(levels.to_vec(), values)
}

pub(crate) fn decode_cell(levels: &[u32], flat: usize) -> Vec<u64> {
    let mut out = vec![0u64; levels.len()];
    let mut rest = flat;
    for (slot, &m) in out.iter_mut().zip(levels).rev() {
        *slot = (rest & ((1usize << m) - 1)) as u64;
        rest >>= m;
    }
    out
}

fn cell_point(levels: &[u32], flat: usize, offset: f64) -> Vec<f64> {
    decode_cell(levels, flat)
        .into_iter()
        .zip(levels)
        .map(|(c, &m)| (c as f64 + offset) * (-(m as f64)).exp2())
        .collect()
}

pub(crate) fn cell_center(levels: &[u32], flat: usize) -> Vec<f64> {
    cell_point(levels, flat, 0.5)
}

/// Pairwise (tree) summation. The association order depends only on the
/// length of the input, so the result is bit-stable.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 256;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i` in `0..len` without materializing.
pub fn pairwise_sum_by(len: usize, f: &(impl Fn(usize) -> f64 + Sync)) -> f64 {
    fn rec(lo: usize, hi: usize, f: &(impl Fn(usize) -> f64 + Sync)) -> f64 {
        const BLOCK: usize = 256;
        if hi - lo <= BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        if hi - lo >= 1 << 16 {
            let (a, b) = rayon::join(|| rec(lo, mid, f), || rec(mid, hi, f));
            a + b
        } else {
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, len, f)
}
