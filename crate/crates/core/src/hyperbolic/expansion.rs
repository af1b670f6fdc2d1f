use std::collections::BTreeMap;
use std::ops::{AddAssign, Neg, SubAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicRectangle, ShapeVector};
use crate::grid::{pairwise_sum, GridBudget, GridFunction};
use crate::{Error, Result};

/// `C(n+d−1, d−1) · 2^n`, the number of dyadic rectangles of volume `2^-n`
/// in the `d`-cube.
pub fn count_rectangles(n: u32, d: usize) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let overflow = || Error::Overflow(format!("count_rectangles({n}, {d})"));
    let shapes = binomial(n as u64 + d as u64 - 1, d as u64 - 1).ok_or_else(overflow)?;
    let per_shape = 1u64.checked_shl(n).filter(|_| n < 64).ok_or_else(overflow)?;
    shapes.checked_mul(per_shape).ok_or_else(overflow)
}

pub(crate) fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Coefficients of one shape, indexed by row-major position.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeCoefficients {
    Sparse(BTreeMap<u64, f64>),
    Dense(Vec<f64>),
}

impl ShapeCoefficients {
    fn get(&self, index: u64) -> f64 {
        match self {
            Self::Sparse(map) => map.get(&index).copied().unwrap_or(0.0),
            Self::Dense(v) => v[index as usize],
        }
    }

    fn to_dense(&self, count: usize) -> Vec<f64> {
        match self {
            Self::Dense(v) => v.clone(),
            Self::Sparse(map) => {
                let mut v = vec![0.0; count];
                for (&i, &a) in map {
                    v[i as usize] = a;
                }
                v
            }
        }
    }

    fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        match self {
            Self::Sparse(map) => Box::new(map.iter().map(|(&i, &a)| (i, a))),
            Self::Dense(v) => Box::new(v.iter().enumerate().map(|(i, &a)| (i as u64, a))),
        }
    }
}

/// `Σ α_R h_R` over rectangles of volume `2^-n` (and, with the coarse part
/// enabled, over rectangles of volume `≥ 2^-n`).
///
/// Coefficients are kept sparse per shape until more than half of the
/// shape's rectangles carry one, then switch to a dense array.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarExpansion {
    dim: usize,
    scale: u32,
    coarse: bool,
    terms: BTreeMap<ShapeVector, ShapeCoefficients>,
}

impl HaarExpansion {
    /// Hyperbolic expansion: only shapes with `|r| = n`.
    pub fn new(dim: usize, scale: u32) -> Result<Self> {
        Self::build(dim, scale, false)
    }

    /// Expansion over all shapes with `|r| ≤ n`.
    pub fn with_coarse(dim: usize, scale: u32) -> Result<Self> {
        Self::build(dim, scale, true)
    }

    fn build(dim: usize, scale: u32, coarse: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if scale >= crate::dyadic::MAX_LEVEL {
            return Err(Error::InvalidInput(format!("scale {scale} too large")));
        }
        Ok(Self {
            dim,
            scale,
            coarse,
            terms: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn has_coarse_part(&self) -> bool {
        self.coarse
    }

    fn check_shape(&self, shape: &ShapeVector) -> Result<()> {
        if shape.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shape.dim(),
            });
        }
        let order = shape.order();
        let ok = if self.coarse {
            order <= self.scale
        } else {
            order == self.scale
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "shape {:?} has order {order}, expansion scale is {}{}",
                shape.entries(),
                self.scale,
                if self.coarse { " (coarse part enabled)" } else { "" }
            )));
        }
        Ok(())
    }

    pub fn insert(&mut self, shape: &ShapeVector, position: &[u64], value: f64) -> Result<()> {
        self.check_shape(shape)?;
        let index = shape.position_index(position)?;
        self.insert_index(shape, index, value)
    }

    /// Sets the coefficient of the rectangle with row-major `index`.
    pub fn insert_index(&mut self, shape: &ShapeVector, index: u64, value: f64) -> Result<()> {
        self.check_shape(shape)?;
        let count = shape.count()?;
        if index >= count {
            return Err(Error::InvalidInput(format!("position index {index} >= {count}")));
        }
        if !value.is_finite() {
            return Err(Error::InvalidInput("coefficient must be finite".into()));
        }
        let entry = self
            .terms
            .entry(shape.clone())
            .or_insert_with(|| ShapeCoefficients::Sparse(BTreeMap::new()));
        match entry {
            ShapeCoefficients::Dense(v) => v[index as usize] = value,
            ShapeCoefficients::Sparse(map) => {
                map.insert(index, value);
                if map.len() as u64 * 2 > count {
                    *entry = ShapeCoefficients::Dense(entry.to_dense(count as usize));
                }
            }
        }
        Ok(())
    }

    /// Replaces all coefficients of `shape` with a dense array.
    pub fn set_shape(&mut self, shape: &ShapeVector, values: Vec<f64>) -> Result<()> {
        self.check_shape(shape)?;
        let count = shape.count()?;
        if values.len() as u64 != count {
            return Err(Error::InvalidInput(format!(
                "shape {:?} needs {count} coefficients, got {}",
                shape.entries(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("coefficient must be finite".into()));
        }
        self.terms
            .insert(shape.clone(), ShapeCoefficients::Dense(values));
        Ok(())
    }

    pub fn get(&self, shape: &ShapeVector, position: &[u64]) -> Result<f64> {
        let index = shape.position_index(position)?;
        Ok(self.terms.get(shape).map_or(0.0, |c| c.get(index)))
    }

    pub fn shapes(&self) -> impl Iterator<Item = &ShapeVector> {
        self.terms.keys()
    }

    pub fn shape_coefficients(&self, shape: &ShapeVector) -> Option<&ShapeCoefficients> {
        self.terms.get(shape)
    }

    /// Dense coefficient array of a shape (zeros when absent).
    pub fn dense(&self, shape: &ShapeVector) -> Result<Vec<f64>> {
        let count = shape.count()? as usize;
        Ok(self
            .terms
            .get(shape)
            .map_or_else(|| vec![0.0; count], |c| c.to_dense(count)))
    }

    /// Stored `(rectangle, α_R)` pairs, shape-lexicographic then row-major.
    pub fn iter(&self) -> impl Iterator<Item = (DyadicRectangle, f64)> + '_ {
        self.terms
            .iter()
            .flat_map(|(shape, c)| c.entries().map(move |(i, a)| (shape.rectangle(i), a)))
    }

    fn coefficient_values(&self) -> Vec<f64> {
        self.terms
            .values()
            .flat_map(|c| c.entries().map(|(_, a)| a))
            .collect()
    }

    /// `Σ |α_R|`.
    pub fn l1_coefficients(&self) -> f64 {
        let v: Vec<f64> = self.coefficient_values().iter().map(|a| a.abs()).collect();
        pairwise_sum(&v)
    }

    /// `(Σ α_R² |R|)^{1/2}`, the L² norm by orthogonality.
    pub fn parseval_l2(&self) -> f64 {
        let v: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|(shape, c)| {
                let vol = (-(shape.order() as f64)).exp2();
                c.entries().map(move |(_, a)| a * a * vol)
            })
            .collect();
        pairwise_sum(&v).sqrt()
    }

    /// Grid on which every term is constant: `n+1` levels per axis.
    pub fn grid_levels(&self) -> Vec<u32> {
        vec![self.scale + 1; self.dim]
    }

    /// Exact values of the expansion on its grid.
    pub fn to_grid(&self, budget: GridBudget) -> Result<GridFunction> {
        let levels = self.grid_levels();
        budget.check(&levels)?;
        let dense: Vec<(ShapeVector, Vec<f64>)> = self
            .terms
            .keys()
            .map(|s| Ok((s.clone(), self.dense(s)?)))
            .collect::<Result<_>>()?;
        let terms: Vec<ShapeTerm<f64>> = dense
            .iter()
            .map(|(s, c)| ShapeTerm {
                shape: s.entries(),
                coeffs: c,
            })
            .collect();
        Ok(GridFunction::from_raw(
            levels.clone(),
            evaluate_terms(&levels, &terms),
        ))
    }

    /// Sub-expansion of the terms whose side along `axis` sits at `level`.
    pub fn restrict_axis_level(&self, axis: usize, level: u32) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::InvalidInput(format!("axis {axis} >= dimension {}", self.dim)));
        }
        let mut out = self.clone();
        out.terms.retain(|s, _| s.entries()[axis] == level);
        Ok(out)
    }

    /// Adds the terms of an r-function.
    pub fn add_rfunction(&mut self, f: &RFunction) -> Result<()> {
        self.check_shape(&f.shape)?;
        let mut values = self.dense(&f.shape)?;
        for (v, &s) in values.iter_mut().zip(&f.signs) {
            *v += s as f64;
        }
        self.set_shape(&f.shape, values)
    }

    pub fn to_json(&self) -> Result<String> {
        let record = ExpansionRecord {
            d: self.dim,
            n: self.scale,
            coarse: self.coarse,
            entries: self
                .terms
                .iter()
                .flat_map(|(shape, c)| {
                    c.entries().filter(|&(_, a)| a != 0.0).map(move |(i, a)| EntryRecord {
                        shape: shape.entries().to_vec(),
                        position: shape.position_of(i),
                        value: a,
                    })
                })
                .collect(),
        };
        Ok(serde_json::to_string(&record)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: ExpansionRecord = serde_json::from_str(text)?;
        let mut out = Self::build(record.d, record.n, record.coarse)?;
        for e in record.entries {
            out.insert(&ShapeVector::new(e.shape), &e.position, e.value)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionRecord {
    d: usize,
    n: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    coarse: bool,
    entries: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    shape: Vec<u32>,
    position: Vec<u64>,
    value: f64,
}

/// `f_r = Σ_{R∈𝒟_r} ε_R h_R` with `ε_R ∈ {−1, 0, +1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RFunction {
    shape: ShapeVector,
    signs: Vec<i8>,
}

impl RFunction {
    pub fn new(shape: ShapeVector, signs: Vec<i8>) -> Result<Self> {
        let count = shape.count()?;
        if signs.len() as u64 != count {
            return Err(Error::InvalidInput(format!(
                "r-function of shape {:?} needs {count} signs, got {}",
                shape.entries(),
                signs.len()
            )));
        }
        if signs.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::InvalidInput("signs must lie in {-1, 0, 1}".into()));
        }
        Ok(Self { shape, signs })
    }

    /// Constant sign on every rectangle.
    pub fn constant(shape: ShapeVector, sign: i8) -> Result<Self> {
        let count = shape.count()? as usize;
        Self::new(shape, vec![sign; count])
    }

    pub fn shape(&self) -> &ShapeVector {
        &self.shape
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign_at(&self, position: &[u64]) -> Result<i8> {
        Ok(self.signs[self.shape.position_index(position)? as usize])
    }

    /// All signs nonzero, so that `|f_r| ≡ 1`.
    pub fn is_full(&self) -> bool {
        self.signs.iter().all(|&s| s != 0)
    }

    /// Values on the grid with `levels` (each `levels[j] > r_j` required).
    pub fn to_grid(&self, levels: &[u32], budget: GridBudget) -> Result<GridFunction> {
        check_resolution(levels, self.shape.entries())?;
        budget.check(levels)?;
        let coeffs: Vec<f64> = self.signs.iter().map(|&s| s as f64).collect();
        let terms = [ShapeTerm {
            shape: self.shape.entries(),
            coeffs: &coeffs,
        }];
        Ok(GridFunction::from_raw(
            levels.to_vec(),
            evaluate_terms(levels, &terms),
        ))
    }
}

/// All Haar coefficients `⟨g, h_R⟩`, `R ∈ 𝒟_r`, of a grid function, in
/// position-index order. The grid must resolve the shape (`m_j > r_j`).
pub fn project_shape(g: &GridFunction, shape: &ShapeVector) -> Result<Vec<f64>> {
    let levels = g.levels();
    check_resolution(levels, shape.entries())?;
    let r = shape.entries();
    let d = levels.len();
    let mut sums = vec![Vec::new(); shape.count()? as usize];
    let mut coords = vec![0usize; d];
    for (flat, &v) in g.values().iter().enumerate() {
        let mut rest = flat;
        for j in (0..d).rev() {
            coords[j] = rest & ((1usize << levels[j]) - 1);
            rest >>= levels[j];
        }
        let mut pos = 0usize;
        let mut negative = false;
        for j in 0..d {
            let drop = levels[j] - r[j];
            pos = (pos << r[j]) | (coords[j] >> drop);
            negative ^= (coords[j] >> (drop - 1)) & 1 == 0;
        }
        sums[pos].push(if negative { -v } else { v });
    }
    let vol = g.cell_volume();
    Ok(sums.iter().map(|s| pairwise_sum(s) * vol).collect())
}

pub(crate) fn check_resolution(levels: &[u32], shape: &[u32]) -> Result<()> {
    if levels.len() != shape.len() {
        return Err(Error::DimensionMismatch {
            expected: shape.len(),
            got: levels.len(),
        });
    }
    if levels.iter().zip(shape).any(|(&m, &r)| m <= r) {
        return Err(Error::InvalidInput(format!(
            "grid levels {levels:?} too coarse for shape {shape:?}"
        )));
    }
    Ok(())
}

/// Scalar types the row kernel can accumulate in.
pub(crate) trait Accum:
    Copy + Default + PartialOrd + AddAssign + SubAssign + Neg<Output = Self> + Send + Sync
{
}

impl Accum for f64 {}
impl Accum for i32 {}
impl Accum for i16 {}

/// One shape's dense coefficients.
pub(crate) struct ShapeTerm<'a, T> {
    pub shape: &'a [u32],
    pub coeffs: &'a [T],
}

/// Writes row `row` (fixed cell indices along all axes but the last) of
/// `Σ_shapes Σ_R α_R h_R` into `buf`, which must hold `2^{m_last}` cells.
///
/// Requires `levels[j] > shape[j]` for every term and axis.
pub(crate) fn fill_row<T: Accum>(levels: &[u32], terms: &[ShapeTerm<T>], row: usize, buf: &mut [T]) {
    let d = levels.len();
    let m_last = levels[d - 1];
    debug_assert_eq!(buf.len(), 1usize << m_last);
    buf.fill(T::default());

    let mut prefix = vec![0usize; d - 1];
    let mut rest = row;
    for j in (0..d - 1).rev() {
        prefix[j] = rest & ((1usize << levels[j]) - 1);
        rest >>= levels[j];
    }

    for term in terms {
        let r = term.shape;
        let mut pos = 0usize;
        let mut negative = false;
        for j in 0..d - 1 {
            let drop = levels[j] - r[j];
            pos = (pos << r[j]) | (prefix[j] >> drop);
            if (prefix[j] >> (drop - 1)) & 1 == 0 {
                negative = !negative;
            }
        }
        let r_last = r[d - 1];
        let base = pos << r_last;
        let drop = m_last - r_last;
        let half = 1usize << (drop - 1);
        let block = &term.coeffs[base..base + (1usize << r_last)];
        for (chunk, &a) in buf.chunks_exact_mut(2 * half).zip(block) {
            let a = if negative { -a } else { a };
            let (left, right) = chunk.split_at_mut(half);
            for v in left {
                *v -= a;
            }
            for v in right {
                *v += a;
            }
        }
    }
}

/// Full grid of values for a set of terms.
pub(crate) fn evaluate_terms<T: Accum>(levels: &[u32], terms: &[ShapeTerm<T>]) -> Vec<T> {
    let total: u32 = levels.iter().sum();
    let row_len = 1usize << levels[levels.len() - 1];
    let mut values = vec![T::default(); 1usize << total];
    values
        .par_chunks_mut(row_len)
        .enumerate()
        .for_each(|(row, buf)| fill_row(levels, terms, row, buf));
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_counts() {
        assert_eq!(count_rectangles(1, 2).unwrap(), 4);
        assert_eq!(count_rectangles(2, 2).unwrap(), 12);
        assert_eq!(count_rectangles(2, 3).unwrap(), 24);
        assert_eq!(count_rectangles(0, 5).unwrap(), 1);
        assert!(count_rectangles(64, 2).is_err());
        assert!(count_rectangles(3, 0).is_err());
    }

    #[test]
    fn count_matches_enumeration() {
        for d in 1..=4 {
            for n in 0..=6 {
                let enumerated: u64 = ShapeVector::with_order(n, d)
                    .iter()
                    .map(|s| s.rectangles().count() as u64)
                    .sum();
                assert_eq!(enumerated, count_rectangles(n, d).unwrap(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn single_rectangle_is_checkerboard() {
        let mut e = HaarExpansion::new(2, 0).unwrap();
        e.insert(&ShapeVector::new(vec![0, 0]), &[0, 0], 1.0).unwrap();
        let g = e.to_grid(GridBudget::default()).unwrap();
        assert_eq!(g.levels(), &[1, 1]);
        assert_eq!(g.values(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn all_plus_at_scale_one() {
        let mut e = HaarExpansion::new(2, 1).unwrap();
        for shape in ShapeVector::with_order(1, 2) {
            e.add_rfunction(&RFunction::constant(shape, 1).unwrap()).unwrap();
        }
        let g = e.to_grid(GridBudget::default()).unwrap();
        // brute force over the 4 rectangles at each cell center
        for flat in 0..g.len() {
            let x = g.cell_center(flat);
            let direct: i32 = e.iter().map(|(r, a)| a as i32 * r.haar(&x).unwrap() as i32).sum();
            assert_eq!(g.values()[flat], direct as f64);
        }
        assert_eq!(g.max(), 2.0);
    }

    #[test]
    fn empty_expansion_is_zero() {
        let e = HaarExpansion::new(3, 2).unwrap();
        let g = e.to_grid(GridBudget::default()).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_validation() {
        let mut e = HaarExpansion::new(2, 2).unwrap();
        assert!(e.insert(&ShapeVector::new(vec![1, 0]), &[0, 0], 1.0).is_err());
        assert!(e.insert(&ShapeVector::new(vec![1, 1, 0]), &[0, 0, 0], 1.0).is_err());
        let mut c = HaarExpansion::with_coarse(2, 2).unwrap();
        c.insert(&ShapeVector::new(vec![1, 0]), &[1, 0], 1.0).unwrap();
        assert!(c.insert(&ShapeVector::new(vec![2, 1]), &[0, 0], 1.0).is_err());
    }

    #[test]
    fn sparse_switches_to_dense() {
        let shape = ShapeVector::new(vec![1, 1]);
        let mut e = HaarExpansion::new(2, 2).unwrap();
        e.insert_index(&shape, 0, 1.0).unwrap();
        e.insert_index(&shape, 1, 2.0).unwrap();
        assert!(matches!(e.shape_coefficients(&shape), Some(ShapeCoefficients::Sparse(_))));
        e.insert_index(&shape, 3, 3.0).unwrap();
        assert!(matches!(e.shape_coefficients(&shape), Some(ShapeCoefficients::Dense(_))));
        assert_eq!(e.get(&shape, &[1, 1]).unwrap(), 3.0);
        assert_eq!(e.get(&shape, &[1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let mut e = HaarExpansion::new(2, 3).unwrap();
        e.insert(&ShapeVector::new(vec![1, 2]), &[1, 3], -0.125).unwrap();
        e.insert(&ShapeVector::new(vec![3, 0]), &[5, 0], 2.5).unwrap();
        let text = e.to_json().unwrap();
        assert!(text.contains("\"entries\""));
        let back = HaarExpansion::from_json(&text).unwrap();
        assert_eq!(back.iter().collect::<Vec<_>>(), e.iter().collect::<Vec<_>>());
        assert!(HaarExpansion::from_json(r#"{"d":2,"n":1,"entries":[{"shape":[2,0],"position":[0,0],"value":1}]}"#).is_err());
    }

    #[test]
    fn rfunction_validation() {
        let shape = ShapeVector::new(vec![1, 0]);
        assert!(RFunction::new(shape.clone(), vec![1]).is_err());
        assert!(RFunction::new(shape.clone(), vec![1, 2]).is_err());
        let f = RFunction::new(shape, vec![1, 0]).unwrap();
        assert!(!f.is_full());
        assert!(f.to_grid(&[1, 1], GridBudget::default()).is_err());
    }
}
