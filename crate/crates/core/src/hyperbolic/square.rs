//! Littlewood–Paley square functions of Haar series.
//!
//! With L^∞-normalized Haar functions `h_I² = χ_I`, so the square function of
//! `Σ α_I h_I` is `(Σ |α_I|² χ_I)^{1/2}`.

use std::collections::BTreeMap;

use crate::dyadic::DyadicInterval;
use crate::grid::{GridBudget, GridFunction};
use crate::hyperbolic::HaarExpansion;
use crate::{Error, Result};

/// One-parameter Haar series `Σ_I α_I h_I` with coefficients in `ℝ^k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HaarSeries {
    width: usize,
    terms: BTreeMap<DyadicInterval, Vec<f64>>,
}

impl HaarSeries {
    /// Empty series with `width`-dimensional coefficients.
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidInput("coefficient width must be positive".into()));
        }
        Ok(Self {
            width,
            terms: BTreeMap::new(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn insert(&mut self, interval: DyadicInterval, coefficient: Vec<f64>) -> Result<()> {
        if coefficient.len() != self.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                got: coefficient.len(),
            });
        }
        self.terms.insert(interval, coefficient);
        Ok(())
    }

    pub fn insert_scalar(&mut self, interval: DyadicInterval, value: f64) -> Result<()> {
        self.insert(interval, vec![value])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DyadicInterval, &[f64])> {
        self.terms.iter().map(|(i, c)| (i, c.as_slice()))
    }

    /// One level finer than the deepest interval.
    pub fn grid_level(&self) -> u32 {
        self.terms.keys().map(|i| i.level() + 1).max().unwrap_or(1)
    }

    fn component_grid(&self, component: usize, level: u32) -> Vec<f64> {
        let mut values = vec![0.0; 1usize << level];
        for (interval, coeff) in &self.terms {
            let a = coeff[component];
            let span = 1usize << (level - interval.level());
            let start = interval.position() as usize * span;
            let (left, right) = values[start..start + span].split_at_mut(span / 2);
            left.iter_mut().for_each(|v| *v -= a);
            right.iter_mut().for_each(|v| *v += a);
        }
        values
    }

    /// Values of a scalar series on its grid.
    pub fn to_grid(&self, budget: GridBudget) -> Result<GridFunction> {
        if self.width != 1 {
            return Err(Error::InvalidInput(
                "vector-valued series: use norm_grid for the pointwise norm".into(),
            ));
        }
        let level = self.grid_level();
        budget.check(&[level])?;
        GridFunction::new(vec![level], self.component_grid(0, level))
    }

    /// Pointwise Euclidean norm `|Σ α_I h_I(x)|`.
    pub fn norm_grid(&self, budget: GridBudget) -> Result<GridFunction> {
        let level = self.grid_level();
        budget.check(&[level])?;
        let mut sq = vec![0.0; 1usize << level];
        for c in 0..self.width {
            for (s, v) in sq.iter_mut().zip(self.component_grid(c, level)) {
                *s += v * v;
            }
        }
        GridFunction::new(vec![level], sq.into_iter().map(f64::sqrt).collect())
    }
}

/// `S(f) = (Σ_I |α_I|² χ_I)^{1/2}` on the series grid.
pub fn square_function(series: &HaarSeries, budget: GridBudget) -> Result<GridFunction> {
    let level = series.grid_level();
    budget.check(&[level])?;
    let mut sq = vec![0.0; 1usize << level];
    for (interval, coeff) in series.terms() {
        let weight: f64 = coeff.iter().map(|a| a * a).sum();
        let span = 1usize << (level - interval.level());
        let start = interval.position() as usize * span;
        sq[start..start + span].iter_mut().for_each(|v| *v += weight);
    }
    GridFunction::new(vec![level], sq.into_iter().map(f64::sqrt).collect())
}

/// Square function of a multiparameter expansion viewed as a Haar series
/// in the variable `x_axis` with function-valued coefficients.
///
/// Writing `F = Σ_ℓ F_ℓ` where `F_ℓ` collects the terms whose side along
/// `axis` sits at level `ℓ`, this is `(Σ_ℓ F_ℓ²)^{1/2}` pointwise.
pub fn square_function_axis(e: &HaarExpansion, axis: usize, budget: GridBudget) -> Result<GridFunction> {
    if axis >= e.dim() {
        return Err(Error::InvalidInput(format!("axis {axis} >= dimension {}", e.dim())));
    }
    let levels = e.grid_levels();
    budget.check(&levels)?;
    let mut sq = vec![0.0; 1usize << levels.iter().sum::<u32>()];
    let mut axis_levels: Vec<u32> = e.shapes().map(|s| s.entries()[axis]).collect();
    axis_levels.sort_unstable();
    axis_levels.dedup();
    for level in axis_levels {
        let part = e.restrict_axis_level(axis, level)?.to_grid(budget)?;
        for (s, v) in sq.iter_mut().zip(part.values()) {
            *s += v * v;
        }
    }
    GridFunction::new(levels, sq.into_iter().map(f64::sqrt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::ShapeVector;
    use crate::hyperbolic::{lp_norm, RFunction};

    fn iv(l: u32, p: u64) -> DyadicInterval {
        DyadicInterval::new(l, p).unwrap()
    }

    #[test]
    fn single_haar() {
        let mut s = HaarSeries::new(1).unwrap();
        s.insert_scalar(DyadicInterval::unit(), 1.0).unwrap();
        let sf = square_function(&s, GridBudget::default()).unwrap();
        assert!(sf.values().iter().all(|&v| v == 1.0));
        assert_eq!(lp_norm(&sf, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn two_terms() {
        let mut s = HaarSeries::new(1).unwrap();
        s.insert_scalar(iv(0, 0), 1.0).unwrap();
        s.insert_scalar(iv(1, 0), 1.0).unwrap();
        let sf = square_function(&s, GridBudget::default()).unwrap();
        let h = std::f64::consts::SQRT_2;
        assert_eq!(sf.values(), &[h, h, 1.0, 1.0]);
    }

    #[test]
    fn lacunary_nested_support() {
        // h_{[0,1)} + h_{[0,1/2)} + h_{[0,1/4)} + …, k terms
        let k = 6;
        let mut s = HaarSeries::new(1).unwrap();
        for j in 0..k {
            s.insert_scalar(iv(j, 0), 1.0).unwrap();
        }
        let sf = square_function(&s, GridBudget::default()).unwrap();
        // the first cell lies in all k supports
        assert!((sf.values()[0] - (k as f64).sqrt()).abs() < 1e-15);
        // accumulation oracle
        for (c, &v) in sf.values().iter().enumerate() {
            let x = (c as f64 + 0.5) / sf.len() as f64;
            let count = (0..k).filter(|&j| iv(j, 0).contains(x)).count();
            assert_eq!(v, (count as f64).sqrt());
        }
    }

    #[test]
    fn vector_coefficients() {
        let mut s = HaarSeries::new(2).unwrap();
        s.insert(iv(0, 0), vec![3.0, 4.0]).unwrap();
        assert!(s.to_grid(GridBudget::default()).is_err());
        let n = s.norm_grid(GridBudget::default()).unwrap();
        assert_eq!(n.values(), &[5.0, 5.0]);
        let sf = square_function(&s, GridBudget::default()).unwrap();
        assert_eq!(sf.values(), &[5.0, 5.0]);
        assert!(s.insert(iv(0, 0), vec![1.0]).is_err());
    }

    #[test]
    fn axis_square_function_of_full_sign_dual() {
        // F = Σ_r f_r with full signs: every F_ℓ is a single r-function, so
        // the square function along any axis is √(#shapes).
        let n = 3;
        let mut e = HaarExpansion::new(2, n).unwrap();
        for shape in ShapeVector::with_order(n, 2) {
            e.add_rfunction(&RFunction::constant(shape, 1).unwrap()).unwrap();
        }
        let sf = square_function_axis(&e, 0, GridBudget::default()).unwrap();
        let expected = ((n + 1) as f64).sqrt();
        assert!(sf.values().iter().all(|&v| (v - expected).abs() < 1e-14));
    }
}
