//! Dyadic intervals and rectangles, L^∞-normalized Haar functions and the
//! two-dimensional product rule.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Deepest level an interval may sit at; positions must fit in a `u64` and
/// `x · 2^(level+1)` must stay exact in an `f64`.
pub const MAX_LEVEL: u32 = 52;

/// The half-open interval `[k·2^-j, (k+1)·2^-j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    level: u32,
    position: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, position: u64) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::InvalidInput(format!(
                "interval level {level} exceeds {MAX_LEVEL}"
            )));
        }
        if position >= 1u64 << level {
            return Err(Error::InvalidInput(format!(
                "position {position} out of range at level {level}"
            )));
        }
        Ok(Self { level, position })
    }

    /// `[0, 1)`.
    pub fn unit() -> Self {
        Self {
            level: 0,
            position: 0,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn length(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.position as f64 * self.length()
    }

    pub fn right(&self) -> f64 {
        (self.position + 1) as f64 * self.length()
    }

    pub fn midpoint(&self) -> f64 {
        (2 * self.position + 1) as f64 * (-(self.level as f64) - 1.0).exp2()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.left() && x < self.right()
    }

    /// Left and right halves.
    pub fn children(&self) -> (Self, Self) {
        let level = self.level + 1;
        (
            Self {
                level,
                position: 2 * self.position,
            },
            Self {
                level,
                position: 2 * self.position + 1,
            },
        )
    }

    /// Whether `self ⊆ other`.
    pub fn is_within(&self, other: &Self) -> bool {
        self.level >= other.level && self.position >> (self.level - other.level) == other.position
    }

    /// Dyadic intervals are nested or disjoint; returns the smaller one when
    /// they intersect.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if self.is_within(other) {
            Some(*self)
        } else if other.is_within(self) {
            Some(*other)
        } else {
            None
        }
    }

    /// `h_I(x)`: −1 on the left half, +1 on the right half, 0 elsewhere.
    pub fn haar(&self, x: f64) -> Result<i8> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("haar argument {x} outside [0, 1)")));
        }
        Ok(self.haar_unchecked(x))
    }

    pub(crate) fn haar_unchecked(&self, x: f64) -> i8 {
        let fine = (x * ((self.level + 1) as f64).exp2()) as u64;
        if fine >> 1 != self.position {
            0
        } else if fine & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Value of `h_I` on the sub-interval `other ⊆ I` when `other` lies in a
    /// single half of `I`; `None` otherwise.
    fn haar_on(&self, other: &Self) -> Option<i8> {
        if other.level <= self.level || !other.is_within(self) {
            return None;
        }
        let bit = (other.position >> (other.level - self.level - 1)) & 1;
        Some(if bit == 1 { 1 } else { -1 })
    }
}

/// Product `R_1 × … × R_d` of dyadic intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicRectangle {
    sides: Vec<DyadicInterval>,
}

impl DyadicRectangle {
    pub fn new(sides: Vec<DyadicInterval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidInput("rectangle needs at least one side".into()));
        }
        Ok(Self { sides })
    }

    /// The unit cube `[0,1)^d`.
    pub fn unit(dim: usize) -> Self {
        Self {
            sides: vec![DyadicInterval::unit(); dim.max(1)],
        }
    }

    /// Builds a rectangle from per-axis `(level, position)` pairs.
    pub fn from_pairs(pairs: &[(u32, u64)]) -> Result<Self> {
        let sides = pairs
            .iter()
            .map(|&(l, p)| DyadicInterval::new(l, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sides)
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[DyadicInterval] {
        &self.sides
    }

    pub fn shape(&self) -> ShapeVector {
        ShapeVector::new(self.sides.iter().map(|s| s.level).collect())
    }

    /// `Σ` of side levels, so that `|R| = 2^-order`.
    pub fn order(&self) -> u32 {
        self.sides.iter().map(|s| s.level).sum()
    }

    pub fn volume(&self) -> f64 {
        (-(self.order() as f64)).exp2()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.sides.iter().zip(x).all(|(s, &t)| s.contains(t))
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        self.sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()
            .map(|sides| Self { sides })
    }

    /// `h_R(x) = Π_j h_{R_j}(x_j)`.
    pub fn haar(&self, x: &[f64]) -> Result<i8> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut value = 1i8;
        for (side, &t) in self.sides.iter().zip(x) {
            value *= side.haar(t)?;
            if value == 0 {
                break;
            }
        }
        Ok(value)
    }
}

/// Per-axis dyadic levels `r = (r_1, …, r_d)`; the family `𝒟_r` of
/// rectangles with side lengths `2^-r_j` partitions the unit cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShapeVector(Vec<u32>);

impl ShapeVector {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|r| = Σ r_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of rectangles in `𝒟_r`, namely `2^|r|`.
    pub fn count(&self) -> Result<u64> {
        let order = self.order();
        if order >= 64 {
            return Err(Error::Overflow(format!("2^{order} rectangles")));
        }
        Ok(1u64 << order)
    }

    /// Row-major index of a position vector (axis 0 most significant).
    pub fn position_index(&self, position: &[u64]) -> Result<u64> {
        if position.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: position.len(),
            });
        }
        let mut index = 0u64;
        for (&r, &p) in self.0.iter().zip(position) {
            if p >= 1u64 << r {
                return Err(Error::InvalidInput(format!(
                    "position {p} out of range for side level {r}"
                )));
            }
            index = (index << r) | p;
        }
        Ok(index)
    }

    /// Inverse of [`ShapeVector::position_index`].
    pub fn position_of(&self, index: u64) -> Vec<u64> {
        let mut out = vec![0; self.dim()];
        let mut rest = index;
        for (slot, &r) in out.iter_mut().zip(&self.0).rev() {
            *slot = rest & ((1u64 << r) - 1);
            rest >>= r;
        }
        out
    }

    pub fn rectangle(&self, index: u64) -> DyadicRectangle {
        let sides = self
            .0
            .iter()
            .zip(self.position_of(index))
            .map(|(&level, position)| DyadicInterval { level, position })
            .collect();
        DyadicRectangle { sides }
    }

    /// All rectangles of `𝒟_r` in row-major position order.
    pub fn rectangles(&self) -> impl Iterator<Item = DyadicRectangle> + '_ {
        let count = 1u64 << self.order();
        (0..count).map(move |i| self.rectangle(i))
    }

    /// All shapes with `|r| = n` in `d` coordinates, lexicographically
    /// ascending: for `d = 2` this is `(0,n), (1,n−1), …, (n,0)`.
    pub fn with_order(n: u32, d: usize) -> Vec<ShapeVector> {
        let mut out = Vec::new();
        if d == 0 {
            return out;
        }
        let mut current = vec![0u32; d];
        fill_compositions(n, 0, &mut current, &mut out);
        out
    }

    /// All shapes with `|r| ≤ n`, grouped by ascending order.
    pub fn with_order_at_most(n: u32, d: usize) -> Vec<ShapeVector> {
        (0..=n).flat_map(|k| Self::with_order(k, d)).collect()
    }
}

fn fill_compositions(rest: u32, axis: usize, current: &mut Vec<u32>, out: &mut Vec<ShapeVector>) {
    if axis + 1 == current.len() {
        current[axis] = rest;
        out.push(ShapeVector(current.clone()));
        return;
    }
    for v in 0..=rest {
        current[axis] = v;
        fill_compositions(rest - v, axis + 1, current, out);
    }
}

/// Outcome of multiplying two Haar functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductRule {
    /// `h_R · h_R' = sign · h_rect` pointwise.
    Haar { sign: i8, rect: DyadicRectangle },
    NotApplicable,
}

/// The product rule: for distinct, intersecting rectangles of equal volume
/// in the plane, `h_R · h_R' = ± h_{R∩R'}`.
///
/// The identity needs the two rectangles to differ in side length along
/// every axis. In the plane that follows from equal volume and `R ≠ R'`; in
/// higher dimensions a coinciding side yields `h_I² = 1_I` and the product is
/// no longer a Haar function, so those pairs are `NotApplicable`.
pub fn product_rule(a: &DyadicRectangle, b: &DyadicRectangle) -> ProductRule {
    if a.dim() != b.dim() || a == b || a.order() != b.order() {
        return ProductRule::NotApplicable;
    }
    let Some(rect) = a.intersect(b) else {
        return ProductRule::NotApplicable;
    };
    let mut sign = 1i8;
    for (sa, sb) in a.sides.iter().zip(&b.sides) {
        let factor = match sa.level.cmp(&sb.level) {
            std::cmp::Ordering::Equal => return ProductRule::NotApplicable,
            std::cmp::Ordering::Less => sa.haar_on(sb),
            std::cmp::Ordering::Greater => sb.haar_on(sa),
        };
        match factor {
            Some(f) => sign *= f,
            None => return ProductRule::NotApplicable,
        }
    }
    ProductRule::Haar { sign, rect }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(level: u32, position: u64) -> DyadicInterval {
        DyadicInterval::new(level, position).unwrap()
    }

    #[test]
    fn haar_halves_and_support() {
        let unit = DyadicInterval::unit();
        assert_eq!(unit.haar(0.25).unwrap(), -1);
        assert_eq!(unit.haar(0.75).unwrap(), 1);
        assert_eq!(unit.haar(0.5).unwrap(), 1);
        assert_eq!(unit.haar(0.0).unwrap(), -1);
        assert_eq!(iv(2, 1).haar(0.6).unwrap(), 0);
        assert!(unit.haar(1.0).is_err());
        assert!(unit.haar(-0.1).is_err());
    }

    #[test]
    fn interval_validation() {
        assert!(DyadicInterval::new(2, 4).is_err());
        assert!(DyadicInterval::new(MAX_LEVEL + 1, 0).is_err());
        let i = iv(3, 5);
        assert_eq!(i.left(), 0.625);
        assert_eq!(i.right(), 0.75);
        assert_eq!(i.midpoint(), 0.6875);
    }

    #[test]
    fn haar_rect_tensor_product() {
        let unit = DyadicRectangle::unit(2);
        assert_eq!(unit.haar(&[0.25, 0.25]).unwrap(), 1);
        assert_eq!(unit.haar(&[0.25, 0.75]).unwrap(), -1);
        let half = DyadicRectangle::from_pairs(&[(1, 0), (0, 0)]).unwrap();
        assert_eq!(half.haar(&[0.75, 0.25]).unwrap(), 0);
        assert!(matches!(
            unit.haar(&[0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shape_positions_round_trip() {
        let r = ShapeVector::new(vec![2, 0, 3]);
        assert_eq!(r.count().unwrap(), 32);
        for idx in 0..32 {
            let pos = r.position_of(idx);
            assert_eq!(r.position_index(&pos).unwrap(), idx);
        }
        assert_eq!(r.position_index(&[3, 0, 7]).unwrap(), 31);
        assert!(r.position_index(&[4, 0, 0]).is_err());
    }

    #[test]
    fn compositions_are_lexicographic() {
        let shapes = ShapeVector::with_order(2, 2);
        let entries: Vec<_> = shapes.iter().map(|s| s.entries().to_vec()).collect();
        assert_eq!(entries, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(ShapeVector::with_order(2, 3).len(), 6);
        assert_eq!(ShapeVector::with_order(5, 1).len(), 1);
        assert_eq!(ShapeVector::with_order_at_most(2, 2).len(), 6);
    }

    #[test]
    fn product_rule_planar_example() {
        let a = DyadicRectangle::from_pairs(&[(1, 0), (0, 0)]).unwrap();
        let b = DyadicRectangle::from_pairs(&[(0, 0), (1, 0)]).unwrap();
        let ProductRule::Haar { sign, rect } = product_rule(&a, &b) else {
            panic!("expected a Haar product");
        };
        assert_eq!(rect, DyadicRectangle::from_pairs(&[(1, 0), (1, 0)]).unwrap());
        // pointwise check on the 4×4 grid of cell centers
        for i in 0..4 {
            for j in 0..4 {
                let x = [(i as f64 + 0.5) / 4.0, (j as f64 + 0.5) / 4.0];
                let lhs = a.haar(&x).unwrap() * b.haar(&x).unwrap();
                assert_eq!(lhs, sign * rect.haar(&x).unwrap());
            }
        }
    }

    #[test]
    fn product_rule_exclusions() {
        let a = DyadicRectangle::from_pairs(&[(1, 0), (0, 0)]).unwrap();
        assert_eq!(product_rule(&a, &a), ProductRule::NotApplicable);
        let b = DyadicRectangle::from_pairs(&[(1, 1), (0, 0)]).unwrap();
        assert_eq!(product_rule(&a, &b), ProductRule::NotApplicable);
        let c = DyadicRectangle::from_pairs(&[(2, 0), (0, 0)]).unwrap();
        assert_eq!(product_rule(&a, &c), ProductRule::NotApplicable);
        // d = 3 with a coinciding side length
        let p = DyadicRectangle::from_pairs(&[(1, 0), (1, 0), (0, 0)]).unwrap();
        let q = DyadicRectangle::from_pairs(&[(1, 0), (0, 0), (1, 0)]).unwrap();
        assert_eq!(product_rule(&p, &q), ProductRule::NotApplicable);
    }
}
