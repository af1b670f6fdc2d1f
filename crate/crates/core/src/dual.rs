//! Dual test functions from the lower-bound arguments, with exact checks of
//! the identities they rely on.
//!
//! * Roth's dual `F = Σ_{|r|=n} f_r` and the chain `‖D_N‖₂ ≥ ⟨D_N,F⟩/‖F‖₂`.
//! * The Riesz product `Ψ = Π_j (1 + f_{(j,n−j)})` in the plane, which is
//!   nonnegative with unit mass and pairs with a signed hyperbolic sum to
//!   `2^{-n} Σ|α_R|`.
//! * Halász's `Φ = Π_j (1 + γ f_j) − 1` and the sine test `sin(cF/√n)`.
//! * Coincidence sums `Σ f_{r_1}⋯f_{r_k}` over shape tuples with prescribed
//!   equal coordinates, of which the Beck gain sum is the case `k = 2`,
//!   `r_1 = s_1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discrepancy::DiscrepancyField;
use crate::dyadic::ShapeVector;
use crate::grid::{GridBudget, GridFunction};
use crate::hyperbolic::{lp_norm, HaarExpansion, RFunction};
use crate::{Error, Result};

/// Scale `⌈1 + log₂ N⌉` used for dual functions of an `N`-point set.
pub fn default_scale(n_points: usize) -> u32 {
    let n = n_points.max(1);
    1 + n.next_power_of_two().trailing_zeros()
}

/// How the signs of a family of r-functions are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignModel {
    /// The same sign on every rectangle.
    Constant(i8),
    /// Independent fair signs; shape `i` uses ChaCha8 stream `i` of `seed`.
    Random { seed: u64 },
}

/// One r-function per shape, signs drawn according to `model`.
pub fn rfunction_family(shapes: &[ShapeVector], model: SignModel) -> Result<Vec<RFunction>> {
    shapes
        .iter()
        .enumerate()
        .map(|(i, shape)| match model {
            SignModel::Constant(s) => RFunction::constant(shape.clone(), s),
            SignModel::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let count = shape.count()? as usize;
                let signs = (0..count).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
                RFunction::new(shape.clone(), signs)
            }
        })
        .collect()
}

/// `F = Σ f_r` for r-functions of pairwise distinct shapes of order `n`.
pub fn roth_dual_from_signs(d: usize, n: u32, factors: &[RFunction]) -> Result<HaarExpansion> {
    let mut e = HaarExpansion::new(d, n)?;
    for f in factors {
        if e.shape_coefficients(f.shape()).is_some() {
            return Err(Error::InvalidInput(format!(
                "shape {:?} appears twice",
                f.shape().entries()
            )));
        }
        e.add_rfunction(f)?;
    }
    Ok(e)
}

/// Roth's dual function built from the sign-matched r-functions of `D_N`.
#[derive(Clone, Debug)]
pub struct RothDual {
    pub expansion: HaarExpansion,
    pub factors: Vec<RFunction>,
    /// `⟨D_N, f_r⟩` per shape, in the order of `factors`.
    pub pairings: Vec<f64>,
}

impl RothDual {
    /// `⟨D_N, F⟩ = Σ_r Σ_R |⟨D_N, h_R⟩|`.
    pub fn pairing(&self) -> f64 {
        self.pairings.iter().sum()
    }
}

pub fn roth_dual(field: &DiscrepancyField, n: u32) -> Result<RothDual> {
    let shapes = ShapeVector::with_order(n, field.dim());
    let mut factors = Vec::with_capacity(shapes.len());
    let mut pairings = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        let l = field.lemma1_rfunction(shape)?;
        factors.push(l.rfunction);
        pairings.push(l.pairing);
    }
    let expansion = roth_dual_from_signs(field.dim(), n, &factors)?;
    Ok(RothDual {
        expansion,
        factors,
        pairings,
    })
}

/// The Cauchy–Schwarz step `‖D_N‖₂ ≥ ⟨D_N,F⟩/‖F‖₂`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: u32,
    pub pairing: f64,
    pub dual_l2: f64,
    pub lower_bound: f64,
    pub exact_l2: f64,
    pub holds: bool,
}

pub fn chain_verify(field: &DiscrepancyField, n: u32) -> Result<ChainReport> {
    let dual = roth_dual(field, n)?;
    let pairing = dual.pairing();
    let dual_l2 = dual.expansion.parseval_l2();
    let lower_bound = pairing / dual_l2;
    let exact_l2 = field.l2_norm_exact()?;
    Ok(ChainReport {
        n,
        pairing,
        dual_l2,
        lower_bound,
        exact_l2,
        holds: lower_bound <= exact_l2 * (1.0 + 1e-12),
    })
}

/// Which shapes `(j, n−j)` enter a planar Riesz product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorRange {
    /// `j = 0, …, n`.
    #[default]
    AllShapes,
    /// `j = 1, …, n`, omitting the shape `(0, n)`.
    SkipFirst,
}

/// Planar shapes of order `n` in the Riesz product, ordered by `j`.
pub fn riesz_shapes(n: u32, range: FactorRange) -> Vec<ShapeVector> {
    let start = match range {
        FactorRange::AllShapes => 0,
        FactorRange::SkipFirst => 1,
    };
    (start..=n).map(|j| ShapeVector::new(vec![j, n - j])).collect()
}

fn check_planar_factors(n: u32, factors: &[RFunction]) -> Result<()> {
    let mut seen = vec![false; n as usize + 1];
    for f in factors {
        let r = f.shape().entries();
        if r.len() != 2 || f.shape().order() != n {
            return Err(Error::InvalidInput(format!(
                "Riesz factors must be planar of order {n}, got shape {r:?}"
            )));
        }
        if std::mem::replace(&mut seen[r[0] as usize], true) {
            return Err(Error::InvalidInput(format!(
                "two factors share the first coordinate {}",
                r[0]
            )));
        }
    }
    Ok(())
}

/// `Π (1 + w·f)` on the `(n+1, n+1)` grid.
fn product_grid(n: u32, factors: &[RFunction], weight: f64, budget: GridBudget) -> Result<GridFunction> {
    let levels = vec![n + 1, n + 1];
    budget.check(&levels)?;
    let mut values = vec![1.0; 1usize << (2 * (n + 1))];
    for f in factors {
        let g = f.to_grid(&levels, budget)?;
        for (v, x) in values.iter_mut().zip(g.values()) {
            *v *= 1.0 + weight * x;
        }
    }
    GridFunction::new(levels, values)
}

/// `Ψ` with its certificate fields.
#[derive(Clone, Debug)]
pub struct RieszCertificate {
    pub psi: GridFunction,
    pub min: f64,
    pub mean: f64,
    pub l1: f64,
}

/// `Ψ = Π (1 + f_{(j,n−j)})` over planar factors with distinct first
/// coordinates.
pub fn riesz_talagrand(n: u32, factors: &[RFunction], budget: GridBudget) -> Result<RieszCertificate> {
    check_planar_factors(n, factors)?;
    let psi = product_grid(n, factors, 1.0, budget)?;
    let min = psi.min();
    let mean = psi.integral();
    let l1 = lp_norm(&psi, 1.0)?;
    Ok(RieszCertificate { psi, min, mean, l1 })
}

/// Ψ-factors matching the signs of a planar hyperbolic sum:
/// `ε_R = sgn α_R` (ties to +1) over every shape of order `n`.
pub fn matching_factors(e: &HaarExpansion) -> Result<Vec<RFunction>> {
    if e.dim() != 2 {
        return Err(Error::InvalidInput("matching Riesz factors need d = 2".into()));
    }
    riesz_shapes(e.scale(), FactorRange::AllShapes)
        .into_iter()
        .map(|shape| {
            let signs = e
                .dense(&shape)?
                .iter()
                .map(|&a| if a < 0.0 { -1 } else { 1 })
                .collect();
            RFunction::new(shape, signs)
        })
        .collect()
}

/// Exact `⟨Σ α_R h_R, Ψ⟩`.
pub fn duality_pair(e: &HaarExpansion, psi: &GridFunction, budget: GridBudget) -> Result<f64> {
    let levels = e.grid_levels();
    if levels != psi.levels() {
        return Err(Error::GridMismatch {
            left: levels,
            right: psi.levels().to_vec(),
        });
    }
    e.to_grid(budget)?.inner(psi)
}

/// Halász's `Φ` and the decomposition of its pairing with `D_N`.
#[derive(Clone, Debug, Serialize)]
pub struct HalaszReport {
    pub n: u32,
    pub gamma: f64,
    pub factors: usize,
    pub pairing: f64,
    /// `γ Σ_j ⟨D_N, f_j⟩`.
    pub linear: f64,
    pub remainder: f64,
    pub mean: f64,
    pub sup: f64,
    /// `(1+γ)^S − 1` for `S` factors.
    pub sup_bound: f64,
    pub l1: f64,
    /// `⟨D_N,Φ⟩/‖Φ‖₁ ≤ ‖D_N‖_∞` (0 when `Φ ≡ 0`).
    pub lower_bound: f64,
}

pub fn riesz_halasz(
    field: &DiscrepancyField,
    gamma: f64,
    n: u32,
    range: FactorRange,
    budget: GridBudget,
) -> Result<(GridFunction, HalaszReport)> {
    if field.dim() != 2 {
        return Err(Error::InvalidInput("Halász's Φ is planar: need d = 2".into()));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!("γ must lie in [0, 1], got {gamma}")));
    }
    let shapes = riesz_shapes(n, range);
    let mut factors = Vec::with_capacity(shapes.len());
    let mut linear = 0.0;
    for shape in &shapes {
        let l = field.lemma1_rfunction(shape)?;
        linear += gamma * l.pairing;
        factors.push(l.rfunction);
    }
    let phi = product_grid(n, &factors, gamma, budget)?.map(|v| v - 1.0)?;
    let pairing = field.pair_with_grid(&phi)?;
    let l1 = lp_norm(&phi, 1.0)?;
    let report = HalaszReport {
        n,
        gamma,
        factors: factors.len(),
        pairing,
        linear,
        remainder: pairing - linear,
        mean: phi.integral(),
        sup: phi.values().iter().fold(0.0f64, |m, v| m.max(v.abs())),
        sup_bound: (1.0 + gamma).powi(factors.len() as i32) - 1.0,
        l1,
        lower_bound: if l1 > 0.0 { pairing / l1 } else { 0.0 },
    };
    Ok((phi, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct SineReport {
    pub n: u32,
    pub c: f64,
    /// `⟨D_N, sin(cF/√n)⟩`, a lower bound for `‖D_N‖₁`.
    pub pairing: f64,
    /// First-order term `c⟨D_N,F⟩/√n`.
    pub linear: f64,
}

/// Halász's sine test with `F` the Roth dual at scale `n`.
///
/// `sin(cF/√n)` is constant on the cells of `F`'s grid, so the pairing with
/// the piecewise multilinear `D_N` is computed exactly.
pub fn halasz_sine(field: &DiscrepancyField, c: f64, n: u32, budget: GridBudget) -> Result<SineReport> {
    if field.dim() != 2 {
        return Err(Error::InvalidInput("the sine test is planar: need d = 2".into()));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidInput(format!("c must lie in (0, 1), got {c}")));
    }
    let dual = roth_dual(field, n)?;
    let scale = c / (n.max(1) as f64).sqrt();
    let test = dual.expansion.to_grid(budget)?.map(|v| (scale * v).sin())?;
    Ok(SineReport {
        n,
        c,
        pairing: field.pair_with_grid(&test)?,
        linear: scale * dual.pairing(),
    })
}

/// A set of equal-coordinate constraints on a `k`-tuple of shapes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub k: usize,
    /// `(axis, members)`: the listed tuple members share coordinate `axis`.
    pub coincidences: Vec<(usize, Vec<usize>)>,
}

impl Pattern {
    pub fn new(k: usize, coincidences: Vec<(usize, Vec<usize>)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("pattern needs k ≥ 1".into()));
        }
        for (_, members) in &coincidences {
            if members.len() < 2 || members.iter().any(|&m| m >= k) {
                return Err(Error::InvalidInput(format!(
                    "coincidence members {members:?} invalid for k = {k}"
                )));
            }
        }
        Ok(Self { k, coincidences })
    }

    /// The Beck gain pattern: two shapes with equal first coordinate.
    pub fn beck() -> Self {
        Self {
            k: 2,
            coincidences: vec![(0, vec![0, 1])],
        }
    }

    pub fn matches(&self, tuple: &[&ShapeVector]) -> bool {
        self.coincidences.iter().all(|(axis, members)| {
            let first = tuple[members[0]].entries()[*axis];
            members.iter().all(|&m| tuple[m].entries()[*axis] == first)
        })
    }

    /// `M = kd − rank` of the linear system `|r_i| = n` plus coincidences,
    /// the number of free integer parameters of the tuple.
    pub fn free_parameters(&self, d: usize) -> Result<usize> {
        let vars = self.k * d;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..self.k {
            let mut row = vec![0.0; vars];
            row[i * d..(i + 1) * d].iter_mut().for_each(|v| *v = 1.0);
            rows.push(row);
        }
        for (axis, members) in &self.coincidences {
            if *axis >= d {
                return Err(Error::InvalidInput(format!("axis {axis} >= dimension {d}")));
            }
            for w in members.windows(2) {
                let mut row = vec![0.0; vars];
                row[w[0] * d + axis] += 1.0;
                row[w[1] * d + axis] -= 1.0;
                rows.push(row);
            }
        }
        Ok(vars - rank(rows))
    }
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))
        else {
            break;
        };
        if rows[pivot][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, pivot);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / rows[r][c];
                if f != 0.0 {
                    for j in c..cols {
                        rows[i][j] -= f * rows[r][j];
                    }
                }
            }
        }
        r += 1;
    }
    r
}

/// One row of a coincidence-sum norm table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormRow {
    pub p: f64,
    pub norm: f64,
    /// `‖G‖_p / (p^{d−1} n^{(2d−3)/2})`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoincidenceReport {
    pub n: u32,
    pub d: usize,
    pub k: usize,
    /// Ordered tuples of pairwise distinct shapes in the sum.
    pub tuples: usize,
    pub free_parameters: usize,
    pub norms: Vec<NormRow>,
}

fn norm_table(g: &GridFunction, n: u32, d: usize, ladder: &[f64]) -> Result<Vec<NormRow>> {
    let nn = (n.max(1)) as f64;
    let growth = nn.powf((2.0 * d as f64 - 3.0) / 2.0);
    ladder
        .iter()
        .map(|&p| {
            let norm = lp_norm(g, p)?;
            Ok(NormRow {
                p,
                norm,
                ratio: norm / (p.powi(d as i32 - 1) * growth),
            })
        })
        .collect()
}

fn family_grids(n: u32, d: usize, model: SignModel, budget: GridBudget) -> Result<(Vec<ShapeVector>, Vec<GridFunction>)> {
    let levels = vec![n + 1; d];
    budget.check(&levels)?;
    let shapes = ShapeVector::with_order(n, d);
    let grids = rfunction_family(&shapes, model)?
        .iter()
        .map(|f| f.to_grid(&levels, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok((shapes, grids))
}

/// `Σ_{r≠s, |r|=|s|=n, r_1=s_1} f_r f_s` on the grid and its norm table.
///
/// Grouping shapes by first coordinate `a` with `G_a = Σ_{r_1=a} f_r`, the
/// sum is `Σ_a (G_a² − Σ_{r_1=a} f_r²)`.
pub fn beck_gain_sum(
    n: u32,
    d: usize,
    model: SignModel,
    ladder: &[f64],
    budget: GridBudget,
) -> Result<(GridFunction, CoincidenceReport)> {
    if d < 3 {
        return Err(Error::InvalidInput("the Beck gain sum concerns d ≥ 3".into()));
    }
    let (shapes, grids) = family_grids(n, d, model, budget)?;
    let cells = grids[0].len();
    let mut total = vec![0.0; cells];
    let mut tuples = 0;
    for a in 0..=n {
        let members: Vec<&GridFunction> = shapes
            .iter()
            .zip(&grids)
            .filter(|(s, _)| s.entries()[0] == a)
            .map(|(_, g)| g)
            .collect();
        tuples += members.len() * members.len().saturating_sub(1);
        for c in 0..cells {
            let mut sum = 0.0;
            let mut squares = 0.0;
            for g in &members {
                let v = g.values()[c];
                sum += v;
                squares += v * v;
            }
            total[c] += sum * sum - squares;
        }
    }
    let g = GridFunction::new(vec![n + 1; d], total)?;
    let report = CoincidenceReport {
        n,
        d,
        k: 2,
        tuples,
        free_parameters: Pattern::beck().free_parameters(d)?,
        norms: norm_table(&g, n, d, ladder)?,
    };
    Ok((g, report))
}

/// `Σ f_{r_1}⋯f_{r_k}` over ordered tuples of pairwise distinct shapes of
/// order `n` matching `pattern`.
pub fn coincidence_pattern_sum(
    n: u32,
    d: usize,
    pattern: &Pattern,
    model: SignModel,
    ladder: &[f64],
    budget: GridBudget,
) -> Result<(GridFunction, CoincidenceReport)> {
    if pattern.k > 3 {
        return Err(Error::budget(
            format!("coincidence sums of {}-tuples", pattern.k),
            "use k <= 3",
        ));
    }
    let free_parameters = pattern.free_parameters(d)?;
    let (shapes, grids) = family_grids(n, d, model, budget)?;
    let cells = grids[0].len();
    let mut total = vec![0.0; cells];
    let mut tuples = 0;
    let s = shapes.len();
    let mut idx = vec![0usize; pattern.k];
    let count = s.pow(pattern.k as u32);
    let mut prod = vec![0.0; cells];
    for mut t in 0..count {
        for slot in idx.iter_mut() {
            *slot = t % s;
            t /= s;
        }
        let distinct = (0..idx.len()).all(|a| (a + 1..idx.len()).all(|b| idx[a] != idx[b]));
        if !distinct {
            continue;
        }
        let tuple: Vec<&ShapeVector> = idx.iter().map(|&i| &shapes[i]).collect();
        if !pattern.matches(&tuple) {
            continue;
        }
        tuples += 1;
        prod.copy_from_slice(grids[idx[0]].values());
        for &i in &idx[1..] {
            for (p, v) in prod.iter_mut().zip(grids[i].values()) {
                *p *= v;
            }
        }
        for (acc, p) in total.iter_mut().zip(&prod) {
            *acc += p;
        }
    }
    let g = GridFunction::new(vec![n + 1; d], total)?;
    let report = CoincidenceReport {
        n,
        d,
        k: pattern.k,
        tuples,
        free_parameters,
        norms: norm_table(&g, n, d, ladder)?,
    };
    Ok((g, report))
}

/// JSON certificate record.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    pub variant: String,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub min: f64,
    pub mean: f64,
    pub l1: f64,
    pub pairing: f64,
    pub lower_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{project_shape, sup_norm};
    use crate::points::van_der_corput;

    #[test]
    fn scale_rule() {
        assert_eq!(default_scale(1), 1);
        assert_eq!(default_scale(2), 2);
        assert_eq!(default_scale(64), 7);
        assert_eq!(default_scale(65), 8);
    }

    #[test]
    fn full_sign_duals() {
        let shapes = ShapeVector::with_order(1, 2);
        let f = rfunction_family(&shapes, SignModel::Constant(1)).unwrap();
        let e = roth_dual_from_signs(2, 1, &f).unwrap();
        assert!((e.parseval_l2() - 2f64.sqrt()).abs() < 1e-15);
        let g = e.to_grid(GridBudget::default()).unwrap();
        assert!((lp_norm(&g, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let shapes = ShapeVector::with_order(2, 3);
        assert_eq!(shapes.len(), 6);
        let f = rfunction_family(&shapes, SignModel::Random { seed: 1 }).unwrap();
        let e = roth_dual_from_signs(3, 2, &f).unwrap();
        assert!((e.parseval_l2().powi(2) - 6.0).abs() < 1e-12);
        assert!(roth_dual_from_signs(3, 2, &[f[0].clone(), f[0].clone()]).is_err());
    }

    #[test]
    fn roth_pairing_is_coefficient_sum() {
        let field = DiscrepancyField::new(van_der_corput(5).unwrap());
        let dual = roth_dual(&field, 6).unwrap();
        let direct: f64 = ShapeVector::with_order(6, 2)
            .iter()
            .map(|s| field.shape_coefficients(s).unwrap().iter().map(|c| c.abs()).sum::<f64>())
            .sum();
        assert!(dual.pairing() > 0.0);
        assert!((dual.pairing() - direct).abs() < 1e-12);
        let g = dual.expansion.to_grid(GridBudget::default()).unwrap();
        assert!((field.pair_with_grid(&g).unwrap() - direct).abs() < 1e-11);
        let chain = chain_verify(&field, 6).unwrap();
        assert!(chain.holds);
    }

    #[test]
    fn riesz_small_case() {
        let f = rfunction_family(&riesz_shapes(1, FactorRange::AllShapes), SignModel::Constant(1)).unwrap();
        let cert = riesz_talagrand(1, &f, GridBudget::default()).unwrap();
        assert_eq!(cert.mean, 1.0);
        assert!(cert.min >= 0.0);
        assert_eq!(cert.l1, 1.0);
        let e = roth_dual_from_signs(2, 1, &f).unwrap();
        assert_eq!(duality_pair(&e, &cert.psi, GridBudget::default()).unwrap(), 2.0);
    }

    #[test]
    fn riesz_rejects_repeated_first_coordinate() {
        let s = ShapeVector::new(vec![1, 2]);
        let f = RFunction::constant(s, 1).unwrap();
        assert!(riesz_talagrand(3, &[f.clone(), f], GridBudget::default()).is_err());
    }

    #[test]
    fn duality_identity_and_sup_bound() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut e = HaarExpansion::new(2, n).unwrap();
        for shape in ShapeVector::with_order(n, 2) {
            let v: Vec<f64> = (0..shape.count().unwrap()).map(|_| rng.random::<f64>() - 0.5).collect();
            e.set_shape(&shape, v).unwrap();
        }
        let psi = riesz_talagrand(n, &matching_factors(&e).unwrap(), GridBudget::default())
            .unwrap()
            .psi;
        let pair = duality_pair(&e, &psi, GridBudget::default()).unwrap();
        let expect = e.l1_coefficients() / 16.0;
        assert!((pair - expect).abs() < 1e-12 * expect.max(1.0));
        let sup = sup_norm(&e.to_grid(GridBudget::default()).unwrap());
        assert!(sup >= expect * (1.0 - 1e-12));
        // coarse-only expansions are orthogonal to Ψ − 1 but not to 1; the
        // zero-mean coarse part pairs to 0
        let mut coarse = HaarExpansion::with_coarse(2, n).unwrap();
        coarse.insert(&ShapeVector::new(vec![1, 1]), &[0, 1], 1.0).unwrap();
        assert!(duality_pair(&coarse, &psi, GridBudget::default()).unwrap().abs() < 1e-15);
        let wrong = GridFunction::zeros(vec![n, n]).unwrap();
        assert!(matches!(
            duality_pair(&e, &wrong, GridBudget::default()),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn riesz_product_closure() {
        // Ψ − 1 − Σ f_j has no Haar component on rectangles with |R| ≥ 2^{-n};
        // Ψ's coefficients at |R| = 2^{-n} are the factor signs times |R|.
        let n = 3;
        let factors = rfunction_family(&riesz_shapes(n, FactorRange::SkipFirst), SignModel::Random { seed: 8 }).unwrap();
        let psi = riesz_talagrand(n, &factors, GridBudget::default()).unwrap().psi;
        for shape in ShapeVector::with_order_at_most(n, 2) {
            let coeffs = project_shape(&psi, &shape).unwrap();
            let factor = factors.iter().find(|f| f.shape() == &shape);
            for (i, c) in coeffs.iter().enumerate() {
                let expect = factor.map_or(0.0, |f| f.signs()[i] as f64 * (-(n as f64)).exp2());
                assert!((c - expect).abs() < 1e-15, "{shape:?} {i}");
            }
        }
    }

    #[test]
    fn halasz_edge_cases() {
        let field = DiscrepancyField::new(van_der_corput(3).unwrap());
        let (phi, r) = riesz_halasz(&field, 0.0, 4, FactorRange::AllShapes, GridBudget::default()).unwrap();
        assert!(phi.values().iter().all(|&v| v == 0.0));
        assert_eq!((r.pairing, r.lower_bound), (0.0, 0.0));

        let (_, r) = riesz_halasz(&field, 0.1, 4, FactorRange::AllShapes, GridBudget::default()).unwrap();
        assert!(r.mean.abs() < 1e-15);
        assert!(r.sup <= r.sup_bound + 1e-12);

        // a single factor: Φ = γ f
        let (_, r) = riesz_halasz(&field, 0.3, 1, FactorRange::SkipFirst, GridBudget::default()).unwrap();
        assert_eq!(r.factors, 1);
        assert!(r.remainder.abs() < 1e-14);
        assert!(riesz_halasz(&field, 1.5, 4, FactorRange::AllShapes, GridBudget::default()).is_err());
    }

    #[test]
    fn sine_first_order() {
        let field = DiscrepancyField::new(van_der_corput(4).unwrap());
        let r = halasz_sine(&field, 1e-4, 5, GridBudget::default()).unwrap();
        assert!((r.pairing / r.linear - 1.0).abs() < 1e-6);
        assert!(halasz_sine(&field, 1.0, 5, GridBudget::default()).is_err());
    }

    #[test]
    fn beck_pairs_small_case() {
        let (g, r) = beck_gain_sum(1, 3, SignModel::Constant(1), &[2.0], GridBudget::default()).unwrap();
        assert_eq!(r.tuples, 2);
        // 2 f_{(0,1,0)} f_{(0,0,1)}
        let shapes = [ShapeVector::new(vec![0, 1, 0]), ShapeVector::new(vec![0, 0, 1])];
        let f = rfunction_family(&shapes, SignModel::Constant(1)).unwrap();
        let a = f[0].to_grid(&[2, 2, 2], GridBudget::default()).unwrap();
        let b = f[1].to_grid(&[2, 2, 2], GridBudget::default()).unwrap();
        let expect = a.mul(&b).unwrap().scale(2.0).unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn pattern_consistency() {
        for model in [SignModel::Constant(1), SignModel::Random { seed: 2 }] {
            let (a, ra) = beck_gain_sum(3, 3, model, &[2.0], GridBudget::default()).unwrap();
            let (b, rb) =
                coincidence_pattern_sum(3, 3, &Pattern::beck(), model, &[2.0], GridBudget::default()).unwrap();
            assert_eq!(ra.tuples, rb.tuples);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn free_parameter_counts() {
        assert_eq!(Pattern::beck().free_parameters(3).unwrap(), 3);
        assert_eq!(Pattern::new(2, vec![]).unwrap().free_parameters(3).unwrap(), 4);
        let p = Pattern::new(3, vec![(0, vec![0, 1])]).unwrap();
        assert_eq!(p.free_parameters(3).unwrap(), 5);
        let all = Pattern::new(3, vec![(0, vec![0, 1, 2]), (1, vec![0, 1, 2])]).unwrap();
        assert_eq!(all.free_parameters(3).unwrap(), 2);
        assert!(Pattern::new(2, vec![(0, vec![0, 2])]).is_err());
    }
}
