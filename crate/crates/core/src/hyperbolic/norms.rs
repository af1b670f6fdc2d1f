//! Norms of grid functions: L^p, sup, and Orlicz.

use serde::{Deserialize, Serialize};

use crate::grid::{pairwise_sum, pairwise_sum_by, GridBudget, GridFunction};
use crate::hyperbolic::HaarExpansion;
use crate::{Error, Result};

/// Default relative tolerance of the Orlicz root search.
pub const DEFAULT_ORLICZ_TOL: f64 = 1e-10;

/// `(2^-Σm Σ_c |g_c|^p)^{1/p}`.
pub fn lp_norm(g: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("L^p exponent must be finite and ≥ 1, got {p}")));
    }
    let values = g.values();
    // Scale by the sup so that large p cannot overflow.
    let sup = sup_norm(g);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let sum = if p == 1.0 {
        pairwise_sum_by(values.len(), &|i| values[i].abs())
    } else if p == 2.0 {
        pairwise_sum_by(values.len(), &|i| values[i] * values[i])
    } else {
        pairwise_sum_by(values.len(), &|i| (values[i].abs() / sup).powf(p))
    };
    let mean = sum * g.cell_volume();
    Ok(if p == 1.0 {
        mean
    } else if p == 2.0 {
        mean.sqrt()
    } else {
        sup * mean.powf(1.0 / p)
    })
}

/// `max_c |g_c|`.
pub fn sup_norm(g: &GridFunction) -> f64 {
    g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Generating function of an Orlicz space.
///
/// * `Power { p }`: `ψ(t) = t^p`, `p ≥ 1`.
/// * `Exp { alpha }`: `ψ(t) = e^{t^α} − 1`. For `α < 1` this is not convex
///   near the origin; it is replaced by its greatest convex minorant, which
///   is linear on `[0, t*]` (tangent through the origin) and agrees with
///   `e^{t^α} − 1` beyond `t*`.
/// * `LLogL { beta }`: `ψ(t) = t · ln^β(e + t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrliczSpec {
    Power { p: f64 },
    Exp { alpha: f64 },
    LLogL { beta: f64 },
}

impl OrliczSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Power { p } => p >= 1.0 && p.is_finite(),
            Self::Exp { alpha } => alpha > 0.0 && alpha.is_finite(),
            Self::LLogL { beta } => beta > 0.0 && beta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid Orlicz parameters {self:?}")))
        }
    }

    /// Tangency point `t*` of the convex minorant for `exp(L^α)`, `α < 1`:
    /// the root of `t ψ'(t) = ψ(t)`, i.e. with `u = t^α`, `α u = 1 − e^{−u}`.
    fn exp_tangent_point(alpha: f64) -> f64 {
        let g = |u: f64| alpha * u - (-u).exp_m1().abs();
        let (mut lo, mut hi) = (1e-12f64, 1.0f64);
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).powf(1.0 / alpha)
    }

    pub fn psi(&self, t: f64) -> f64 {
        Generator::new(*self).eval(t)
    }

    /// `ψ⁻¹(1)`.
    pub fn psi_inverse_one(&self) -> f64 {
        match *self {
            Self::Power { .. } => 1.0,
            Self::Exp { alpha } if alpha >= 1.0 => std::f64::consts::LN_2.powf(1.0 / alpha),
            _ => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                while self.psi(hi) < 1.0 {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.psi(mid) < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// `ψ` with the convex-minorant tangent precomputed.
#[derive(Clone, Copy, Debug)]
struct Generator {
    spec: OrliczSpec,
    t_star: f64,
    slope: f64,
}

impl Generator {
    fn new(spec: OrliczSpec) -> Self {
        let (t_star, slope) = match spec {
            OrliczSpec::Exp { alpha } if alpha < 1.0 => {
                let t = OrliczSpec::exp_tangent_point(alpha);
                (t, t.powf(alpha).exp_m1() / t)
            }
            _ => (0.0, 0.0),
        };
        Self { spec, t_star, slope }
    }

    fn eval(&self, t: f64) -> f64 {
        match self.spec {
            OrliczSpec::Power { p } => {
                if p == 2.0 {
                    t * t
                } else {
                    t.powf(p)
                }
            }
            OrliczSpec::Exp { alpha } => {
                if t < self.t_star {
                    t * self.slope
                } else if alpha == 2.0 {
                    (t * t).exp_m1()
                } else {
                    t.powf(alpha).exp_m1()
                }
            }
            OrliczSpec::LLogL { beta } => t * (std::f64::consts::E + t).ln().powf(beta),
        }
    }
}

/// Orlicz norm of a grid function: `inf{K > 0 : ∫ψ(|g|/K) ≤ 1}`.
pub fn orlicz_norm(g: &GridFunction, spec: OrliczSpec, tol: f64) -> Result<f64> {
    orlicz_norm_uniform(g.values(), spec, tol)
}

/// Orlicz norm of equally weighted samples (each of mass `1/len`).
pub fn orlicz_norm_uniform(values: &[f64], spec: OrliczSpec, tol: f64) -> Result<f64> {
    let w = 1.0 / values.len().max(1) as f64;
    orlicz_search(values, &|_| w, spec, tol)
}

/// Orlicz norm of a step function given as values with cell weights
/// (weights summing to the measure of the cube, 1).
///
/// The root is bracketed starting from `K ∈ [s·2^-20, s·2^20]` with
/// `s = max|g|/ψ⁻¹(1)`, expanded geometrically when needed, and narrowed by
/// an Illinois-accelerated bisection in `log K` until the bracket is within
/// relative `tol`.
pub fn orlicz_norm_weighted(
    values: &[f64],
    weights: &[f64],
    spec: OrliczSpec,
    tol: f64,
) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::InvalidInput("values and weights differ in length".into()));
    }
    orlicz_search(values, &|i| weights[i], spec, tol)
}

fn orlicz_search(
    values: &[f64],
    weight: &(impl Fn(usize) -> f64 + Sync),
    spec: OrliczSpec,
    tol: f64,
) -> Result<f64> {
    spec.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let sup = abs.iter().copied().fold(0.0f64, f64::max);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let psi = Generator::new(spec);
    // F(ln K) = ∫ψ(|g|/K) − 1, decreasing in K.
    let excess = |log_k: f64| {
        let inv = (-log_k).exp();
        pairwise_sum_by(abs.len(), &|i| weight(i) * psi.eval(abs[i] * inv)) - 1.0
    };
    let scale = (sup / spec.psi_inverse_one()).ln();
    let spread = 20.0 * std::f64::consts::LN_2;
    let mut hi = scale + spread;
    let mut f_hi = excess(hi);
    while f_hi > 0.0 {
        hi += spread;
        f_hi = excess(hi);
    }
    let mut lo = scale - spread;
    let mut f_lo = excess(lo);
    while f_lo <= 0.0 {
        if lo < -700.0 {
            return Ok(lo.exp());
        }
        lo -= spread;
        f_lo = excess(lo);
    }
    let tol_log = tol.ln_1p();
    let mut side = 0i8;
    let mut iterations = 0;
    while hi - lo > tol_log {
        iterations += 1;
        let width = hi - lo;
        let secant = f_lo.is_finite() && f_hi.is_finite() && iterations % 4 != 0;
        let mid = if secant {
            // Keep away from the endpoints so the bracket always shrinks.
            let guard = 0.05 * width;
            ((lo * f_hi - hi * f_lo) / (f_hi - f_lo)).clamp(lo + guard, hi - guard)
        } else {
            0.5 * (lo + hi)
        };
        let f_mid = excess(mid);
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if iterations > 2000 {
            break;
        }
    }
    Ok(hi.exp())
}

/// `max_p p^{-1/α} ‖g‖_p` over the geometric ladder `p_i = pmax^{i/steps}`
/// (`p_0 = 1` stands for the limit `p → 1⁺`); comparable to the
/// `exp(L^α)` norm up to constants depending only on `α`.
pub fn orlicz_exp_via_lp(g: &GridFunction, alpha: f64, pmax: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(pmax >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need α > 0 and pmax ≥ 1, got α={alpha}, pmax={pmax}"
        )));
    }
    let steps = ((pmax.log2() * 8.0).ceil() as usize).max(1);
    let mut best = 0.0f64;
    for i in 0..=steps {
        let p = pmax.powf(i as f64 / steps as f64);
        best = best.max(p.powf(-1.0 / alpha) * lp_norm(g, p)?);
    }
    Ok(best)
}

/// One row of [`lp_growth_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub p: f64,
    pub norm: f64,
    /// `‖F‖_p / (p^{(d−1)/2} n^{(d−1)/2})`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub max_ratio: f64,
}

/// Exact L^p norms of an expansion along a ladder of exponents, normalized by
/// the predicted growth `p^{(d−1)/2} n^{(d−1)/2}` (with `n` floored at 1).
pub fn lp_growth_probe(e: &HaarExpansion, ladder: &[f64], budget: GridBudget) -> Result<GrowthTable> {
    let g = e.to_grid(budget)?;
    let half = (e.dim() as f64 - 1.0) / 2.0;
    let n = (e.scale() as f64).max(1.0);
    let rows = ladder
        .iter()
        .map(|&p| {
            let norm = lp_norm(&g, p)?;
            Ok(GrowthRow {
                p,
                norm,
                ratio: norm / (p.powf(half) * n.powf(half)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(GrowthTable { rows, max_ratio })
}

/// Integral of `ψ(|g|/K)`, exposed for diagnostics.
pub fn orlicz_modular(g: &GridFunction, spec: OrliczSpec, k: f64) -> f64 {
    let psi = Generator::new(spec);
    let v: Vec<f64> = g.values().iter().map(|x| psi.eval(x.abs() / k)).collect();
    pairwise_sum(&v) * g.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn constant_function_norms() {
        let g = GridFunction::constant(vec![2, 1], -3.0).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!(rel(lp_norm(&g, p).unwrap(), 3.0) < 1e-14);
        }
        assert_eq!(sup_norm(&g), 3.0);
        assert!(lp_norm(&g, 0.5).is_err());
    }

    #[test]
    fn zero_grid() {
        let g = GridFunction::zeros(vec![3]).unwrap();
        assert_eq!(sup_norm(&g), 0.0);
        assert_eq!(lp_norm(&g, 3.0).unwrap(), 0.0);
        assert_eq!(orlicz_norm(&g, OrliczSpec::Exp { alpha: 2.0 }, 1e-10).unwrap(), 0.0);
        assert_eq!(orlicz_exp_via_lp(&g, 2.0, 64.0).unwrap(), 0.0);
    }

    #[test]
    fn orlicz_of_unit_function() {
        let g = GridFunction::constant(vec![2], 1.0).unwrap();
        let k = orlicz_norm(&g, OrliczSpec::Exp { alpha: 2.0 }, 1e-12).unwrap();
        assert!(rel(k, 1.0 / std::f64::consts::LN_2.sqrt()) < 1e-11);
        assert!((k - 1.20112).abs() < 1e-5);
        for p in [1.0, 2.0, 5.0] {
            let k = orlicz_norm(&g, OrliczSpec::Power { p }, 1e-12).unwrap();
            assert!(rel(k, 1.0) < 1e-11);
        }
        let checker = GridFunction::new(vec![1, 1], vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let one = GridFunction::constant(vec![1, 1], 1.0).unwrap();
        for spec in [
            OrliczSpec::Exp { alpha: 0.5 },
            OrliczSpec::LLogL { beta: 1.5 },
            OrliczSpec::Power { p: 3.0 },
        ] {
            let a = orlicz_norm(&checker, spec, 1e-12).unwrap();
            let b = orlicz_norm(&one, spec, 1e-12).unwrap();
            assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn power_spec_matches_lp() {
        let values: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.3).collect();
        let g = GridFunction::new(vec![3, 3], values).unwrap();
        for p in [1.0, 1.7, 2.0, 4.0, 9.0] {
            let a = orlicz_norm(&g, OrliczSpec::Power { p }, 1e-12).unwrap();
            assert!(rel(a, lp_norm(&g, p).unwrap()) < 1e-9, "p={p}");
        }
    }

    #[test]
    fn generators_are_convex_increasing() {
        for spec in [
            OrliczSpec::Exp { alpha: 0.4 },
            OrliczSpec::Exp { alpha: 0.9 },
            OrliczSpec::Exp { alpha: 2.0 },
            OrliczSpec::LLogL { beta: 0.5 },
            OrliczSpec::LLogL { beta: 3.0 },
        ] {
            assert_eq!(spec.psi(0.0), 0.0);
            let h = 1e-3;
            let mut prev_slope = -1.0;
            for i in 0..5000 {
                let t = i as f64 * h;
                let slope = (spec.psi(t + h) - spec.psi(t)) / h;
                assert!(slope > 0.0);
                assert!(slope >= prev_slope - 1e-9 * slope.abs(), "{spec:?} at t={t}");
                prev_slope = slope;
            }
            assert!((spec.psi(spec.psi_inverse_one()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn minorant_agrees_at_large_argument() {
        let spec = OrliczSpec::Exp { alpha: 0.5 };
        let t = 50.0f64;
        assert!(rel(spec.psi(t), t.sqrt().exp_m1()) < 1e-15);
    }

    #[test]
    fn exp_norm_via_lp_of_constant() {
        let g = GridFunction::constant(vec![1], 1.0).unwrap();
        assert!(rel(orlicz_exp_via_lp(&g, 2.0, 64.0).unwrap(), 1.0) < 1e-15);
    }

    #[test]
    fn tiny_support_expands_bracket() {
        let mut values = vec![0.0; 1 << 20];
        values[0] = 1.0;
        let g = GridFunction::new(vec![20], values).unwrap();
        let k = orlicz_norm(&g, OrliczSpec::Power { p: 1.0 }, 1e-10).unwrap();
        assert!(rel(k, (2.0f64).powi(-20)) < 1e-9);
    }
}
