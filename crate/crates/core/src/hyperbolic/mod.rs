//! Hyperbolic Haar sums and the norm toolbox.
//!
//! A hyperbolic sum at scale `n` is `Σ α_R h_R` over all dyadic rectangles
//! with `|R| = 2^{-n}`. Such sums are constant on cells of side `2^{-(n+1)}`
//! per axis, which is where [`HaarExpansion::to_grid`] evaluates them.

mod expansion;
mod norms;
mod square;

pub use expansion::{count_rectangles, project_shape, HaarExpansion, RFunction, ShapeCoefficients};
pub use norms::{
    lp_growth_probe, lp_norm, orlicz_exp_via_lp, orlicz_modular, orlicz_norm, orlicz_norm_uniform, orlicz_norm_weighted,
    sup_norm, GrowthRow, GrowthTable, OrliczSpec, DEFAULT_ORLICZ_TOL,
};
pub use square::{square_function, square_function_axis, HaarSeries};
