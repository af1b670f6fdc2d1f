//! Exact numerics for irregularities of distribution.
//!
//! Everything here is built on one observation: hyperbolic Haar sums, Riesz
//! products and r-functions are constant on the cells of a dyadic grid, so
//! their norms and inner products can be computed exactly by summing over
//! cells. The discrepancy function itself is piecewise multilinear, and its
//! pairings with grid functions and with Haar functions have closed forms.
//!
//! Module map:
//!
//! * [`dyadic`] and [`grid`]: dyadic intervals, rectangles, Haar evaluation,
//!   the two-dimensional product rule, and [`grid::GridFunction`].
//! * [`hyperbolic`]: hyperbolic Haar expansions, r-functions, and the norm
//!   toolbox (L^p, sup, Orlicz, square functions).
//! * [`points`]: van der Corput sets, digit shifts, random sets, file I/O.
//! * [`discrepancy`]: the discrepancy function with exact star discrepancy,
//!   exact L², exact Haar coefficients and sampled norms.
//! * [`dual`]: Roth's dual function, Riesz products, Halász test functions,
//!   Beck-gain coincidence sums.
//! * [`smallball`]: sign-assignment search for hyperbolic sums.
//! * [`stats`]: least-squares fits used for trend reports.

pub mod discrepancy;
pub mod dual;
pub mod dyadic;
mod error;
pub mod grid;
pub mod hyperbolic;
pub mod points;
pub mod smallball;
pub mod stats;

pub use error::{Error, Result};
