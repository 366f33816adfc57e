//! Certified counting of short slopes on cusp tori.
//!
//! The crate is layered: [`precise`] and [`quad`] supply interval and exact
//! arithmetic, [`lattice`] reduces and normalizes cusp lattices, [`counting`]
//! evaluates the extremal count `N(g, d)`, and [`bounds`] and [`seifert`]
//! turn those counts into bounds on slope lengths, intersection numbers and
//! boundary curves.

pub mod bounds;
pub mod counting;
pub mod decimal;
pub mod error;
pub mod lattice;
pub mod precise;
pub mod quad;
pub mod seifert;
pub mod threshold;

pub use bounds::{
    intersection_bound, intersection_number, length_bound, short_slopes, slope_count_bound,
    slope_length, total_length_check, CuspTorus, Slope,
};
pub use counting::{
    breakpoints, coprime_density, count_at, envelope, n_gd, n_gd_oracle, sweep, Breakpoint,
    CountResult, CountSpec, RadiusMode, RawCount,
};
pub use error::Error;
pub use lattice::{
    is_primitive, normalize, normalize_basis, reduce, IntVector, LatticeBasis, NormalizedBasis,
    ReducedBasis, Unimodular,
};
pub use precise::{PreciseReal, Precision};
pub use quad::QuadReal;
pub use seifert::{
    check_euler_relation, check_fiber_sums, solve_slope, BoundarySystem, SeifertPresentation,
};
pub use threshold::{SquaredRadius, Threshold};
