//! Functional correlation coefficients for discrete confusion matrices.
//!
//! A confusion matrix `p_ij` is the joint law of two classifiers over `d`
//! ordinal classes. For a pair of category scores `f` (rows) and `g`
//! (columns) the Pearson correlation `C(f, g)` is well defined; the
//! coefficients in this crate are the suprema of `C` over restricted sets of
//! score pairs:
//!
//! | class  | feasible pairs                                   | route                         |
//! |--------|--------------------------------------------------|-------------------------------|
//! | SUP    | all non-degenerate pairs                         | spectral (second singular value) |
//! | II     | `f` and `g` nondecreasing                        | alternating isotonic ascent   |
//! | ID     | `f` nondecreasing, `g` nonincreasing             | II on column-reversed matrix  |
//! | MON    | II or ID                                         | `max(II, ID)`                 |
//! | CO     | comonotone pairs                                 | max of II over joint relabelings |
//! | ANTI   | antimonotone pairs                               | max of ID over joint relabelings |
//! | COANTI | CO or ANTI                                       | `max(CO, ANTI)`               |
//!
//! The crate is `no_std` (with `alloc`). The `std` feature enables
//! `std::error::Error` plumbing for dependencies, and `parallel` runs
//! restarts, relabelings and Monte Carlo chunks on rayon with a
//! deterministic reduction order.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
#![cfg_attr(test, allow(clippy::approx_constant))]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod coefficients;
pub mod comparator;
mod error;
pub mod isotonic;
pub mod kappa;
pub mod matrix;
pub mod mc;
mod par;
pub mod solver;
pub mod valuation;

pub use coefficients::{
    anti_correlation, co_correlation, coanti_correlation, full_profile, mon_correlation,
    CoefficientProfile, KappaSummary,
};
pub use comparator::{compare, compare_profiles, compare_with_order, Outcome, Step, StepValues, Verdict};
pub use error::{Error, Result};
pub use isotonic::{pava, pava_decreasing, IsotonicFit};
pub use kappa::{weight_scheme, weighted_kappa, WeightMatrix, WeightScheme};
pub use matrix::{ClassMap, ConfusionMatrix, ReducedTable, CELL_TOLERANCE};
pub use mc::{mc_estimate, McEstimate, McOptions};
pub use solver::{
    multi_start_generic, optimize_monotone, sup_correlation, CoefficientReport, Direction,
    FeasibleSet, Isotone, Route, SolverOptions, Unrestricted,
};
pub use valuation::{
    correlation, pair_class_check, standardize, StandardizedPair, Valuation, ValuationClass,
    DEGENERACY_THRESHOLD,
};
