//! The generalized Lambert function `y_beta(x)`, the unique continuous
//! solution in `(0, 1)` of `y^beta = 1 - exp(-x y)` for `x > 0`, `beta > 1`.
//!
//! Besides evaluation and inversion the crate covers the probability law
//! with distribution function `y_beta`, the series identities for its first
//! two moments, and extinction probabilities of Galton-Watson processes
//! with discrete-stable offspring.
//!
//! ```
//! use genlambert::{eval_y, EvalOptions, LambertParams};
//!
//! let params = LambertParams::new(2.0).unwrap();
//! let r = eval_y(1.0, &params, &EvalOptions::default()).unwrap();
//! assert!((r.value - 0.7145563847430096).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod branching;
pub mod distribution;
pub mod error;
pub mod lambert;
mod numeric;
pub mod params;
pub mod quadrature;
pub mod series;
pub mod study;

pub use error::{Error, Result};
pub use lambert::{
    benchmark_eval, bisection_root, bound_ratio, bracket, build_benchmark_grid, contraction_factor,
    eval_y, extinction_function, fixed_point_map, inverse_x, inverse_x_complement,
    inverse_x_derivative, inverse_x_series, lower_bound, upper_bound, BenchmarkGrid, Bracket,
    EvalOptions, EvalResult, StartStrategy, StopRule,
};
pub use params::LambertParams;
pub use series::SeriesValue;
