//! Extinction of a Galton-Watson process whose offspring law is discrete
//! stable with generating function `P(u) = exp(-lambda (1 - u)^alpha)`.
//!
//! With `x = (1 - u)^alpha` the fixed-point equation `P(u) = u` becomes
//! `x^beta = 1 - e^{-lambda x}`, `beta = 1/alpha`, so the extinction
//! probability is `exp(-lambda y_beta(lambda))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::{eval_y, EvalOptions};
use crate::params::LambertParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchingParams {
    lambda: f64,
    alpha: f64,
}

impl BranchingParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        LambertParams::from_alpha(alpha)?;
        Ok(BranchingParams { lambda, alpha })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambert_params(&self) -> LambertParams {
        LambertParams::from_alpha(self.alpha).expect("validated on construction")
    }
}

/// `exp(-lambda (1 - u)^alpha)` on `[0, 1]`.
pub fn pgf(u: f64, bp: &BranchingParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(format!("pgf needs 0 <= u <= 1, got {u}")));
    }
    Ok((-bp.lambda * (1.0 - u).powf(bp.alpha)).exp())
}

/// `q_0 = 0, q_1, ..., q_n` with `q_{k+1} = P(q_k)`.
pub fn pgf_iterates(bp: &BranchingParams, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut q = 0.0;
    out.push(q);
    for _ in 0..n {
        q = pgf(q, bp).expect("iterates stay in [0, 1]");
        out.push(q);
    }
    out
}

/// Smallest fixed point of the offspring generating function, by iterating
/// from 0 until successive iterates differ by at most `tol`.
pub fn extinction_pgf_iteration(bp: &BranchingParams, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tol must be positive, got {tol}")));
    }
    let mut q = 0.0;
    for _ in 0..max_iter {
        let next = pgf(q, bp)?;
        if (next - q).abs() <= tol {
            return Ok(next);
        }
        q = next;
    }
    Err(Error::MaxIterExceeded {
        iterations: max_iter,
        last_value: q,
        residual: (pgf(q, bp)? - q).abs(),
    })
}

/// `exp(-lambda x0)` with `x0 = y_beta(lambda)`.
///
/// Equal to `1 - x0^beta` at the root; the exponential is used because it
/// keeps full precision when `x0` is tiny.
pub fn extinction_via_lambert(bp: &BranchingParams, tol: f64) -> Result<f64> {
    let opts = EvalOptions {
        eps: tol,
        ..EvalOptions::default()
    };
    let x0 = eval_y(bp.lambda, &bp.lambert_params(), &opts)?.value;
    Ok((-bp.lambda * x0).exp())
}
