use serde::Serialize;

use super::{check_x, EvalResult};
use crate::error::Result;
use crate::numeric::ln_one_minus_exp_neg;
use crate::params::LambertParams;

/// `(1 - e^{-x})^{1/(beta-1)}`.
pub fn lower_bound(x: f64, params: &LambertParams) -> Result<f64> {
    check_x(x)?;
    Ok((params.lower_exponent() * ln_one_minus_exp_neg(x)).exp())
}

/// `(1 - e^{-x})^{1/beta}`.
pub fn upper_bound(x: f64, params: &LambertParams) -> Result<f64> {
    check_x(x)?;
    Ok((params.alpha() * ln_one_minus_exp_neg(x)).exp())
}

/// `upper / lower = (1 + 1/(e^x - 1))^kappa`.
pub fn bound_ratio(x: f64, params: &LambertParams) -> Result<f64> {
    check_x(x)?;
    Ok((params.kappa() * (1.0 / x.exp_m1()).ln_1p()).exp())
}

/// Both bounds at one `x`, together with their distances from 1 so that
/// comparisons stay meaningful once the bounds round to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_gap: f64,
    pub upper_gap: f64,
}

pub fn bracket(x: f64, params: &LambertParams) -> Result<Bracket> {
    check_x(x)?;
    let l = ln_one_minus_exp_neg(x);
    Ok(Bracket {
        x,
        lower: (params.lower_exponent() * l).exp(),
        upper: (params.alpha() * l).exp(),
        lower_gap: -(params.lower_exponent() * l).exp_m1(),
        upper_gap: -(params.alpha() * l).exp_m1(),
    })
}

impl Bracket {
    /// `lower < r.value < upper`, decided on complements near 1.
    ///
    /// The upper side uses `r.upper_gap`, the exact-sign difference
    /// `f(1) - f(y_prev)` recorded by the iteration.
    pub fn strictly_contains(&self, r: &EvalResult) -> bool {
        let above_lower = if r.value < 0.5 {
            r.value > self.lower
        } else {
            r.complement < self.lower_gap
        };
        let below_upper = if r.value < 0.5 {
            r.value < self.upper
        } else {
            r.upper_gap > 0.0
        };
        above_lower && below_upper
    }
}
