//! Small-x behaviour of `y_beta`: `y ~ x^{1/(beta-1)} z(t)` with
//! `t = x^{beta/(beta-1)}`, the truncated expansions of `z`, and the scaled
//! function `z(t)` itself.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::{inverse_x, lower_bound};
use crate::params::LambertParams;

/// First three coefficients of `z(t) = 1 + z1 t + z2 t^2 + z3 t^3 + ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionCoeffs {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
}

impl ExpansionCoeffs {
    pub fn new(params: &LambertParams) -> Self {
        let b = params.beta();
        let d = b - 1.0;
        ExpansionCoeffs {
            z1: -1.0 / (2.0 * d),
            z2: (b + 8.0) / (24.0 * d * d),
            z3: -(b + 3.0) / (12.0 * d * d * d),
        }
    }

    /// `1 + z1 t + z2 t^2 + z3 t^3`.
    pub fn truncated(&self, t: f64) -> f64 {
        1.0 + t * (self.z1 + t * (self.z2 + t * self.z3))
    }
}

/// An approximation together with its expansion variable.
///
/// `in_regime` is false once `t > 1`, where the truncated series carries no
/// asymptotic meaning, or when the value overflowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub t: f64,
    pub in_regime: bool,
}

fn scale_and_t(x: f64, params: &LambertParams) -> (f64, f64) {
    let lx = x.ln();
    (
        (params.lower_exponent() * lx).exp(),
        (params.expansion_exponent() * lx).exp(),
    )
}

fn finish(value: f64, t: f64) -> Approx {
    if value.is_finite() {
        Approx {
            value,
            t,
            in_regime: t <= 1.0,
        }
    } else {
        Approx {
            value: f64::INFINITY,
            t,
            in_regime: false,
        }
    }
}

/// `x^{1/(beta-1)} / (1 + t / (2 (beta - 1)))`. Returns 0 for `x <= 0`.
pub fn approx_first(x: f64, params: &LambertParams) -> Approx {
    if !(x > 0.0) {
        return Approx {
            value: 0.0,
            t: 0.0,
            in_regime: true,
        };
    }
    let (s, t) = scale_and_t(x, params);
    finish(s / (1.0 + t / (2.0 * (params.beta() - 1.0))), t)
}

/// `x^{1/(beta-1)} (1 + z1 t + z2 t^2 + z3 t^3)`. Returns 0 for `x <= 0`.
pub fn approx_second(x: f64, params: &LambertParams) -> Approx {
    if !(x > 0.0) {
        return Approx {
            value: 0.0,
            t: 0.0,
            in_regime: true,
        };
    }
    let (s, t) = scale_and_t(x, params);
    finish(s * ExpansionCoeffs::new(params).truncated(t), t)
}

/// `(1 - e^{-u}) / u`, with `phi(0) = 1`.
pub fn phi(u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::domain(format!("phi needs u >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(1.0);
    }
    Ok(-(-u).exp_m1() / u)
}

/// Solves `z^{beta-1} = phi(t z)` for `z` in `(0, 1]` by bisection.
pub fn z_of_t(t: f64, params: &LambertParams, tol: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!(
            "z_of_t needs finite t >= 0, got {t}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let d = params.beta() - 1.0;
    let h = |z: f64| (d * z.ln()).exp() - (-(-t * z).exp_m1() / (t * z));
    let (mut lo, mut hi) = (1e-12, 1.0);
    let (h_lo, h_hi) = (h(lo), h(hi));
    if h_hi.abs() <= tol {
        return Ok(hi);
    }
    if !(h_lo < 0.0 && h_hi > 0.0) {
        return Err(Error::ToleranceNotReached {
            best: hi,
            estimate: h_hi.abs(),
            tol,
        });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid);
        if hm.abs() <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            return Err(Error::ToleranceNotReached {
                best: mid,
                estimate: hm.abs(),
                tol,
            });
        }
        if hm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Distances of the two approximations and of the lower bound from the
/// exact value at `x = x_beta(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxDistance {
    pub y: f64,
    pub x: f64,
    pub first: f64,
    pub second: f64,
    pub lower: f64,
    pub d1: f64,
    pub d2: f64,
    pub d_lower: f64,
    pub in_regime: bool,
}

impl ApproxDistance {
    pub fn log_d1(&self) -> f64 {
        self.d1.ln()
    }
    pub fn log_d2(&self) -> f64 {
        self.d2.ln()
    }
    pub fn log_d_lower(&self) -> f64 {
        self.d_lower.ln()
    }
}

pub fn approx_distances(params: &LambertParams, y_grid: &[f64]) -> Result<Vec<ApproxDistance>> {
    y_grid
        .iter()
        .map(|&y| {
            if !(y > 0.0 && y < 1.0) {
                return Err(Error::domain(format!(
                    "grid values must lie in (0, 1), got {y}"
                )));
            }
            let x = inverse_x(y, params)?;
            let a1 = approx_first(x, params);
            let a2 = approx_second(x, params);
            let lower = lower_bound(x, params)?;
            Ok(ApproxDistance {
                y,
                x,
                first: a1.value,
                second: a2.value,
                lower,
                d1: (a1.value - y).abs(),
                d2: (a2.value - y).abs(),
                d_lower: (lower - y).abs(),
                in_regime: a1.in_regime && a2.in_regime,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambert::{eval_y, EvalOptions};

    fn p(beta: f64) -> LambertParams {
        LambertParams::new(beta).unwrap()
    }

    #[test]
    fn coefficients_beta_one_quarter() {
        let c = ExpansionCoeffs::new(&p(1.25));
        assert!((c.z1 + 2.0).abs() < 1e-15);
        assert!((c.z2 - 9.25 / 1.5).abs() < 1e-13);
        assert!((c.z3 + 4.25 / 0.1875).abs() < 1e-12);
        for b in [1.01, 1.5, 3.0, 10.0] {
            let c = ExpansionCoeffs::new(&p(b));
            assert!(c.z1 < 0.0 && c.z2 > 0.0 && c.z3 < 0.0);
        }
    }

    #[test]
    fn coefficients_match_recursion() {
        // substitute z = 1 + a t + b t^2 + c t^3 into z^{beta-1} = phi(t z)
        // and verify the residual vanishes to O(t^4)
        let params = p(1.7);
        let c = ExpansionCoeffs::new(&params);
        for &t in &[1e-2, 5e-3, 2.5e-3] {
            let z = c.truncated(t);
            let r = z.powf(0.7) - phi(t * z).unwrap();
            assert!(r.abs() < 50.0 * t.powi(4), "t {t}: {r}");
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0).unwrap(), 1.0);
        assert!((phi(1.0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
        let u = 1e-12;
        assert!((phi(u).unwrap() - (1.0 - u / 2.0 + u * u / 6.0)).abs() < 1e-15);
        assert!(phi(-1.0).is_err());
        for k in 1..200 {
            let u = 0.1 * k as f64;
            let v = phi(u).unwrap();
            assert!(1.0 / (1.0 + u) < v && v < 1.0);
        }
    }

    #[test]
    fn approximations_near_zero() {
        let params = p(1.25);
        // at x = 1e-4 both agree with y to rounding (t = 1e-20)
        let x = 1e-4;
        let y = eval_y(x, &params, &EvalOptions::default()).unwrap().value;
        let a1 = approx_first(x, &params);
        let a2 = approx_second(x, &params);
        assert!(a1.in_regime && a2.in_regime);
        assert!((a2.value - y).abs() <= (a1.value - y).abs().max(4.0 * f64::EPSILON * y));
        assert!((a1.value / y - 1.0).abs() < 1e-10);
        let x = 0.3;
        let y = eval_y(x, &params, &EvalOptions::default()).unwrap().value;
        let d1 = (approx_first(x, &params).value - y).abs();
        let d2 = (approx_second(x, &params).value - y).abs();
        assert!(d2 < 1e-3 * d1, "{d1} {d2}");
        assert_eq!(approx_first(0.0, &params).value, 0.0);
    }

    #[test]
    fn overflow_is_flagged() {
        let params = p(1.01);
        let a = approx_second(1e10, &params);
        assert!(!a.in_regime);
        let a = approx_first(1e10, &params);
        assert!(!a.in_regime);
    }

    #[test]
    fn z_of_t_properties() {
        for b in [1.1, 1.15, 1.3] {
            let params = p(b);
            assert_eq!(z_of_t(0.0, &params, 1e-14).unwrap(), 1.0);
            let mut prev = 1.0;
            for k in 1..=100 {
                let z = z_of_t(0.5 * k as f64, &params, 1e-14).unwrap();
                assert!(z < prev && z > 0.0);
                prev = z;
            }
        }
        let params = p(1.1);
        let c = ExpansionCoeffs::new(&params);
        let t = 1e-4;
        let z = z_of_t(t, &params, 1e-15).unwrap();
        assert!((z - (1.0 + c.z1 * t)).abs() < 10.0 * c.z2 * t * t);
    }

    #[test]
    fn z_of_t_change_of_variables() {
        let params = p(1.3);
        for &x in &[1e-3, 0.05, 0.3, 1.0] {
            let y = eval_y(x, &params, &EvalOptions::default()).unwrap().value;
            let t = x.powf(params.expansion_exponent());
            let z = z_of_t(t, &params, 1e-14).unwrap();
            assert!((z * x.powf(params.lower_exponent()) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn distances_single_point() {
        let d = approx_distances(&p(1.25), &[0.075]).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].d1 >= 0.0 && d[0].d2 >= 0.0 && d[0].d_lower >= 0.0);
        assert!(approx_distances(&p(1.25), &[0.0]).is_err());
    }
}
