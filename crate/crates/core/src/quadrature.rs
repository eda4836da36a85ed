//! Double-exponential quadrature: tanh-sinh on finite intervals and
//! exp-sinh on half-lines. Integrands receive the distance to the nearby
//! endpoint(s) so that singular factors can be evaluated without
//! cancellation.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MIN_LEVELS: usize = 3;
const MAX_LEVELS: usize = 12;
const H0: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// `|S_k - S_{k-1}|` between the last two step halvings.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Trapezoidal sums of `g` over `[lo, hi]` in `tau`, halving the step until
/// successive sums agree to `rel_tol`.
fn refine(g: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadResult> {
    let mut h = H0;
    let mut evaluations = 0;
    let mut raw = 0.0;
    let k_lo = (lo / h).ceil() as i64;
    let k_hi = (hi / h).floor() as i64;
    for k in k_lo..=k_hi {
        raw += g(k as f64 * h);
        evaluations += 1;
    }
    let mut prev = raw * h;
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVELS {
        h *= 0.5;
        let k_lo = (lo / h).ceil() as i64;
        let k_hi = (hi / h).floor() as i64;
        for k in k_lo..=k_hi {
            if k % 2 != 0 {
                raw += g(k as f64 * h);
                evaluations += 1;
            }
        }
        let cur = raw * h;
        err = (cur - prev).abs();
        if !cur.is_finite() {
            break;
        }
        if level >= MIN_LEVELS && err <= rel_tol * cur.abs() {
            return Ok(QuadResult {
                value: cur,
                error_estimate: err,
                evaluations,
            });
        }
        prev = cur;
    }
    Err(Error::ToleranceNotReached {
        best: prev,
        estimate: err,
        tol: rel_tol,
    })
}

/// `int_a^b f` with `f(x, x - a, b - x)`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "tanh_sinh needs finite a < b, got [{a}, {b}]"
        )));
    }
    let half = 0.5 * (b - a);
    let g = |tau: f64| {
        let u = FRAC_PI_2 * tau.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance to the nearer endpoint: half * (1 - tanh|u|)
        let near = half * 2.0 * e / (1.0 + e);
        let far = 2.0 * half - near;
        let w = half * FRAC_PI_2 * tau.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if near == 0.0 || w == 0.0 {
            return 0.0;
        }
        let v = if u < 0.0 {
            f(a + near, near, far)
        } else {
            f(b - near, far, near)
        };
        w * v
    };
    refine(g, -4.0, 4.0, rel_tol)
}

/// `int_a^inf f` with `f(x, x - a)`. `f` must decay at least exponentially.
pub fn exp_sinh<F>(f: F, a: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    if !a.is_finite() {
        return Err(Error::domain("exp_sinh needs a finite lower limit"));
    }
    let g = |tau: f64| {
        let u = FRAC_PI_2 * tau.sinh();
        let d = u.exp();
        let w = FRAC_PI_2 * tau.cosh() * d;
        if d == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let v = f(a + d, d);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    refine(g, -4.5, 3.5, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_endpoint_singularity() {
        let r = tanh_sinh(|x, _, _| x * x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        // int_0^1 x^{-1/2} = 2
        let r = tanh_sinh(|_, da, _| da.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        // int_0^1 ln(1 - x) = -1, singular at 1
        let r = tanh_sinh(|_, _, db| db.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value + 1.0).abs() < 1e-11);
    }

    #[test]
    fn half_line() {
        let r = exp_sinh(|x, _| (-x).exp(), 0.0, 1e-13).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        // int_0^inf x^5 e^{-x} = 120
        let r = exp_sinh(|x, _| (5.0 * x.ln() - x).exp(), 0.0, 1e-12).unwrap();
        assert!((r.value / 120.0 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn reports_failure() {
        let r = tanh_sinh(|_, da, _| 1.0 / da, 0.0, 1.0, 1e-12);
        assert!(r.is_err());
        assert!(tanh_sinh(|x, _, _| x, 1.0, 0.0, 1e-12).is_err());
    }
}
