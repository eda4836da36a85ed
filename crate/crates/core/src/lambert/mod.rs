//! The generalized Lambert function `y_beta(x)`: the continuous solution in
//! `(0, 1)` of `y^beta = 1 - exp(-x y)`, its inverse `x_beta(y)`, the
//! fixed-point map whose limit defines it, two-sided bounds, a bisection
//! route through the extinction equation, and the piecewise-linear
//! benchmark table.

mod benchmark;
mod bisect;
mod bounds;
mod iterate;

pub use benchmark::{benchmark_eval, build_benchmark_grid, BenchmarkGrid, DEFAULT_GRID_SIZE};
pub use bisect::{bisection_root, extinction_function};
pub use bounds::{bound_ratio, bracket, lower_bound, upper_bound, Bracket};
pub use iterate::{eval_y, EvalOptions, EvalResult, StartStrategy, StopRule};

use crate::error::{Error, Result};
use crate::numeric::{ln_from_split, ln_one_minus_exp_neg};
use crate::params::LambertParams;
use crate::series::SeriesValue;

/// Upper limit on the number of terms [`inverse_x_series`] will add.
pub const SERIES_TERM_CAP: usize = 10_000_000;

/// `x_beta(y) = -ln(1 - y^beta) / y`, with `x_beta(0) = 0`.
pub fn inverse_x(y: f64, params: &LambertParams) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::domain(format!(
            "inverse_x needs 0 <= y < 1, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(inverse_x_split(y, 1.0 - y, params))
}

/// `x_beta(1 - q)` for `0 < q <= 1`. Stays accurate when `y` is so close to
/// one that it is not representable apart from 1.
pub fn inverse_x_complement(q: f64, params: &LambertParams) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!(
            "inverse_x_complement needs 0 < q <= 1, got {q}"
        )));
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    Ok(inverse_x_split(1.0 - q, q, params))
}

pub(crate) fn inverse_x_split(y: f64, q: f64, params: &LambertParams) -> f64 {
    let beta = params.beta();
    let ln_y = ln_from_split(y, q);
    let u = (beta * ln_y).exp();
    let ln_w = if u < 0.5 {
        (-u).ln_1p()
    } else {
        (-(beta * ln_y).exp_m1()).ln()
    };
    -ln_w / y
}

/// Partial sum of `sum_{k>=1} y^(beta k - 1) / k` with a geometric tail bound.
pub fn inverse_x_series(y: f64, params: &LambertParams, tol: f64) -> Result<SeriesValue> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::domain(format!(
            "inverse_x_series needs 0 <= y < 1, got {y}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if y == 0.0 {
        return Ok(SeriesValue::exact(0.0, 0));
    }
    let beta = params.beta();
    let ln_y = y.ln();
    let one_minus_r = -(beta * ln_y).exp_m1();
    let mut sum = crate::numeric::CompensatedSum::new();
    let mut bound = f64::INFINITY;
    for k in 1..=SERIES_TERM_CAP {
        let kf = k as f64;
        sum.add(((beta * kf - 1.0) * ln_y).exp() / kf);
        let next = ((beta * (kf + 1.0) - 1.0) * ln_y).exp() / (kf + 1.0);
        bound = next / one_minus_r;
        if bound <= tol {
            return Ok(SeriesValue {
                value: sum.value(),
                terms_used: k,
                tail_bound: bound,
            });
        }
    }
    Err(Error::ToleranceNotReached {
        best: sum.value(),
        estimate: bound,
        tol,
    })
}

/// `d x_beta / d y` on `(0, 1)`.
///
/// Equals `(beta y^beta / (1 - y^beta) + ln(1 - y^beta)) / y^2`. For small
/// `y^beta` the numerator is summed as `sum_k (beta - 1/k) y^(beta k)` so the
/// leading cancellation never happens; the result then behaves like
/// `(beta - 1) y^(beta - 2)` and diverges at 0 when `beta < 2`.
pub fn inverse_x_derivative(y: f64, params: &LambertParams) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain(format!(
            "inverse_x_derivative needs 0 < y < 1, got {y}"
        )));
    }
    Ok(inverse_derivative_split(y, 1.0 - y, params))
}

pub(crate) fn inverse_derivative_split(y: f64, q: f64, params: &LambertParams) -> f64 {
    let beta = params.beta();
    let ln_y = ln_from_split(y, q);
    let u = (beta * ln_y).exp();
    if u < 0.5 {
        // sum_{k>=1} (beta - 1/k) u^(k-1), scaled by y^(beta-2)
        let mut s = 0.0;
        let mut pow = 1.0;
        let mut k = 1.0;
        loop {
            let term = (beta - 1.0 / k) * pow;
            s += term;
            if term <= 1e-17 * s {
                break;
            }
            pow *= u;
            k += 1.0;
        }
        ((beta - 2.0) * ln_y).exp() * s
    } else {
        let w = -(beta * ln_y).exp_m1();
        (beta * (1.0 - w) / w + w.ln()) / (y * y)
    }
}

/// The map `f(y) = (1 - exp(-x y))^alpha` whose non-trivial fixed point is
/// `y_beta(x)`.
pub fn fixed_point_map(y: f64, x: f64, params: &LambertParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!(
            "fixed_point_map needs 0 <= y <= 1, got {y}"
        )));
    }
    check_x(x)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok((params.alpha() * ln_one_minus_exp_neg(x * y)).exp())
}

/// `g(y) = f'(y) = alpha x (1 - exp(-x y))^(alpha - 1) exp(-x y)`.
pub fn contraction_factor(y: f64, x: f64, params: &LambertParams) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::domain(format!(
            "contraction_factor needs 0 < y <= 1, got {y}"
        )));
    }
    check_x(x)?;
    let alpha = params.alpha();
    let z = x * y;
    Ok(alpha * x * ((alpha - 1.0) * ln_one_minus_exp_neg(z) - z).exp())
}

pub(crate) fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "x must be positive and finite, got {x}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(beta: f64) -> LambertParams {
        LambertParams::new(beta).unwrap()
    }

    #[test]
    fn inverse_x_zero_branch_and_domain() {
        assert_eq!(inverse_x(0.0, &p(2.0)).unwrap(), 0.0);
        assert!(inverse_x(1.0, &p(2.0)).is_err());
        assert!(inverse_x(-0.1, &p(2.0)).is_err());
        assert!(inverse_x(f64::NAN, &p(2.0)).is_err());
    }

    #[test]
    fn inverse_x_half_beta_two() {
        // -ln(0.75) / 0.5
        let expected = 0.575_364_144_903_561_9;
        let got = inverse_x(0.5, &p(2.0)).unwrap();
        assert!((got - expected).abs() < 1e-15, "{got}");
    }

    #[test]
    fn inverse_x_is_increasing_and_unbounded() {
        let params = p(1.3);
        let mut prev = 0.0;
        for k in 1..1000 {
            let x = inverse_x(k as f64 / 1000.0, &params).unwrap();
            assert!(x > prev);
            prev = x;
        }
        assert!(inverse_x(1.0 - 1e-15, &params).unwrap() > 30.0);
    }

    #[test]
    fn complement_route_matches_direct() {
        let params = p(1.7);
        for &y in &[0.5, 0.75, 0.9, 0.999] {
            let a = inverse_x(y, &params).unwrap();
            let b = inverse_x_complement(1.0 - y, &params).unwrap();
            assert!((a - b).abs() <= 1e-14 * a);
        }
        // q far below one ulp of 1: x ~ -ln(beta q)
        let q = 1e-25;
        let x = inverse_x_complement(q, &params).unwrap();
        assert!((x - -(1.7 * q).ln()).abs() < 1e-12);
    }

    #[test]
    fn series_matches_closed_form() {
        let v = inverse_x_series(0.0, &p(3.0), 1e-12).unwrap();
        assert_eq!(v.value, 0.0);
        assert_eq!(v.terms_used, 0);

        let v = inverse_x_series(0.5, &p(2.0), 1e-12).unwrap();
        assert!((v.value - inverse_x(0.5, &p(2.0)).unwrap()).abs() <= 1e-12 + 1e-15);

        let params = p(1.2);
        let v = inverse_x_series(0.9, &params, 1e-10).unwrap();
        let exact = inverse_x(0.9, &params).unwrap();
        assert!((v.value - exact).abs() <= 1e-10, "{} {}", v.value, exact);
        assert!(v.tail_bound <= 1e-10);
    }

    #[test]
    fn series_reports_non_convergence_near_one() {
        let r = inverse_x_series(1.0 - 1e-9, &p(1.01), 1e-15);
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. })));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let params = p(2.0);
        let h = 1e-6;
        let fd = (inverse_x(0.5 + h, &params).unwrap() - inverse_x(0.5 - h, &params).unwrap())
            / (2.0 * h);
        let d = inverse_x_derivative(0.5, &params).unwrap();
        assert!(((d - fd) / d).abs() < 1e-6, "{d} {fd}");
        // both branches of the implementation
        for &y in &[0.05f64, 0.3, 0.7, 0.95] {
            for &beta in &[1.2, 1.5, 3.0] {
                let params = p(beta);
                let h = 1e-6 * y.min(1.0 - y);
                let fd = (inverse_x(y + h, &params).unwrap() - inverse_x(y - h, &params).unwrap())
                    / (2.0 * h);
                let d = inverse_x_derivative(y, &params).unwrap();
                assert!(
                    ((d - fd) / d).abs() < 1e-6,
                    "beta {beta} y {y}: {d} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn derivative_small_y_behaviour() {
        // blows up like 0.5 y^{-1/2} for beta = 1.5
        let params = p(1.5);
        let a = inverse_x_derivative(1e-8, &params).unwrap();
        let b = inverse_x_derivative(1e-12, &params).unwrap();
        assert!(b > a && b > 1e5);
        assert!((a / (0.5 * 1e4) - 1.0).abs() < 1e-3);

        // finite limit for beta = 3: sum_k (3k-1)/k y^{3k-2} -> 2 y
        let params = p(3.0);
        let y: f64 = 1e-3;
        let oracle: f64 = (1..50)
            .map(|k| {
                let k = k as f64;
                (3.0 * k - 1.0) / k * y.powf(3.0 * k - 2.0)
            })
            .sum();
        let d = inverse_x_derivative(y, &params).unwrap();
        assert!(((d - oracle) / oracle).abs() < 1e-13);
        assert!(inverse_x_derivative(0.0, &params).is_err());
    }

    #[test]
    fn fixed_point_map_values() {
        assert_eq!(fixed_point_map(0.0, 5.0, &p(2.0)).unwrap(), 0.0);
        let v = fixed_point_map(1.0, 1.0, &p(2.0)).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp()).sqrt()).abs() < 1e-15);
        assert!((v - 0.795_060_1).abs() < 1e-7);
        assert!(fixed_point_map(1.1, 1.0, &p(2.0)).is_err());
        assert!(fixed_point_map(0.5, 0.0, &p(2.0)).is_err());
        let mut prev = 0.0;
        for k in 1..=100 {
            let v = fixed_point_map(k as f64 / 100.0, 0.7, &p(1.4)).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn contraction_factor_shape() {
        let params = p(2.0);
        assert!(contraction_factor(1e-8, 1.0, &params).unwrap() > 1e3);
        assert!(contraction_factor(0.0, 1.0, &params).is_err());
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let g = contraction_factor(k as f64 / 100.0, 1.0, &params).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }
}
