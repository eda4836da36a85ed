use crate::error::{Error, Result};
use crate::params::LambertParams;

/// `F(x) = e^{-lambda x} - 1 + x^beta` on `[0, 1]`.
///
/// Its root in `(0, 1)` is `y_beta(lambda)`.
pub fn extinction_function(x: f64, lambda: f64, params: &LambertParams) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "F is defined on [0, 1], got x = {x}"
        )));
    }
    Ok((-lambda * x).exp_m1() + x.powf(params.beta()))
}

const SCAN_STEPS: i32 = 60;

/// Root of [`extinction_function`] by bisection.
///
/// The bracket is the first sign change along `1, 1/2, 1/4, ..., 2^-60`.
/// When `beta` is close to 1 the root sits below what the scan (or `f64`)
/// can resolve and [`Error::BracketNotFound`] is returned.
pub fn bisection_root(lambda: f64, params: &LambertParams, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tol must be positive, got {tol}")));
    }
    let f = |x: f64| extinction_function(x, lambda, params);
    let mut hi = 1.0;
    let mut f_hi = f(hi)?;
    let mut lo = None;
    for j in 1..=SCAN_STEPS {
        let a = 0.5f64.powi(j);
        let fa = f(a)?;
        if fa < 0.0 && f_hi > 0.0 {
            lo = Some(a);
            break;
        }
        hi = a;
        f_hi = fa;
    }
    let mut lo = lo.ok_or(Error::BracketNotFound {
        lambda,
        beta: params.beta(),
    })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambert::{eval_y, EvalOptions};

    #[test]
    fn f_endpoints() {
        let params = LambertParams::from_alpha(0.9).unwrap();
        assert_eq!(extinction_function(0.0, 1.2, &params).unwrap(), 0.0);
        let f1 = extinction_function(1.0, 1.2, &params).unwrap();
        assert!((f1 - (-1.2f64).exp()).abs() < 1e-15);
        assert!(extinction_function(0.5, 0.0, &params).is_err());
        assert!(extinction_function(1.5, 1.0, &params).is_err());
    }

    #[test]
    fn f_vanishes_at_reference_root() {
        let params = LambertParams::from_alpha(0.9).unwrap();
        let x0 = 0.46671;
        let h = 1e-6;
        let df = (extinction_function(x0 + h, 1.2, &params).unwrap()
            - extinction_function(x0 - h, 1.2, &params).unwrap())
            / (2.0 * h);
        assert!(extinction_function(x0, 1.2, &params).unwrap().abs() <= 5e-5 * df.abs());
    }

    #[test]
    fn bisection_matches_iteration() {
        let params = LambertParams::new(2.0).unwrap();
        let r = bisection_root(2.0, &params, 1e-10).unwrap();
        let y = eval_y(2.0, &params, &EvalOptions::default()).unwrap().value;
        assert!((r - y).abs() < 1e-8);

        let params = LambertParams::from_alpha(0.9).unwrap();
        let r = bisection_root(1.2, &params, 1e-8).unwrap();
        assert!((r - 0.46671).abs() < 1e-4);
    }

    #[test]
    fn beta_near_one_root_or_report() {
        let params = LambertParams::new(1.05).unwrap();
        match bisection_root(1.2, &params, 1e-8) {
            Ok(r) => {
                let y = eval_y(1.2, &params, &EvalOptions::default()).unwrap().value;
                assert!((r - y).abs() < 1e-6);
            }
            Err(e) => assert!(matches!(e, Error::BracketNotFound { .. })),
        }
        // root ~ 0.5^1000, far below the 2^-60 scan floor
        let params = LambertParams::new(1.001).unwrap();
        assert!(matches!(
            bisection_root(0.5, &params, 1e-8),
            Err(Error::BracketNotFound { .. })
        ));
    }
}
