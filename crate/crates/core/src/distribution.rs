//! The random variable `xi` with distribution function `y_beta`.
//!
//! `xi` has the representation `-ln(1 - U^beta) / U` for uniform `U`, which
//! gives exact sampling and the moment integrals
//! `E[xi^n] = (-1)^n alpha int_0^1 ln^n(1 - t) t^{-(n-1) alpha - 1} dt`.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::{eval_y, inverse_derivative_split, inverse_x, inverse_x_split, EvalOptions};
use crate::params::LambertParams;
use crate::quadrature::{exp_sinh, tanh_sinh, QuadResult};
use crate::series::{tornheim_i, zeta_real};

/// Kolmogorov-Smirnov critical value at the 0.001 level, times `sqrt(N)`.
pub const KS_CRITICAL_0_001: f64 = 1.95;

/// Residual tolerance of the fixed-point stage of [`solve`].
const SOLVE_EPS: f64 = 1e-5;

/// `(y, 1 - y)` at `x`: the fixed-point iteration to a moderate residual,
/// then Newton steps on `x_beta(y) = x`, which bring the error down to
/// rounding.
fn solve(x: f64, params: &LambertParams) -> (f64, f64) {
    let opts = EvalOptions {
        eps: SOLVE_EPS,
        ..EvalOptions::default()
    };
    let (mut y, mut q) = match eval_y(x, params, &opts) {
        Ok(r) => (r.value, r.complement),
        Err(Error::Underflow { .. }) => return (0.0, 1.0),
        Err(Error::MaxIterExceeded { last_value, .. }) => (last_value, 1.0 - last_value),
        Err(_) => return (f64::NAN, f64::NAN),
    };
    for _ in 0..8 {
        if q <= 0.0 || y <= 0.0 {
            break;
        }
        let resid = x - inverse_x_split(y, q, params);
        let step = resid / inverse_derivative_split(y, q, params);
        if !step.is_finite() || step == 0.0 {
            break;
        }
        let (ny, nq) = if y < 0.5 {
            (y + step, 1.0 - (y + step))
        } else {
            (1.0 - (q - step), q - step)
        };
        if !(ny > 0.0 && nq > 0.0) {
            break;
        }
        let new_resid = x - inverse_x_split(ny, nq, params);
        if new_resid.abs() >= resid.abs() {
            break;
        }
        y = ny;
        q = nq;
    }
    (y, q)
}

/// `P(xi <= x)`.
pub fn cdf(x: f64, params: &LambertParams) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    solve(x, params).0
}

/// `P(xi > x)`, accurate when it is tiny.
pub fn sf(x: f64, params: &LambertParams) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    solve(x, params).1
}

/// Density `1 / x_beta'(y_beta(x))`.
pub fn pdf(x: f64, params: &LambertParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("pdf needs x > 0, got {x}")));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let (y, q) = solve(x, params);
    if q <= 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        // below the representable range y ~ x^p, p = 1/(beta - 1)
        let p = params.lower_exponent();
        return Ok(p * ((p - 1.0) * x.ln()).exp());
    }
    Ok(1.0 / inverse_derivative_split(y, q, params))
}

fn open_unit(u: f64, what: &str) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} needs a value in (0, 1), got {u}"
        )))
    }
}

/// Inverse of [`cdf`]: `x_beta(p)`.
pub fn quantile(p: f64, params: &LambertParams) -> Result<f64> {
    open_unit(p, "quantile")?;
    inverse_x(p, params)
}

/// `-ln(1 - u^beta) / u`, the variate produced by a uniform `u`.
pub fn sample(u: f64, params: &LambertParams) -> Result<f64> {
    open_unit(u, "sample")?;
    inverse_x(u, params)
}

/// `count` variates from `ChaCha8Rng::seed_from_u64(seed)`, one open-interval
/// uniform per variate.
pub fn sample_batch(params: &LambertParams, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            inverse_x(u, params).expect("open-interval uniform")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentMethod {
    Quadrature,
    ClosedForm,
    Series,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentResult {
    pub n: u32,
    pub value: f64,
    pub method: MomentMethod,
    pub error_estimate: f64,
}

/// `E[xi^n]` by double-exponential quadrature.
///
/// `[0, 1/2]` is integrated in `t` directly; on `[1/2, 1)` the substitution
/// `t = 1 - e^{-v}` turns the logarithmic endpoint into exponential decay on
/// `[ln 2, inf)`.
pub fn moment_quadrature(n: u32, params: &LambertParams, tol: f64) -> Result<MomentResult> {
    if n == 0 {
        return Err(Error::domain("moment order must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let nf = n as f64;
    let p = (nf - 1.0) * params.alpha() + 1.0;
    let left = tanh_sinh(
        |_, t, _| (nf * (-(-t).ln_1p()).ln() - p * t.ln()).exp(),
        0.0,
        0.5,
        tol,
    )?;
    let right = exp_sinh(
        |v, _| (nf * v.ln() - v - p * (-(-v).exp_m1()).ln()).exp(),
        std::f64::consts::LN_2,
        tol,
    )?;
    finish_moment(n, params, left, right, tol)
}

fn finish_moment(
    n: u32,
    params: &LambertParams,
    left: QuadResult,
    right: QuadResult,
    tol: f64,
) -> Result<MomentResult> {
    let value = params.alpha() * (left.value + right.value);
    let error_estimate = params.alpha() * (left.error_estimate + right.error_estimate);
    if !(value > 0.0) || error_estimate > tol * value {
        return Err(Error::ToleranceNotReached {
            best: value,
            estimate: error_estimate,
            tol,
        });
    }
    Ok(MomentResult {
        n,
        value,
        method: MomentMethod::Quadrature,
        error_estimate,
    })
}

/// `E[xi] = zeta(2) / beta = pi^2 / (6 beta)`.
pub fn mean_exact(params: &LambertParams) -> f64 {
    PI * PI / 6.0 * params.alpha()
}

/// Closed form; available for `n = 1` only.
pub fn moment_closed_form(n: u32, params: &LambertParams) -> Result<MomentResult> {
    if n != 1 {
        return Err(Error::domain(format!(
            "no closed form for moment order {n}; only n = 1"
        )));
    }
    Ok(MomentResult {
        n,
        value: mean_exact(params),
        method: MomentMethod::ClosedForm,
        error_estimate: 0.0,
    })
}

/// Series route: `zeta(2) alpha` for `n = 1`, `alpha I(alpha)` for `n = 2`.
pub fn moment_series(n: u32, params: &LambertParams, tol: f64) -> Result<MomentResult> {
    let alpha = params.alpha();
    let s = match n {
        1 => zeta_real(2.0, tol / alpha)?,
        2 => tornheim_i(alpha, tol / alpha)?,
        _ => {
            return Err(Error::domain(format!(
                "series identities cover moment orders 1 and 2, got {n}"
            )))
        }
    };
    Ok(MomentResult {
        n,
        value: alpha * s.value,
        method: MomentMethod::Series,
        error_estimate: alpha * s.tail_bound,
    })
}

/// `E[xi^2] = alpha I(alpha)`.
pub fn second_moment(params: &LambertParams, tol: f64) -> Result<f64> {
    Ok(moment_series(2, params, tol)?.value)
}

/// `sqrt(alpha I(alpha) - (pi^4 / 36) alpha^2)`.
pub fn stddev(params: &LambertParams, tol: f64) -> Result<f64> {
    let alpha = params.alpha();
    Ok((second_moment(params, tol)? - PI.powi(4) / 36.0 * alpha * alpha).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `sqrt(sample_count)`; 0 for one sample.
    pub std_error: f64,
    pub sample_count: usize,
    pub seed: u64,
}

/// Monte Carlo estimate of `E[xi^n]` from [`sample_batch`] variates.
pub fn mc_moments(
    n: u32,
    params: &LambertParams,
    sample_count: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_moments_all(n, params, sample_count, seed)?
        .pop()
        .expect("n >= 1"))
}

/// Estimates of `E[xi^k]` for `k = 1..=n_max` from one shared sample.
pub fn mc_moments_all(
    n_max: u32,
    params: &LambertParams,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if n_max == 0 {
        return Err(Error::domain("moment order must be at least 1"));
    }
    if sample_count == 0 {
        return Err(Error::domain("sample_count must be at least 1"));
    }
    let k = n_max as usize;
    let mut mean = vec![0.0; k];
    let mut m2 = vec![0.0; k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..sample_count {
        let u: f64 = rng.sample(Open01);
        let xi = inverse_x(u, params)?;
        let mut pw = 1.0;
        let c = (i + 1) as f64;
        for j in 0..k {
            pw *= xi;
            let d = pw - mean[j];
            mean[j] += d / c;
            m2[j] += d * (pw - mean[j]);
        }
    }
    Ok((0..k)
        .map(|j| {
            let std_error = if sample_count > 1 {
                (m2[j] / (sample_count - 1) as f64 / sample_count as f64).sqrt()
            } else {
                0.0
            };
            McEstimate {
                estimate: mean[j],
                std_error,
                sample_count,
                seed,
            }
        })
        .collect())
}

/// `E[xi^n] / n!`.
pub fn moment_growth_ratio(n: u32, params: &LambertParams, tol: f64) -> Result<f64> {
    let m = moment_quadrature(n, params, tol)?.value;
    Ok(m / (1..=n).map(f64::from).product::<f64>())
}

/// `E[xi^n]^{1/n} / n`; bounded in `n` for a moment-determinate law.
pub fn determinacy_ratio(n: u32, params: &LambertParams, tol: f64) -> Result<f64> {
    let m = moment_quadrature(n, params, tol)?.value;
    Ok(m.powf(1.0 / n as f64) / n as f64)
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// [`cdf`].
pub fn ks_statistic(samples: &[f64], params: &LambertParams) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x, params);
        let i = i as f64;
        d.max((i + 1.0) / n - f).max(f - i / n)
    })
}

/// `int_0^inf pdf`, split at 1.
pub fn total_probability(params: &LambertParams, tol: f64) -> Result<QuadResult> {
    let head = tanh_sinh(|x, _, _| pdf(x, params).unwrap_or(f64::NAN), 0.0, 1.0, tol)?;
    let tail = exp_sinh(|x, _| pdf(x, params).unwrap_or(f64::NAN), 1.0, tol)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error_estimate: head.error_estimate + tail.error_estimate,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// `int_0^X (1 - cdf)` with a bound on the omitted `int_X^inf (1 - cdf)`.
///
/// `1 - y <= 1 - lower_bound <= max(1, 1/(beta-1)) e^{-x}`, so the omitted
/// part is at most `max(1, 1/(beta-1)) e^{-X}`.
pub fn survival_integral(
    params: &LambertParams,
    x_max: f64,
    tol: f64,
) -> Result<(QuadResult, f64)> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::domain("x_max must be positive and finite"));
    }
    let r = tanh_sinh(|x, _, _| sf(x, params), 0.0, x_max, tol)?;
    Ok((r, params.lower_exponent().max(1.0) * (-x_max).exp()))
}
