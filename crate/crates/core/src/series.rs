//! Zeta values, harmonic numbers, Euler sums `S_k = sum H_n / n^k`,
//! the coefficients `A_l`, and two evaluations of
//! `I(alpha) = sum_{k,m>=1} 1 / (k m (k + m - alpha))`.
//!
//! Every infinite sum is returned with a rigorous tail bound. Tails of
//! slowly decaying sums are estimated with the trapezoid inequality for a
//! convex decreasing `f`:
//! `sum_{n>N} f(n) = int_N^inf f - f(N)/2 + e` with `0 <= e <= -f'(N)/8`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default upper limit on the terms of any single sum.
pub const DEFAULT_TERM_CAP: usize = 100_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MIN_TERMS: usize = 64;

/// A truncated sum: `|exact - value| <= tail_bound`, rounding aside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn exact(value: f64, terms_used: usize) -> Self {
        SeriesValue {
            value,
            terms_used,
            tail_bound: 0.0,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Smallest power-of-two multiple of [`MIN_TERMS`] whose bound is below `tol`.
fn choose_terms(bound: impl Fn(f64) -> f64, tol: f64, cap: usize) -> Result<usize> {
    let mut n = MIN_TERMS;
    loop {
        let b = bound(n as f64);
        if b <= tol {
            return Ok(n);
        }
        if n >= cap {
            return Err(Error::ToleranceNotReached {
                best: f64::NAN,
                estimate: b,
                tol,
            });
        }
        n = (2 * n).min(cap);
    }
}

/// `H_n = 1 + 1/2 + ... + 1/n`, `H_0 = 0`.
pub fn harmonic(n: u64) -> f64 {
    (1..=n)
        .map(|k| 1.0 / k as f64)
        .collect::<CompensatedSum>()
        .value()
}

/// Tail of `sum n^{-s}` beyond `n`: (midpoint, half-width).
fn zeta_tail(s: f64, n: f64) -> (f64, f64) {
    let half = s * n.powf(-s - 1.0) / 16.0;
    (n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + half, half)
}

/// `zeta(s)` for real `s > 1`.
pub fn zeta_real(s: f64, tol: f64) -> Result<SeriesValue> {
    zeta_real_capped(s, tol, DEFAULT_TERM_CAP)
}

pub fn zeta_real_capped(s: f64, tol: f64, cap: usize) -> Result<SeriesValue> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::domain(format!(
            "zeta_real needs finite s > 1, got {s}"
        )));
    }
    check_tol(tol)?;
    let n = choose_terms(|n| zeta_tail(s, n).1, 0.5 * tol, cap)?;
    let partial: CompensatedSum = (1..=n).rev().map(|k| (k as f64).powf(-s)).collect();
    let (mid, half) = zeta_tail(s, n as f64);
    Ok(SeriesValue {
        value: partial.value() + mid,
        terms_used: n,
        tail_bound: half,
    })
}

/// Tail of `sum H_n / n^k` beyond `n`: (midpoint, half-width).
///
/// Uses `H_n = ln n + gamma + 1/(2n) - d_n`, `0 < d_n < 1/(12 n^2)`, and the
/// trapezoid inequality for `(ln u + gamma) / u^k` and `u^{-k-1}`.
fn euler_tail(k: f64, n: f64) -> (f64, f64) {
    let l = n.ln() + EULER_GAMMA;
    let integral = n.powf(1.0 - k) * (l / (k - 1.0) + 1.0 / ((k - 1.0) * (k - 1.0)));
    let phi = l * n.powf(-k);
    let inv = n.powf(-k) / k - 0.5 * n.powf(-k - 1.0);
    let t0 = integral - 0.5 * phi + 0.5 * inv;
    let e1 = (k * l - 1.0) * n.powf(-k - 1.0) / 8.0;
    let e2 = (k + 1.0) * n.powf(-k - 2.0) / 8.0;
    let d = n.powf(-k - 1.0) / (12.0 * (k + 1.0));
    (t0 + 0.5 * (e1 + 0.5 * e2 - d), 0.5 * (e1 + 0.5 * e2 + d))
}

/// `S_k = sum_{n>=1} H_n / n^k` for integer `k >= 2`.
pub fn euler_sum_s(k: u32, tol: f64) -> Result<SeriesValue> {
    euler_sum_s_capped(k, tol, DEFAULT_TERM_CAP)
}

pub fn euler_sum_s_capped(k: u32, tol: f64, cap: usize) -> Result<SeriesValue> {
    if k < 2 {
        return Err(Error::domain(format!("euler_sum_s needs k >= 2, got {k}")));
    }
    check_tol(tol)?;
    let kf = k as f64;
    let n = choose_terms(|n| euler_tail(kf, n).1, 0.5 * tol, cap)?;
    let partial = harmonic_weighted(n, |m| (m as f64).powi(-(k as i32)), 0);
    let (mid, half) = euler_tail(kf, n as f64);
    Ok(SeriesValue {
        value: partial + mid,
        terms_used: n,
        tail_bound: half,
    })
}

/// `sum_{m=1}^{n} H_{m - shift} w(m)`, accumulated from the largest index
/// down so that small terms are added first.
fn harmonic_weighted(n: usize, w: impl Fn(usize) -> f64, shift: usize) -> f64 {
    let mut h = vec![0.0; n + 1];
    let mut run = CompensatedSum::new();
    for (m, slot) in h.iter_mut().enumerate().skip(1) {
        run.add(1.0 / m as f64);
        *slot = run.value();
    }
    (1 + shift..=n)
        .rev()
        .map(|m| h[m - shift] * w(m))
        .collect::<CompensatedSum>()
        .value()
}

/// `A_l = 2 sum_{n>=2} H_{n-1} / n^{l+2}`, evaluated as `2 S_{l+2} - 2 zeta(l+3)`.
pub fn a_coeff(l: u32, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let s = euler_sum_s(l + 2, 0.25 * tol)?;
    let z = zeta_real((l + 3) as f64, 0.25 * tol)?;
    Ok(SeriesValue {
        value: 2.0 * (s.value - z.value),
        terms_used: s.terms_used.max(z.terms_used),
        tail_bound: 2.0 * (s.tail_bound + z.tail_bound),
    })
}

/// `A_l` by direct summation of `2 H_{n-1} / n^{l+2}`.
///
/// The tail is the difference of the `S_{l+2}` and `zeta(l+3)` tails.
pub fn a_coeff_direct(l: u32, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let k = (l + 2) as f64;
    let bound = |n: f64| 2.0 * (euler_tail(k, n).1 + zeta_tail(k + 1.0, n).1);
    let n = choose_terms(bound, 0.5 * tol, DEFAULT_TERM_CAP)?;
    let partial = harmonic_weighted(n, |m| (m as f64).powi(-(l as i32 + 2)), 1);
    let (ms, hs) = euler_tail(k, n as f64);
    let (mz, hz) = zeta_tail(k + 1.0, n as f64);
    Ok(SeriesValue {
        value: 2.0 * (partial + ms - mz),
        terms_used: n,
        tail_bound: 2.0 * (hs + hz),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// `I(alpha)` from the diagonal regrouping `n = k + m`,
/// `I = sum_{n>=2} 2 H_{n-1} / (n (n - alpha))`.
///
/// Writing `1/(n(n-alpha)) = 1/(n(n-1)) - (1-alpha)/(n(n-1)(n-alpha))` and
/// using `sum_{m>=1} H_m / (m(m+1)) = zeta(2)` leaves
/// `I = pi^2/3 - 2 (1 - alpha) sum_{n>=2} H_{n-1} / (n (n-1) (n-alpha))`,
/// whose terms decay like `ln n / n^3`.
pub fn tornheim_i(alpha: f64, tol: f64) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    // remainder beyond N lies in [0, (2 ln a + 3) / (4 a^2)], a = N - 1
    let rmax = |n: f64| {
        let a = n - 1.0;
        (2.0 * a.ln() + 3.0) / (4.0 * a * a)
    };
    let n = choose_terms(|n| (1.0 - alpha) * rmax(n), 0.5 * tol, DEFAULT_TERM_CAP)?;
    let p = harmonic_weighted(
        n,
        |m| {
            let m = m as f64;
            1.0 / (m * (m - 1.0) * (m - alpha))
        },
        1,
    );
    let r = rmax(n as f64);
    Ok(SeriesValue {
        value: PI * PI / 3.0 - 2.0 * (1.0 - alpha) * (p + 0.5 * r),
        terms_used: n,
        tail_bound: (1.0 - alpha) * r,
    })
}

/// Partial sum `sum_{n=2}^{N} 2 H_{n-1} / (n (n - alpha))` of the regrouped
/// series, with the majorant `2 (ln a + 2) / a`, `a = N - 1`, of its tail.
pub fn tornheim_i_regrouped_partial(alpha: f64, n: usize) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    if n < 2 {
        return Err(Error::domain("regrouped sum needs N >= 2"));
    }
    let s = harmonic_weighted(n, |m| 2.0 / (m as f64 * (m as f64 - alpha)), 1);
    let a = (n - 1) as f64;
    Ok(SeriesValue {
        value: s,
        terms_used: n - 1,
        tail_bound: 2.0 * (a.ln() + 2.0) / a,
    })
}

/// Brute-force double sum over `k, m <= K`.
///
/// The omitted terms are bounded by `2 ((ln a + 2) / a + 1 / a^2)`, `a = K - 1`.
pub fn tornheim_i_brute(alpha: f64, k_max: usize) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    if k_max < 2 {
        return Err(Error::domain("brute-force sum needs K >= 2"));
    }
    let mut total = CompensatedSum::new();
    for k in (1..=k_max).rev() {
        let kf = k as f64;
        let inner: CompensatedSum = (1..=k_max)
            .rev()
            .map(|m| {
                let m = m as f64;
                1.0 / (m * (kf + m - alpha))
            })
            .collect();
        total.add(inner.value() / kf);
    }
    let a = (k_max - 1) as f64;
    Ok(SeriesValue {
        value: total.value(),
        terms_used: k_max * k_max,
        tail_bound: 2.0 * ((a.ln() + 2.0) / a + 1.0 / (a * a)),
    })
}

/// `I(alpha) = sum_{l>=0} A_l alpha^l`.
///
/// Every term of `A_{l+1}` is at most half the matching term of `A_l`, so
/// the tail after `A_L` is at most `A_L alpha^L (alpha/2) / (1 - alpha/2)`.
pub fn i_generating(alpha: f64, tol: f64) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    i_generating_terms(alpha, 0.25 * tol * (1.0 - alpha), Some(tol), usize::MAX)
}

/// The generating-function sum truncated after `A_L` (`L = max_l`), with the
/// geometric tail bound. `tol` controls the accuracy of each coefficient.
pub fn i_generating_truncated(alpha: f64, max_l: u32, tol: f64) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    i_generating_terms(alpha, tol, None, max_l as usize + 1)
}

fn i_generating_terms(
    alpha: f64,
    coeff_tol: f64,
    stop: Option<f64>,
    max_terms: usize,
) -> Result<SeriesValue> {
    let ratio = 0.5 * alpha / (1.0 - 0.5 * alpha);
    let mut sum = CompensatedSum::new();
    let mut coeff_err = 0.0;
    let mut pow = 1.0;
    let mut tail = f64::INFINITY;
    let mut terms = 0;
    for l in 0u32.. {
        if terms == max_terms || pow == 0.0 {
            break;
        }
        let a = a_coeff(l, coeff_tol)?;
        sum.add(a.value * pow);
        coeff_err += a.tail_bound * pow;
        tail = (a.value + a.tail_bound) * pow * ratio;
        terms += 1;
        if stop.is_some_and(|t| tail + coeff_err <= t) {
            break;
        }
        pow *= alpha;
    }
    let bound = tail + coeff_err;
    if let Some(tol) = stop {
        if bound > tol {
            return Err(Error::ToleranceNotReached {
                best: sum.value(),
                estimate: bound,
                tol,
            });
        }
    }
    Ok(SeriesValue {
        value: sum.value(),
        terms_used: terms,
        tail_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA3: f64 = 1.202_056_903_159_594_2;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
        let h = harmonic(1_000_000);
        assert!((h - (1e6f64.ln() + EULER_GAMMA)).abs() < 1e-6);
        assert!((harmonic(4) - harmonic(3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zeta_classical_values() {
        let z = zeta_real(2.0, 1e-12).unwrap();
        assert!((z.value - PI * PI / 6.0).abs() <= 1e-12);
        assert!(z.tail_bound <= 1e-12);
        let z = zeta_real(3.0, 1e-12).unwrap();
        assert!((z.value - ZETA3).abs() <= 1e-12);
        let z = zeta_real(4.0, 1e-12).unwrap();
        assert!((z.value - PI.powi(4) / 90.0).abs() <= 1e-12);
        assert!(zeta_real(1.0, 1e-6).is_err());
        assert!(zeta_real(2.0, 0.0).is_err());
    }

    #[test]
    fn zeta_cap_is_enforced() {
        let r = zeta_real_capped(1.000_001, 1e-300, 1_000);
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. })));
    }

    #[test]
    fn euler_sums() {
        let s = euler_sum_s(3, 1e-10).unwrap();
        assert!((s.value - PI.powi(4) / 72.0).abs() <= 1e-10);
        let s = euler_sum_s(2, 1e-8).unwrap();
        assert!((s.value - 2.0 * ZETA3).abs() <= 1e-8);
        let s = euler_sum_s(10, 1e-12).unwrap();
        assert!(s.terms_used <= 128);
        assert!(euler_sum_s(1, 1e-8).is_err());
    }

    #[test]
    fn a_coefficients() {
        let a0 = a_coeff(0, 1e-10).unwrap();
        assert!((a0.value - 2.0 * ZETA3).abs() <= 1e-10);
        let a1 = a_coeff(1, 1e-10).unwrap();
        assert!((a1.value - PI.powi(4) / 180.0).abs() <= 1e-10);
        let a20 = a_coeff(20, 1e-14).unwrap();
        // leading term 2 H_1 / 2^22, next 2 H_2 / 3^22
        let lead = 2.0 * 0.5f64.powi(22) + 3.0 * 3f64.powi(-22);
        assert!(((a20.value - lead) / lead).abs() < 1e-3);
    }

    #[test]
    fn a_coeff_routes_agree() {
        for l in 0..=10 {
            let z = a_coeff(l, 1e-11).unwrap();
            let d = a_coeff_direct(l, 1e-11).unwrap();
            assert!(
                (z.value - d.value).abs() <= z.tail_bound + d.tail_bound + 1e-14,
                "l {l}"
            );
        }
    }

    #[test]
    fn a1_plus_two_zeta4_is_two_s3() {
        let a1 = a_coeff(1, 1e-11).unwrap();
        let z4 = zeta_real(4.0, 1e-11).unwrap();
        let s3 = euler_sum_s(3, 1e-11).unwrap();
        let gap = (a1.value + 2.0 * z4.value - 2.0 * s3.value).abs();
        assert!(gap <= a1.tail_bound + 2.0 * (z4.tail_bound + s3.tail_bound) + 1e-14);
    }

    #[test]
    fn tornheim_routes() {
        for &alpha in &[0.2, 0.5, 0.8] {
            let t = tornheim_i(alpha, 1e-10).unwrap();
            let g = i_generating(alpha, 1e-10).unwrap();
            assert!(
                (t.value - g.value).abs() <= t.tail_bound + g.tail_bound + 1e-13,
                "{alpha}"
            );
            let b = tornheim_i_brute(alpha, 400).unwrap();
            assert!(b.value <= t.value + t.tail_bound);
            assert!(t.value - b.value <= b.tail_bound + t.tail_bound);
            let r = tornheim_i_regrouped_partial(alpha, 10_000).unwrap();
            assert!(r.value <= t.value + t.tail_bound);
            assert!(t.value - r.value <= r.tail_bound);
        }
        // I(0) = A_0 = 2 zeta(3)
        let t = tornheim_i(1e-9, 1e-10).unwrap();
        assert!((t.value - 2.0 * ZETA3).abs() < 1e-8);
        assert!(tornheim_i(1.0, 1e-8).is_err());
    }

    #[test]
    fn generating_function_truncation() {
        let g = i_generating_truncated(0.3, 0, 1e-10).unwrap();
        assert_eq!(g.terms_used, 1);
        assert!((g.value - 2.0 * ZETA3).abs() < 1e-9);
        let t = tornheim_i(0.3, 1e-10).unwrap();
        assert!(t.value - g.value <= g.tail_bound);
    }
}
