use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bounds::bracket;
use super::check_x;
use crate::error::{Error, Result};
use crate::numeric::{ln_from_split, ln_one_minus_exp_neg, BELOW_ONE};
use crate::params::LambertParams;

/// Choice of the first iterate `y_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StartStrategy {
    UpperBound,
    LowerBound,
    Midpoint,
    Constant(f64),
}

impl Default for StartStrategy {
    fn default() -> Self {
        StartStrategy::Constant(1.0)
    }
}

impl StartStrategy {
    pub fn constant(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta <= 1.0 {
            Ok(StartStrategy::Constant(theta))
        } else {
            Err(Error::domain(format!(
                "constant start needs 0 < theta <= 1, got {theta}"
            )))
        }
    }
}

impl fmt::Display for StartStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartStrategy::UpperBound => f.write_str("upper"),
            StartStrategy::LowerBound => f.write_str("lower"),
            StartStrategy::Midpoint => f.write_str("mid"),
            StartStrategy::Constant(t) => write!(f, "const:{t}"),
        }
    }
}

impl FromStr for StartStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(StartStrategy::UpperBound),
            "lower" => Ok(StartStrategy::LowerBound),
            "mid" => Ok(StartStrategy::Midpoint),
            _ => {
                let theta = s
                    .strip_prefix("const:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::domain(format!(
                            "unknown start '{s}' (expected upper, lower, mid or const:<theta>)"
                        ))
                    })?;
                StartStrategy::constant(theta)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StopRule {
    /// `|y_n - y_{n+1}| <= eps`.
    SuccessiveDiff,
    /// `|y_n - reference| <= eps` against a supplied reference value.
    TrueError,
    /// `|y^beta - (1 - e^{-xy})| <= eps`, tested in relative form.
    #[default]
    Residual,
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopRule::SuccessiveDiff => "diff",
            StopRule::TrueError => "true",
            StopRule::Residual => "residual",
        })
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff" => Ok(StopRule::SuccessiveDiff),
            "true" => Ok(StopRule::TrueError),
            "residual" => Ok(StopRule::Residual),
            _ => Err(Error::domain(format!(
                "unknown stop rule '{s}' (expected diff, true or residual)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub start: StartStrategy,
    pub stop: StopRule,
    pub eps: f64,
    pub max_iter: usize,
    /// Target value for [`StopRule::TrueError`].
    pub reference: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            start: StartStrategy::default(),
            stop: StopRule::default(),
            eps: 1e-12,
            max_iter: 10_000,
            reference: None,
        }
    }
}

impl EvalOptions {
    pub fn with_start(mut self, start: StartStrategy) -> Self {
        self.start = start;
        self
    }

    pub fn with_stop(mut self, stop: StopRule, eps: f64) -> Self {
        self.stop = stop;
        self.eps = eps;
        self
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.stop = StopRule::TrueError;
        self.reference = Some(reference);
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub x: f64,
    /// `y_beta(x)`, never rounded up to 1.
    pub value: f64,
    /// `1 - value`, carried separately so it keeps full precision for large x.
    pub complement: f64,
    /// `upper_bound(x) - value`, computed without cancellation.
    pub upper_gap: f64,
    /// Number of applications of the fixed-point map. The residual and
    /// successive-difference rules apply it at least once; the true-error
    /// rule may accept the start itself, so its index `n` is `iterations + 1`.
    pub iterations: usize,
    /// `|y^beta - (1 - e^{-xy})|` at `value`.
    pub residual: f64,
    /// `residual / (1 - e^{-xy})`.
    pub relative_residual: f64,
    pub stop_rule: StopRule,
    pub start_strategy: StartStrategy,
}

impl EvalResult {
    /// `x_beta(value)`, routed through the complement when `value` is near 1.
    pub fn inverse(&self, params: &LambertParams) -> f64 {
        super::inverse_x_split(self.value, self.complement, params)
    }
}

#[derive(Clone, Copy)]
struct Iterate {
    y: f64,
    q: f64,
    /// `ln(1 - e^{-x y})`, shared by the residual and the next map step.
    ls: f64,
}

impl Iterate {
    fn new(y: f64, q: f64, x: f64) -> Self {
        Iterate {
            y: y.min(BELOW_ONE),
            q,
            ls: ln_one_minus_exp_neg(x * y),
        }
    }

    fn next(&self, x: f64, alpha: f64) -> Self {
        let e = alpha * self.ls;
        Iterate::new(e.exp(), -e.exp_m1(), x)
    }

    /// `(|y^beta - s|, |y^beta / s - 1|)` with `s = 1 - e^{-x y}`.
    fn residuals(&self, beta: f64) -> (f64, f64) {
        let rel = (beta * ln_from_split(self.y, self.q) - self.ls)
            .exp_m1()
            .abs();
        (self.ls.exp() * rel, rel)
    }
}

/// `f(1) - f(y)` for the iterate `y` that produced the returned value:
/// `f(1) (1 - (1 - r)^alpha)`, `r = (e^{-xy} - e^{-x}) / (1 - e^{-x})`.
fn gap_after(prev: &Iterate, x: f64, alpha: f64) -> f64 {
    let r = (-x * prev.y).exp() * -(-x * prev.q).exp_m1() / -(-x).exp_m1();
    (alpha * ln_one_minus_exp_neg(x)).exp() * -(alpha * (-r).ln_1p()).exp_m1()
}

/// Evaluates `y_beta(x)` as the limit of `y_{n+1} = (1 - e^{-x y_n})^alpha`.
///
/// The iterates are monotone, so the residual and successive-difference
/// rules return a value strictly between the two bounds of
/// [`super::bracket`].
pub fn eval_y(x: f64, params: &LambertParams, opts: &EvalOptions) -> Result<EvalResult> {
    check_x(x)?;
    if !(opts.eps > 0.0) {
        return Err(Error::domain(format!(
            "eps must be positive, got {}",
            opts.eps
        )));
    }
    if opts.max_iter == 0 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    let reference = match (opts.stop, opts.reference) {
        (StopRule::TrueError, Some(r)) if r.is_finite() => r,
        (StopRule::TrueError, _) => {
            return Err(Error::domain(
                "true-error stop needs a finite reference value",
            ))
        }
        _ => f64::NAN,
    };
    let (alpha, beta) = (params.alpha(), params.beta());
    let b = bracket(x, params)?;
    let start = match opts.start {
        StartStrategy::UpperBound => Iterate::new(b.upper, b.upper_gap, x),
        StartStrategy::LowerBound => Iterate::new(b.lower, b.lower_gap, x),
        StartStrategy::Midpoint => Iterate::new(
            0.5 * (b.lower + b.upper),
            0.5 * (b.lower_gap + b.upper_gap),
            x,
        ),
        StartStrategy::Constant(t) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::domain(format!(
                    "constant start needs 0 < theta <= 1, got {t}"
                )));
            }
            Iterate::new(t, 1.0 - t, x)
        }
    };

    let finish = |it: Iterate, prev: Option<Iterate>, n: usize| -> Result<EvalResult> {
        if it.y <= 0.0 {
            return Err(Error::Underflow { x });
        }
        let (residual, relative_residual) = it.residuals(beta);
        Ok(EvalResult {
            x,
            value: it.y,
            complement: it.q,
            upper_gap: match prev {
                Some(p) => gap_after(&p, x, alpha),
                None => b.upper_gap - it.q,
            },
            iterations: n,
            residual,
            relative_residual,
            stop_rule: opts.stop,
            start_strategy: opts.start,
        })
    };

    let close = |u: &Iterate, v: &Iterate| {
        if u.y < 0.5 {
            (u.y - v.y).abs()
        } else {
            (u.q - v.q).abs()
        }
    };

    let mut prev: Option<Iterate> = None;
    let mut cur = start;
    let mut n = 0;
    loop {
        if cur.y <= 0.0 {
            return Err(Error::Underflow { x });
        }
        match opts.stop {
            // f(1) is the upper bound itself, so the image of a start at 1
            // is not accepted
            StopRule::Residual
                if prev.is_some_and(|p| n >= 2 || p.q > 0.0)
                    && cur.residuals(beta).1 <= opts.eps =>
            {
                return finish(cur, prev, n)
            }
            StopRule::TrueError if (cur.y - reference).abs() <= opts.eps => {
                return finish(cur, prev, n)
            }
            _ => {}
        }
        if n == opts.max_iter {
            return Err(Error::MaxIterExceeded {
                iterations: n,
                last_value: cur.y,
                residual: cur.residuals(beta).0,
            });
        }
        let next = cur.next(x, alpha);
        n += 1;
        if opts.stop == StopRule::SuccessiveDiff && close(&cur, &next) <= opts.eps {
            return finish(next, Some(cur), n);
        }
        prev = Some(cur);
        cur = next;
    }
}
