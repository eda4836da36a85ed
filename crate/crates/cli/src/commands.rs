use anyhow::{anyhow, Result};
use genlambert::branching::{extinction_pgf_iteration, extinction_via_lambert, BranchingParams};
use genlambert::distribution::{
    mc_moments_all, moment_closed_form, moment_quadrature, moment_series, sample_batch,
};
use genlambert::study::{study_approx, study_iter, study_moments, Cell, StudyTable, YGrid};
use genlambert::{
    benchmark_eval, bound_ratio, bracket, build_benchmark_grid, eval_y, inverse_x, EvalOptions,
    LambertParams, StartStrategy, StopRule,
};

use crate::{Command, Method, Settings, UsageError};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_SAMPLES: usize = 1_000_000;

pub fn run(cmd: &Command, s: &Settings) -> Result<StudyTable> {
    match cmd {
        Command::Eval => eval(s),
        Command::Invert => invert(s),
        Command::Extinction => extinction(s),
        Command::Bounds => bounds(s),
        Command::Moments => moments(s),
        Command::Sample => sample(s),
        Command::StudyApprox => approx(s),
        Command::StudyIter => iter(s),
        Command::StudyMoments => moments_study(s),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

/// A single beta (from --beta or --alpha), or `default` when neither is set.
fn single_beta(s: &Settings, default: Option<f64>) -> Result<f64> {
    let betas = s.betas()?;
    let alpha = s.opt("alpha", &s.flags().alpha)?;
    match (betas.as_slice(), alpha, default) {
        ([b], None, _) => Ok(*b),
        ([], Some(a), _) => Ok(1.0 / a),
        ([], None, Some(d)) => Ok(d),
        ([], None, None) => Err(usage("--beta or --alpha is required")),
        ([_], Some(_), _) => Err(usage("give either --beta or --alpha, not both")),
        _ => Err(usage("this command takes a single --beta")),
    }
}

fn params(s: &Settings, default: Option<f64>) -> Result<LambertParams> {
    let betas = s.betas()?;
    match s.opt("alpha", &s.flags().alpha)? {
        Some(a) if betas.is_empty() => Ok(LambertParams::from_alpha(a)?),
        _ => Ok(LambertParams::new(single_beta(s, default)?)?),
    }
}

fn y_grid(s: &Settings, default: YGrid) -> Result<YGrid> {
    let f = s.flags();
    Ok(YGrid {
        start: s.or("y-start", &f.y_start, default.start)?,
        step: s.or("y-step", &f.y_step, default.step)?,
        max: s.or("y-max", &f.y_max, default.max)?,
    })
}

fn parse_core<T: std::str::FromStr<Err = genlambert::Error>>(raw: &str) -> Result<T> {
    raw.parse::<T>().map_err(|e| usage(e.to_string()))
}

fn eval(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let params = params(s, None)?;
    let x: f64 = s.required("x", &f.x)?;
    let stop: StopRule = parse_core(&s.or("stop", &f.stop, "residual".to_owned())?)?;
    let start: StartStrategy = parse_core(&s.or("start", &f.start, "const:1".to_owned())?)?;
    let mut opts = EvalOptions {
        start,
        stop,
        eps: s.or("eps", &f.eps, 1e-12)?,
        max_iter: s.or("max-iter", &f.max_iter, 10_000)?,
        reference: None,
    };
    if stop == StopRule::TrueError {
        let grid = build_benchmark_grid(&params, s.or("m", &f.m, 10_000)?)?;
        opts.reference = Some(benchmark_eval(&grid, x)?);
    }
    let r = eval_y(x, &params, &opts)?;
    let mut t = StudyTable::new(&[
        "x",
        "beta",
        "value",
        "complement",
        "iterations",
        "residual",
        "relative_residual",
        "stop",
        "start",
    ]);
    t.push(vec![
        x.into(),
        params.beta().into(),
        r.value.into(),
        r.complement.into(),
        r.iterations.into(),
        r.residual.into(),
        r.relative_residual.into(),
        r.stop_rule.to_string().as_str().into(),
        r.start_strategy.to_string().as_str().into(),
    ]);
    Ok(t)
}

fn invert(s: &Settings) -> Result<StudyTable> {
    let params = params(s, None)?;
    let y: f64 = s.required("y", &s.flags().y)?;
    let x = inverse_x(y, &params)?;
    let mut t = StudyTable::new(&["y", "beta", "x"]);
    t.push(vec![y.into(), params.beta().into(), x.into()]);
    Ok(t)
}

fn extinction(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let lambda: f64 = s.required("lambda", &f.lambda)?;
    let alpha = params(s, None)?.alpha();
    let tol = s.or("eps", &f.eps, 1e-12)?;
    let bp = BranchingParams::new(lambda, alpha)?;
    let lambert = extinction_via_lambert(&bp, tol)?;
    let pgf = extinction_pgf_iteration(&bp, tol, s.or("max-iter", &f.max_iter, 1_000_000)?)?;
    let mut t = StudyTable::new(&[
        "lambda",
        "alpha",
        "via_lambert",
        "via_pgf_iteration",
        "difference",
    ]);
    t.push(vec![
        lambda.into(),
        alpha.into(),
        lambert.into(),
        pgf.into(),
        (lambert - pgf).abs().into(),
    ]);
    Ok(t)
}

fn bounds(s: &Settings) -> Result<StudyTable> {
    let params = params(s, None)?;
    let x: f64 = s.required("x", &s.flags().x)?;
    let b = bracket(x, &params)?;
    let mut t = StudyTable::new(&[
        "x",
        "beta",
        "lower",
        "upper",
        "ratio",
        "lower_gap",
        "upper_gap",
    ]);
    t.push(vec![
        x.into(),
        params.beta().into(),
        b.lower.into(),
        b.upper.into(),
        bound_ratio(x, &params)?.into(),
        b.lower_gap.into(),
        b.upper_gap.into(),
    ]);
    Ok(t)
}

fn moments(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let params = params(s, None)?;
    let n_max: u32 = s.or("n", &f.n, 1)?;
    if n_max == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let method = s.or("method", &f.method, Method::Quadrature)?;
    let tol = s.or("eps", &f.eps, 1e-10)?;
    let mut t = StudyTable::new(&["beta", "n", "value", "method", "error_estimate"]);
    let mut push = |n: u32, value: f64, method: &str, err: f64| {
        t.push(vec![
            params.beta().into(),
            n.into(),
            value.into(),
            method.into(),
            err.into(),
        ]);
    };
    match method {
        Method::Mc => {
            let samples = s.or("samples", &f.samples, DEFAULT_SAMPLES)?;
            let seed = s.or("seed", &f.seed, DEFAULT_SEED)?;
            for (n, e) in (1..=n_max).zip(mc_moments_all(n_max, &params, samples, seed)?) {
                push(n, e.estimate, "mc", e.std_error);
            }
        }
        _ => {
            for n in 1..=n_max {
                let r = match method {
                    Method::Quadrature => moment_quadrature(n, &params, tol)?,
                    Method::Closed => moment_closed_form(n, &params)?,
                    Method::Series => moment_series(n, &params, tol)?,
                    Method::Mc => unreachable!(),
                };
                let name = match method {
                    Method::Quadrature => "quadrature",
                    Method::Closed => "closed",
                    _ => "series",
                };
                push(n, r.value, name, r.error_estimate);
            }
        }
    }
    Ok(t)
}

fn sample(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let params = params(s, None)?;
    let n = s.or("n", &f.n, 1)? as usize;
    let seed = s.or("seed", &f.seed, DEFAULT_SEED)?;
    let mut t = StudyTable::new(&["index", "value"]);
    for (i, v) in sample_batch(&params, n, seed).into_iter().enumerate() {
        t.push(vec![Cell::Int(i as u64), v.into()]);
    }
    Ok(t)
}

fn approx(s: &Settings) -> Result<StudyTable> {
    let mut betas = s.betas()?;
    if betas.is_empty() {
        betas = match s.opt("alpha", &s.flags().alpha)? {
            Some(a) => vec![1.0 / a],
            None => vec![1.25],
        };
    }
    Ok(study_approx(&betas, &y_grid(s, YGrid::APPROX_DEFAULT)?)?)
}

fn iter(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let beta = single_beta(s, Some(1.25))?;
    let study = study_iter(
        beta,
        s.or("eps", &f.eps, 1e-5)?,
        &y_grid(s, YGrid::ITER_DEFAULT)?,
        s.or("m", &f.m, 10_000)?,
        s.or("max-iter", &f.max_iter, 10_000)?,
    )?;
    for (i, start) in genlambert::study::ITER_STRATEGIES.iter().enumerate() {
        let share = |lo: f64, hi: f64| {
            study
                .dominance(i, |y| (lo..=hi).contains(&y))
                .map_or("n/a".to_owned(), |v| format!("{:.1}%", 100.0 * v))
        };
        eprintln!(
            "{start}: minimal on {} of y <= 0.15, {} of y >= 0.6",
            share(0.0, 0.15),
            share(0.6, 1.0)
        );
    }
    Ok(study.table())
}

fn moments_study(s: &Settings) -> Result<StudyTable> {
    let f = s.flags();
    let beta = single_beta(s, Some(1.2))?;
    let n_max: u32 = s.or("n", &f.n, 6)?;
    if n_max == 0 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(study_moments(
        beta,
        n_max,
        s.or("samples", &f.samples, DEFAULT_SAMPLES)?,
        s.or("seed", &f.seed, DEFAULT_SEED)?,
        s.or("eps", &f.eps, 1e-10)?,
    )?)
}
