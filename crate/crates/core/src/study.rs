//! Tabulated numerical experiments and their CSV / JSON serialization.

use std::io::Write;

use serde::Serialize;

use crate::asymptotics::approx_distances;
use crate::distribution::{mc_moments_all, moment_quadrature};
use crate::error::{Error, Result};
use crate::lambert::{
    benchmark_eval, build_benchmark_grid, eval_y, inverse_x, EvalOptions, StartStrategy,
};
use crate::params::LambertParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(_) => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Int(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// One row of a study; cells line up with [`StudyTable::columns`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord(pub Vec<Cell>);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub columns: Vec<String>,
    pub records: Vec<StudyRecord>,
}

impl StudyTable {
    pub fn new(columns: &[&str]) -> Self {
        StudyTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.records.push(StudyRecord(cells));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV with a header row; floats carry 17 significant digits and
    /// non-finite values become empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::domain(format!("csv output failed: {e}"));
        out.write_record(&self.columns).map_err(io)?;
        for r in &self.records {
            out.write_record(r.0.iter().map(Cell::csv_field))
                .map_err(io)?;
        }
        out.flush()
            .map_err(|e| Error::domain(format!("csv output failed: {e}")))
    }

    /// JSON array of objects keyed by column name; non-finite floats are null.
    pub fn to_json(&self) -> serde_json::Value {
        self.records
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(r.0.iter().map(Cell::json_value))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect::<Vec<serde_json::Value>>()
            .into()
    }
}

/// Arithmetic grid `start, start + step, ...` up to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YGrid {
    pub start: f64,
    pub step: f64,
    pub max: f64,
}

impl YGrid {
    /// The small-y grid of the approximation study.
    pub const APPROX_DEFAULT: YGrid = YGrid {
        start: 1e-4,
        step: 1e-4,
        max: 0.15,
    };
    /// The full-range grid of the iteration-count study.
    pub const ITER_DEFAULT: YGrid = YGrid {
        start: 1e-3,
        step: 1e-3,
        max: 0.999,
    };

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.start > 0.0 && self.max < 1.0 && self.step > 0.0 && self.start <= self.max) {
            return Err(Error::domain(format!(
                "grid needs 0 < start <= max < 1 and step > 0, got start {} step {} max {}",
                self.start, self.step, self.max
            )));
        }
        let count = ((self.max - self.start) / self.step * (1.0 + 1e-12)).floor() as usize + 1;
        Ok((0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect())
    }
}

/// Distances of the two small-x approximations and the lower bound from
/// `y` at `x = x_beta(y)`, for each `beta`.
pub fn study_approx(betas: &[f64], grid: &YGrid) -> Result<StudyTable> {
    if betas.is_empty() {
        return Err(Error::domain("at least one beta is required"));
    }
    let ys = grid.values()?;
    let mut table = StudyTable::new(&[
        "beta",
        "y",
        "x",
        "approx_first",
        "approx_second",
        "lower_bound",
        "d1",
        "d2",
        "d_lower",
        "log_d1",
        "log_d2",
        "log_d_lower",
        "in_regime",
    ]);
    for &b in betas {
        let params = LambertParams::new(b)?;
        for d in approx_distances(&params, &ys)? {
            table.push(vec![
                b.into(),
                d.y.into(),
                d.x.into(),
                d.first.into(),
                d.second.into(),
                d.lower.into(),
                d.d1.into(),
                d.d2.into(),
                d.d_lower.into(),
                d.log_d1().into(),
                d.log_d2().into(),
                d.log_d_lower().into(),
                d.in_regime.into(),
            ]);
        }
    }
    Ok(table)
}

/// Start strategies compared by the iteration-count study, in order.
pub const ITER_STRATEGIES: [StartStrategy; 3] = [
    StartStrategy::UpperBound,
    StartStrategy::LowerBound,
    StartStrategy::Midpoint,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterRow {
    pub y: f64,
    pub x: f64,
    pub reference: f64,
    /// Smallest `n` with `|y_n - reference| <= eps`, per entry of
    /// [`ITER_STRATEGIES`].
    pub n: [usize; 3],
}

impl IterRow {
    /// Whether strategy `i` attains the minimal count (ties included).
    pub fn is_minimal(&self, i: usize) -> bool {
        self.n[i] == *self.n.iter().min().expect("three entries")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterStudy {
    pub beta: f64,
    pub eps: f64,
    pub m: usize,
    pub rows: Vec<IterRow>,
}

impl IterStudy {
    /// Share of rows with `region(y)` where strategy `i` is minimal.
    pub fn dominance(&self, i: usize, region: impl Fn(f64) -> bool) -> Option<f64> {
        let sel: Vec<_> = self.rows.iter().filter(|r| region(r.y)).collect();
        if sel.is_empty() {
            return None;
        }
        Some(sel.iter().filter(|r| r.is_minimal(i)).count() as f64 / sel.len() as f64)
    }

    pub fn table(&self) -> StudyTable {
        let mut t = StudyTable::new(&[
            "beta",
            "y",
            "x",
            "benchmark",
            "n_upper",
            "n_lower",
            "n_mid",
            "minimal",
        ]);
        for r in &self.rows {
            let minimal: Vec<String> = (0..3)
                .filter(|&i| r.is_minimal(i))
                .map(|i| ITER_STRATEGIES[i].to_string())
                .collect();
            t.push(vec![
                self.beta.into(),
                r.y.into(),
                r.x.into(),
                r.reference.into(),
                r.n[0].into(),
                r.n[1].into(),
                r.n[2].into(),
                minimal.join("+").as_str().into(),
            ]);
        }
        t
    }
}

/// Iteration counts `N(eps, x)` of the three start strategies with the
/// true-error stop against the benchmark interpolation on `m` nodes.
pub fn study_iter(
    beta: f64,
    eps: f64,
    grid: &YGrid,
    m: usize,
    max_iter: usize,
) -> Result<IterStudy> {
    let params = LambertParams::new(beta)?;
    let ys = grid.values()?;
    let bench = build_benchmark_grid(&params, m)?;
    let rows = ys
        .iter()
        .map(|&y| {
            let x = inverse_x(y, &params)?;
            let reference = benchmark_eval(&bench, x)?;
            let mut n = [0; 3];
            for (slot, &start) in n.iter_mut().zip(ITER_STRATEGIES.iter()) {
                let opts = EvalOptions {
                    eps,
                    max_iter,
                    ..EvalOptions::default()
                }
                .with_start(start)
                .with_reference(reference);
                *slot = eval_y(x, &params, &opts)?.iterations + 1;
            }
            Ok(IterRow { y, x, reference, n })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IterStudy { beta, eps, m, rows })
}

/// Log-moments by quadrature and by Monte Carlo for `n = 1..=n_max`.
pub fn study_moments(
    beta: f64,
    n_max: u32,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<StudyTable> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let params = LambertParams::new(beta)?;
    let mc = mc_moments_all(n_max, &params, samples, seed)?;
    let mut t = StudyTable::new(&[
        "beta",
        "n",
        "quadrature",
        "log_quadrature",
        "quadrature_error",
        "monte_carlo",
        "log_monte_carlo",
        "mc_std_error",
        "z_score",
    ]);
    for (n, est) in (1..=n_max).zip(mc) {
        let q = moment_quadrature(n, &params, tol)?;
        let z = if est.std_error > 0.0 {
            (est.estimate - q.value) / est.std_error
        } else {
            f64::NAN
        };
        t.push(vec![
            beta.into(),
            n.into(),
            q.value.into(),
            q.value.ln().into(),
            q.error_estimate.into(),
            est.estimate.into(),
            est.estimate.ln().into(),
            est.std_error.into(),
            z.into(),
        ]);
    }
    Ok(t)
}
