use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use genlambert::study::StudyTable;

mod commands;
mod config;

use config::ConfigFile;

/// Invalid flags or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quadrature,
    Closed,
    Series,
    Mc,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Method as ValueEnum>::from_str(s, true)
    }
}

/// Generalized Lambert function y^beta = 1 - exp(-x y): evaluation, bounds,
/// moments, sampling, extinction probabilities and numerical studies.
#[derive(Debug, Parser)]
#[command(name = "genlambert", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate y_beta(x) by fixed-point iteration.
    Eval,
    /// Evaluate the inverse x_beta(y).
    Invert,
    /// Extinction probability for discrete-stable offspring.
    Extinction,
    /// Lower and upper bounds of y_beta(x) and their ratio.
    Bounds,
    /// Moments E[xi^n] for n = 1..N.
    Moments,
    /// Seeded variates of xi.
    Sample,
    /// Distances of the small-x approximations over a y grid.
    StudyApprox,
    /// Iteration counts of the three start strategies over a y grid.
    StudyIter,
    /// Log-moments by quadrature and Monte Carlo.
    StudyMoments,
}

/// Every flag may also be given in the config file under its long name;
/// flags on the command line take precedence.
#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    /// Shape parameter beta > 1; a comma-separated list for study-approx.
    #[arg(long, global = true, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Stability index alpha = 1/beta, in (0, 1).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Stop tolerance (iteration) or accuracy target (moments, series).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// diff | true | residual
    #[arg(long, global = true)]
    pub stop: Option<String>,
    /// upper | lower | mid | const:<theta>
    #[arg(long, global = true)]
    pub start: Option<String>,
    /// Benchmark grid size.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Moment order (maximum) or number of variates.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key = value file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "y-start", global = true)]
    pub y_start: Option<f64>,
    #[arg(long = "y-step", global = true)]
    pub y_step: Option<f64>,
    #[arg(long = "y-max", global = true)]
    pub y_max: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// quadrature | closed | series | mc
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
}

/// Flags merged with the config file.
pub struct Settings<'a> {
    flags: &'a Flags,
    file: ConfigFile,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse::<T>().map_err(|_| {
        anyhow!(UsageError(format!(
            "invalid value '{raw}' for {key} in config file"
        )))
    })
}

impl<'a> Settings<'a> {
    pub fn new(flags: &'a Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(Settings { flags, file })
    }

    /// The flag value, else the config value, else `None`.
    pub fn opt<T: FromStr + Clone>(&self, key: &str, flag: &Option<T>) -> Result<Option<T>> {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        self.file
            .get(key)
            .map(|raw| parse_value(key, raw))
            .transpose()
    }

    pub fn or<T: FromStr + Clone>(&self, key: &str, flag: &Option<T>, default: T) -> Result<T> {
        Ok(self.opt(key, flag)?.unwrap_or(default))
    }

    pub fn required<T: FromStr + Clone>(&self, key: &str, flag: &Option<T>) -> Result<T> {
        self.opt(key, flag)?
            .ok_or_else(|| anyhow!(UsageError(format!("--{key} is required"))))
    }

    pub fn flags(&self) -> &Flags {
        self.flags
    }

    pub fn betas(&self) -> Result<Vec<f64>> {
        if !self.flags.beta.is_empty() {
            return Ok(self.flags.beta.clone());
        }
        match self.file.get("beta") {
            Some(raw) => raw.split(',').map(|b| parse_value("beta", b)).collect(),
            None => Ok(Vec::new()),
        }
    }

    pub fn format(&self) -> Result<Format> {
        self.or("format", &self.flags.format, Format::Csv)
    }

    pub fn out(&self) -> Result<Option<PathBuf>> {
        self.opt("out", &self.flags.out)
    }
}

fn emit(table: &StudyTable, settings: &Settings) -> Result<()> {
    let format = settings.format()?;
    let sink: Box<dyn Write> = match settings.out()? {
        Some(p) => Box::new(BufWriter::new(
            File::create(&p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => table.write_csv(sink)?,
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &table.to_json())?;
            writeln!(sink)?;
            sink.flush()?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<genlambert::Error>() {
        Some(genlambert::Error::MaxIterExceeded { .. })
        | Some(genlambert::Error::ToleranceNotReached { .. }) => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let settings = Settings::new(&cli.flags)?;
    let table = commands::run(&cli.command, &settings)?;
    emit(&table, &settings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
