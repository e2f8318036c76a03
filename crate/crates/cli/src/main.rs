use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod output;

/// Moments, bounds, series checks and random-matrix simulation for the
/// free multiplicative central limit.
#[derive(Debug, Parser, Serialize)]
#[command(name = "freeclt", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Variance of the factors' logarithm: integer, decimal or p/q.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub sigma2: String,
    /// Working precision in bits.
    #[arg(long, global = true, env = "FREECLT_BITS", default_value_t = 256)]
    pub bits: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; CSV outputs also get a `<out>.json` sidecar.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Significant digits for arbitrary-precision values.
    #[arg(long, global = true, default_value_t = 20)]
    pub digits: usize,
    /// Leave wall-clock fields out so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Table of φ(Y^k).
    Moments(MomentsArgs),
    /// Table of φ(log^{2k} Y).
    LogMoments(LogMomentsArgs),
    /// Moment generating function of log Y on a grid.
    Mgf(MgfArgs),
    /// The support bound c0 and prefactor alpha0.
    C0,
    /// Exact moments against the Bessel-type asymptotic.
    Asym(AsymArgs),
    /// Implied semicircle radii.
    Radius(RadiusArgs),
    /// Complete-monotonicity check of the scaled moments.
    Monotone(MonotoneArgs),
    /// Random-matrix simulation of the limit law of log Y.
    Simulate(SimulateArgs),
    /// Checks the closed-form layers of the S-transform expansion.
    SeriesVerify(SeriesArgs),
    /// Semicircle density of radius c0 on a grid.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Laguerre,
    Sum,
    Chi,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, default_value_t = 10)]
    pub kmax: u32,
    #[arg(long, value_enum, default_value_t = MomentMethod::Laguerre)]
    pub method: MomentMethod,
}

#[derive(Debug, Args, Serialize)]
pub struct LogMomentsArgs {
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
    /// Print exact rationals instead of decimals.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct MgfArgs {
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub smin: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub smax: f64,
    #[arg(long, default_value_t = 81)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymArgs {
    #[arg(long, default_value_t = 100)]
    pub kmax: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Y,
    Log,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum CatalanArg {
    #[value(name = "k")]
    #[serde(rename = "k")]
    K,
    #[value(name = "2k")]
    #[serde(rename = "2k")]
    TwoK,
}

#[derive(Debug, Args, Serialize)]
pub struct RadiusArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Y)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 100)]
    pub kmax: u32,
    /// Catalan number matched in the log-kind radius.
    #[arg(long, value_enum, default_value_t = CatalanArg::K)]
    pub catalan: CatalanArg,
}

#[derive(Debug, Args, Serialize)]
pub struct MonotoneArgs {
    /// Largest moment index.
    #[arg(long = "K", default_value_t = 200)]
    pub k_max: u32,
    /// Highest difference order.
    #[arg(long = "J", default_value_t = 64)]
    pub order: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    IidNormal,
    Quantile,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 64)]
    pub factors: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 101)]
    pub bins: usize,
    /// Histogram half-width in units of c0.
    #[arg(long, default_value_t = 1.1)]
    pub range_mult: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::IidNormal)]
    pub scheme: SchemeArg,
    /// Report the x-axis in units of c0.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// Truncation order in z.
    #[arg(long = "M", default_value_t = 16)]
    pub z_order: usize,
    /// Truncation order in eps.
    #[arg(long = "E", default_value_t = 4)]
    pub eps_order: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug)]
pub enum CliError {
    Lib(freeclt::Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<freeclt::Error> for CliError {
    fn from(e: freeclt::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !e.is_validation() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
