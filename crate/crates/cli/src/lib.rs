//! Command-line front end: argument parsing, configuration layering and the
//! `fit`, `plot`, `sample` and `ingest-check` commands.

pub mod commands;
pub mod config;
mod error;
pub mod figure;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use windfit::{BinRule, DistributionKind, ParamSet};

pub use error::{CliError, Result};

use commands::SampleRequest;
use config::{parse_bins, FigureFormat, RunArgs, RunConfig, OUT_DIR_ENV};

/// Fit wind-speed distributions by maximum likelihood and compare the fits.
#[derive(Debug, Parser)]
#[command(
    name = "windfit",
    version,
    after_help = "Exit status: 0 success, 1 I/O failure, 2 invalid input or degenerate data, 3 numeric failure.\n\
                  Options not given as flags are read from --config, then $WINDFIT_OUT (output directory only), then defaults."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the selected distributions and write a ranked report (fit_report.txt).
    Fit(FitArgs),
    /// Fit and write pdf, cdf and Q-Q figures for every selected distribution.
    Plot(PlotArgs),
    /// Draw a seeded random sample from a distribution, one value per line.
    Sample(SampleArgs),
    /// Validate a telemetry file and print row counts, cadence and column summaries.
    IngestCheck(IngestArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Figure format: svg, or csv-points for the plotted coordinates [default: svg].
    #[arg(long)]
    pub format: Option<FigureFormat>,
    /// Histogram bins: fd (Freedman-Diaconis), sturges, or a fixed count [default: fd].
    #[arg(long, value_parser = parse_bins)]
    pub bins: Option<BinRule>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// lognormal, weibull, gamma or beta.
    #[arg(long)]
    pub kind: DistributionKind,
    /// Shape parameter.
    #[arg(long)]
    pub alpha: f64,
    /// Second shape parameter (beta only).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Location parameter.
    #[arg(long, default_value_t = 0.0)]
    pub loc: f64,
    /// Scale parameter.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Number of draws.
    #[arg(long)]
    pub n: usize,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value file; only `seed` and `out` are read.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Semicolon-delimited telemetry CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Flat key=value file; only `input` is read.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Run one parsed command, writing its normal output to `out`.
pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Fit(args) => {
            let cfg = RunConfig::resolve(&args.run, None, None, env_out_dir())?;
            commands::cmd_fit(&cfg, out).map(|_| ())
        }
        Command::Plot(args) => {
            let cfg = RunConfig::resolve(&args.run, args.format, args.bins, env_out_dir())?;
            commands::cmd_plot(&cfg, out).map(|_| ())
        }
        Command::Sample(args) => {
            let (seed, dest) =
                config::resolve_sample_io(args.seed, args.out, args.config.as_deref())?;
            let req = SampleRequest {
                kind: args.kind,
                params: ParamSet::new(args.alpha, args.beta, args.loc, args.scale),
                n: args.n,
                seed,
            };
            commands::cmd_sample(&req, dest.as_deref(), out)
        }
        Command::IngestCheck(args) => {
            let run = RunArgs {
                input: args.input,
                config: args.config,
                ..RunArgs::default()
            };
            let cfg = RunConfig::resolve(&run, None, None, None)?;
            commands::cmd_ingest_check(&cfg.input, out)
        }
    }
}

/// Parse `args` (program name first), run the command and return the
/// process exit code. Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("windfit: {e}");
            e.exit_code()
        }
    }
}
