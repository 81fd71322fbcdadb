//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file, the output-directory environment variable and
//! built-in defaults, in that order of precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use windfit::ingest::SpeedColumn;
use windfit::{BinRule, DistributionKind, FitSettings, ParametrizationMode};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WINDFIT_OUT";
pub const DEFAULT_OUT_DIR: &str = "windfit-out";

const CONFIG_KEYS: [&str; 12] = [
    "input",
    "column",
    "mode",
    "kinds",
    "out",
    "format",
    "bins",
    "drop_zeros",
    "seed",
    "tol",
    "max_iter",
    "eps_factor",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FigureFormat {
    #[default]
    Svg,
    CsvPoints,
}

impl FigureFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FigureFormat::Svg => "svg",
            FigureFormat::CsvPoints => "csv",
        }
    }
}

impl FromStr for FigureFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "svg" => Ok(FigureFormat::Svg),
            "csv-points" => Ok(FigureFormat::CsvPoints),
            other => Err(format!(
                "unknown figure format '{other}' (expected svg or csv-points)"
            )),
        }
    }
}

/// `fd`, `sturges` or a fixed positive bin count.
pub fn parse_bins(s: &str) -> Result<BinRule, String> {
    match s.trim() {
        "fd" | "freedman-diaconis" => Ok(BinRule::FreedmanDiaconis),
        "sturges" => Ok(BinRule::Sturges),
        other => match other.parse::<usize>() {
            Ok(n) if n > 0 => Ok(BinRule::Fixed(n)),
            _ => Err(format!(
                "invalid bin rule '{other}' (expected fd, sturges or a positive count)"
            )),
        },
    }
}

/// Options shared by the data-reading commands.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Semicolon-delimited telemetry CSV, or a plain file with one speed per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Speed column to read from telemetry input: nacelle, 10m or 50m [default: nacelle].
    #[arg(long)]
    pub column: Option<SpeedColumn>,
    /// Parametrization: full (shape, location, scale) or reduced (location 0, Beta scale 1) [default: full].
    #[arg(long)]
    pub mode: Option<ParametrizationMode>,
    /// Comma-separated subset of lognormal, weibull, gamma, beta [default: all four].
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<DistributionKind>>,
    /// Output directory [default: $WINDFIT_OUT, else ./windfit-out].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value file supplying any option not given as a flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Discard observations that are exactly zero before fitting.
    #[arg(long)]
    pub drop_zeros: bool,
    /// Simplex diameter at which the optimizer stops [default: 1e-9].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap per optimizer run [default: 20000].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Location margin below the sample minimum, as a fraction of the range [default: 1e-6].
    #[arg(long)]
    pub eps_factor: Option<f64>,
}

/// Parsed `key = value` file. Blank lines and lines starting with `#` are
/// ignored; relative paths are taken relative to the file's directory.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut file =
            Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        file.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(file)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(format!("line {}: unknown key '{key}'", i + 1));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile {
            entries,
            base: PathBuf::new(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Input(format!("config key '{key}': {e}")))
            })
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|v| self.base.join(v))
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.get::<bool>(key)
    }
}

fn config_for(args: &RunArgs) -> Result<ConfigFile> {
    match &args.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

/// Fully resolved settings for one `fit`, `plot` or `ingest-check` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub column: SpeedColumn,
    pub mode: ParametrizationMode,
    pub kinds: Vec<DistributionKind>,
    pub settings: FitSettings,
    pub out_dir: PathBuf,
    pub format: FigureFormat,
    pub bins: BinRule,
    pub drop_zeros: bool,
}

impl RunConfig {
    /// Layer `args` over the config file they name, then `env_out`, then
    /// defaults. Plot-only options are passed separately.
    pub fn resolve(
        args: &RunArgs,
        format: Option<FigureFormat>,
        bins: Option<BinRule>,
        env_out: Option<PathBuf>,
    ) -> Result<Self> {
        let file = config_for(args)?;
        let input = args
            .input
            .clone()
            .or_else(|| file.path("input"))
            .ok_or_else(|| {
                CliError::Input(
                    "no input file given (use --input or input= in the config file)".into(),
                )
            })?;

        let mut kinds = match &args.kinds {
            Some(k) => k.clone(),
            None => match file.raw("kinds") {
                Some(list) => list
                    .split(',')
                    .map(|k| {
                        k.parse::<DistributionKind>()
                            .map_err(|e| CliError::Input(format!("config key 'kinds': {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => DistributionKind::ALL.to_vec(),
            },
        };
        kinds.sort();
        kinds.dedup();
        if kinds.is_empty() {
            return Err(CliError::Input(
                "kinds must name at least one distribution".into(),
            ));
        }

        let defaults = FitSettings::default();
        let settings = FitSettings {
            tol: args.tol.or(file.get("tol")?).unwrap_or(defaults.tol),
            max_iter: args
                .max_iter
                .or(file.get("max_iter")?)
                .unwrap_or(defaults.max_iter),
            eps_factor: args
                .eps_factor
                .or(file.get("eps_factor")?)
                .unwrap_or(defaults.eps_factor),
            fixed_alpha: None,
        };
        if !(settings.tol > 0.0 && settings.tol.is_finite()) {
            return Err(CliError::Input(format!(
                "tol must be positive, got {}",
                settings.tol
            )));
        }
        if settings.max_iter == 0 {
            return Err(CliError::Input("max_iter must be at least 1".into()));
        }
        if !(settings.eps_factor > 0.0 && settings.eps_factor < 1.0) {
            return Err(CliError::Input(format!(
                "eps_factor must lie in (0, 1), got {}",
                settings.eps_factor
            )));
        }

        let bins = match bins {
            Some(b) => b,
            None => match file.raw("bins") {
                Some(v) => {
                    parse_bins(v).map_err(|e| CliError::Input(format!("config key 'bins': {e}")))?
                }
                None => BinRule::default(),
            },
        };

        Ok(RunConfig {
            input,
            column: args
                .column
                .or(file.get("column")?)
                .unwrap_or(SpeedColumn::Nacelle),
            mode: args
                .mode
                .or(file.get("mode")?)
                .unwrap_or(ParametrizationMode::Full),
            kinds,
            settings,
            out_dir: resolve_out(args.out.clone(), &file, env_out),
            format: format.or(file.get("format")?).unwrap_or_default(),
            bins,
            drop_zeros: args.drop_zeros || file.bool("drop_zeros")?.unwrap_or(false),
        })
    }
}

fn resolve_out(flag: Option<PathBuf>, file: &ConfigFile, env_out: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| file.path("out"))
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Seed and output file for `sample`, with the same layering.
pub fn resolve_sample_io(
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: Option<&Path>,
) -> Result<(u64, Option<PathBuf>)> {
    let file = match config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Ok((
        seed.or(file.get("seed")?).unwrap_or(0),
        out.or_else(|| file.path("out")),
    ))
}
