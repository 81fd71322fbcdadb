//! The four subcommands. Each takes resolved settings and writes to the
//! given output stream, so tests can drive them without a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use windfit::diagnostics::{diagnose, QqOptions};
use windfit::empirical::DEFAULT_GRID_POINTS;
use windfit::estimation::fit_kinds;
use windfit::ingest::{
    cadence_mode_minutes, extract_sample, parse_telemetry, ColumnSchema, SpeedColumn,
};
use windfit::{
    compare, ecdf, evaluation_grid, histogram, qq_report, Distribution, DistributionKind,
    FitComparison, FittedModel, ParamSet, Sample,
};

use crate::config::{FigureFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::figure::{Figure, Series, Style};
use crate::report::{render, sig10, ReportHeader};

pub const REPORT_FILE: &str = "fit_report.txt";

/// A loaded input file: the speeds to fit plus where they came from.
#[derive(Debug, Clone)]
pub struct Input {
    pub sample: Sample,
    /// Column name for telemetry input, `values` for plain files.
    pub column: String,
}

/// Read `cfg.input`, telemetry CSV if its first non-blank line contains a
/// semicolon and one value per line otherwise.
pub fn load_input(cfg: &RunConfig) -> Result<Input> {
    let path = &cfg.input;
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    let first = bytes
        .split(|&b| b == b'\n')
        .find(|l| !l.iter().all(u8::is_ascii_whitespace))
        .unwrap_or(&[]);
    let (sample, column) = if first.contains(&b';') {
        let (records, _) = parse_telemetry(bytes.as_slice(), &ColumnSchema::default())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        (
            extract_sample(&records, cfg.column)?,
            cfg.column.name().to_string(),
        )
    } else {
        (parse_values(&bytes, path)?, "values".to_string())
    };
    let sample = if cfg.drop_zeros {
        sample
            .without_zeros()
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    } else {
        sample
    };
    Ok(Input { sample, column })
}

fn parse_values(bytes: &[u8], path: &Path) -> Result<Sample> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: input is not valid UTF-8", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line.parse::<f64>().map_err(|_| {
            CliError::Input(format!(
                "{}:{}: not a number: '{line}'",
                path.display(),
                i + 1
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Input(format!("{}: no values", path.display())));
    }
    Sample::new(values, path.display().to_string())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn fit_models(cfg: &RunConfig, sample: &Sample) -> Result<Vec<FittedModel>> {
    let models = fit_kinds(sample, cfg.mode, &cfg.kinds, &cfg.settings)?;
    if let Some(bad) = models.iter().find(|m| m.log_likelihood.is_nan()) {
        return Err(CliError::Numeric(format!(
            "{} fit produced a NaN log-likelihood",
            bad.spec.kind
        )));
    }
    if !models.iter().any(FittedModel::is_feasible) {
        let zeros = sample.values().iter().filter(|&&v| v == 0.0).count();
        let hint = if zeros > 0 {
            format!("; {zeros} observations are exactly 0, which these models give zero density (see --drop-zeros)")
        } else {
            String::new()
        };
        return Err(CliError::Input(format!(
            "no requested distribution has finite likelihood on the data{hint}"
        )));
    }
    Ok(models)
}

/// Comparison of one or more models; a single model trivially wins.
fn comparison(models: &[FittedModel], sample: &Sample) -> Result<FitComparison> {
    if models.len() > 1 {
        return compare(models, sample).map_err(CliError::numeric);
    }
    let only = diagnose(&models[0], sample, &QqOptions::default()).map_err(CliError::numeric)?;
    let kind = only.spec.kind;
    let feasible = only.log_likelihood.is_finite();
    Ok(FitComparison {
        models: vec![only],
        ranking: vec![kind],
        winner: kind,
        tail_winner: feasible.then_some(kind),
    })
}

/// The fit report text for `cfg`, without touching the file system beyond
/// reading the input.
pub fn fit_report(cfg: &RunConfig) -> Result<String> {
    let input = load_input(cfg)?;
    let models = fit_models(cfg, &input.sample)?;
    let comparison = comparison(&models, &input.sample)?;
    let input_name = cfg.input.display().to_string();
    let header = ReportHeader {
        input: &input_name,
        column: &input.column,
        n: input.sample.len(),
    };
    Ok(render(&header, &comparison))
}

/// Fit, write `fit_report.txt` into the output directory and echo it.
pub fn cmd_fit(cfg: &RunConfig, out: &mut dyn Write) -> Result<PathBuf> {
    let report = fit_report(cfg)?;
    fs::create_dir_all(&cfg.out_dir).map_err(CliError::io(&cfg.out_dir))?;
    let path = cfg.out_dir.join(REPORT_FILE);
    fs::write(&path, &report).map_err(CliError::io(&path))?;
    out.write_all(report.as_bytes())
        .map_err(CliError::io("<stdout>"))?;
    Ok(path)
}

fn display_name(kind: DistributionKind) -> &'static str {
    match kind {
        DistributionKind::LogNormal => "Log-Normal",
        DistributionKind::Weibull => "Weibull",
        DistributionKind::Gamma => "Gamma",
        DistributionKind::Beta => "Beta",
    }
}

/// The three figures for one fitted model: pdf over the histogram, cdf
/// over the ECDF, and the Q-Q plot with its identity line.
pub fn figures(
    cfg: &RunConfig,
    model: &FittedModel,
    sample: &Sample,
) -> Result<[(&'static str, Figure); 3]> {
    let dist = model.distribution().map_err(CliError::numeric)?;
    let grid = evaluation_grid(sample, DEFAULT_GRID_POINTS)?;
    let name = display_name(model.spec.kind);

    let hist = histogram(sample, cfg.bins)?;
    let hist_outline: Vec<(f64, f64)> = hist
        .density
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| [(hist.bin_edges[i], d), (hist.bin_edges[i + 1], d)])
        .collect();
    let pdf = Figure {
        title: format!("PDF of {name} distribution compared with data histogram"),
        x_label: "wind speed, m/s",
        y_label: "probability density",
        series: vec![
            Series {
                name: "model",
                style: Style::Line,
                points: grid.iter().map(|&x| (x, dist.pdf(x))).collect(),
            },
            Series {
                name: "histogram",
                style: Style::Line,
                points: hist_outline,
            },
        ],
    };

    let e = ecdf(sample);
    let cdf = Figure {
        title: format!("CDF of {name} distribution compared with empirical distribution function"),
        x_label: "wind speed, m/s",
        y_label: "cumulative probability",
        series: vec![
            Series {
                name: "model",
                style: Style::Line,
                points: grid.iter().map(|&x| (x, dist.cdf(x))).collect(),
            },
            Series {
                name: "ecdf",
                style: Style::Staircase,
                points: e.xs.iter().copied().zip(e.ps.iter().copied()).collect(),
            },
        ],
    };

    let qq = qq_report(model, sample).map_err(CliError::numeric)?;
    let (lo, hi) = qq
        .theoretical_q
        .iter()
        .chain(&qq.empirical_q)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let qq_fig = Figure {
        title: format!("Q-Q plot for {name} distribution"),
        x_label: "model quantile, m/s",
        y_label: "sample quantile, m/s",
        series: vec![
            Series {
                name: "points",
                style: Style::Points,
                points: qq
                    .theoretical_q
                    .iter()
                    .copied()
                    .zip(qq.empirical_q.iter().copied())
                    .collect(),
            },
            Series {
                name: "identity",
                style: Style::Reference,
                points: vec![(lo, lo), (hi, hi)],
            },
        ],
    };
    Ok([("pdf", pdf), ("cdf", cdf), ("qq", qq_fig)])
}

fn write_figure(path: &Path, figure: &Figure, format: FigureFormat) -> Result<()> {
    let bytes = match format {
        FigureFormat::Svg => figure.to_svg().into_bytes(),
        FigureFormat::CsvPoints => {
            let mut buf = Vec::new();
            figure.write_csv(&mut buf).map_err(CliError::io(path))?;
            buf
        }
    };
    fs::write(path, bytes).map_err(CliError::io(path))
}

/// Fit each requested kind and write `{kind}_{pdf,cdf,qq}.{svg,csv}`.
/// Returns the written paths in kind order.
pub fn cmd_plot(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let input = load_input(cfg)?;
    let models = fit_models(cfg, &input.sample)?;
    fs::create_dir_all(&cfg.out_dir).map_err(CliError::io(&cfg.out_dir))?;
    let mut written = Vec::new();
    for model in &models {
        for (suffix, figure) in figures(cfg, model, &input.sample)? {
            let path = cfg.out_dir.join(format!(
                "{}_{suffix}.{}",
                model.spec.kind.name(),
                cfg.format.extension()
            ));
            write_figure(&path, &figure, cfg.format)?;
            writeln!(out, "{}", path.display()).map_err(CliError::io("<stdout>"))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Parameters of a `sample` request.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRequest {
    pub kind: DistributionKind,
    pub params: ParamSet,
    pub n: usize,
    pub seed: u64,
}

/// Draw the requested values, one per line in shortest round-trip form.
pub fn sample_text(req: &SampleRequest) -> Result<String> {
    if req.n == 0 {
        return Err(CliError::Input("sample size must be at least 1".into()));
    }
    let dist = Distribution::new(req.kind, req.params)?;
    let sample = dist.sample(req.n, req.seed)?;
    let mut text = String::with_capacity(20 * req.n);
    for v in sample.values() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    Ok(text)
}

pub fn cmd_sample(req: &SampleRequest, dest: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let text = sample_text(req)?;
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(CliError::io(dir))?;
            }
            fs::write(path, text).map_err(CliError::io(path))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(CliError::io("<stdout>")),
    }
}

/// Validate a telemetry file and summarise what would be fitted.
pub fn cmd_ingest_check(input: &Path, out: &mut dyn Write) -> Result<()> {
    let bytes = fs::read(input).map_err(CliError::io(input))?;
    let (records, report) = parse_telemetry(bytes.as_slice(), &ColumnSchema::default())
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let mut text = format!(
        "rows_read={}\nrows_accepted={}\nrows_rejected={}\n",
        report.rows_read, report.rows_accepted, report.rows_rejected
    );
    for (reason, count) in &report.rejection_reasons {
        text.push_str(&format!("rejected.{}={count}\n", reason.name()));
    }
    let cadence = cadence_mode_minutes(&records).map_or_else(|| "-".to_string(), |m| m.to_string());
    text.push_str(&format!("cadence_minutes={cadence}\n"));
    for column in SpeedColumn::ALL {
        let s = extract_sample(&records, column)?;
        text.push_str(&format!(
            "column={} n={} min={} max={} mean={} zeros={}\n",
            column.name(),
            s.len(),
            sig10(s.min()),
            sig10(s.max()),
            sig10(s.mean()),
            s.values().iter().filter(|&&v| v == 0.0).count()
        ));
    }
    out.write_all(text.as_bytes())
        .map_err(CliError::io("<stdout>"))
}
