//! Turbine telemetry ingestion.
//!
//! Files are semicolon-delimited UTF-8 with one header line and, by default,
//! eight columns:
//!
//! ```text
//! T;X1;X2;X3;X4;X5;X6;X7
//! hh:mm;power kW;speed nacelle;dir nacelle;speed 10 m;dir 10 m;speed 50 m;dir 50 m
//! ```
//!
//! Malformed rows are skipped and counted per reason; they never abort a
//! load.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::empirical::Sample;
use crate::error::{Error, Result};

const MINUTES_PER_DAY: u32 = 24 * 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRecord {
    /// Minutes since midnight.
    pub time_of_day: u32,
    /// Output power in kW; negative when the turbine consumes power.
    pub power_kw: f64,
    pub wind_speed_nacelle: f64,
    /// Degrees clockwise from north, in `[0, 360)`.
    pub wind_dir_nacelle: f64,
    pub wind_speed_10m: f64,
    pub wind_dir_10m: f64,
    pub wind_speed_50m: f64,
    pub wind_dir_50m: f64,
}

impl TelemetryRecord {
    pub fn speed(&self, column: SpeedColumn) -> f64 {
        match column {
            SpeedColumn::Nacelle => self.wind_speed_nacelle,
            SpeedColumn::TenMeter => self.wind_speed_10m,
            SpeedColumn::FiftyMeter => self.wind_speed_50m,
        }
    }
}

/// Zero-based column index of each field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSchema {
    pub time: usize,
    pub power: usize,
    pub speed_nacelle: usize,
    pub dir_nacelle: usize,
    pub speed_10m: usize,
    pub dir_10m: usize,
    pub speed_50m: usize,
    pub dir_50m: usize,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            time: 0,
            power: 1,
            speed_nacelle: 2,
            dir_nacelle: 3,
            speed_10m: 4,
            dir_10m: 5,
            speed_50m: 6,
            dir_50m: 7,
        }
    }
}

impl ColumnSchema {
    fn width(&self) -> usize {
        [
            self.time,
            self.power,
            self.speed_nacelle,
            self.dir_nacelle,
            self.speed_10m,
            self.dir_10m,
            self.speed_50m,
            self.dir_50m,
        ]
        .into_iter()
        .max()
        .unwrap()
            + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeedColumn {
    Nacelle,
    TenMeter,
    FiftyMeter,
}

impl SpeedColumn {
    pub const ALL: [SpeedColumn; 3] = [
        SpeedColumn::Nacelle,
        SpeedColumn::TenMeter,
        SpeedColumn::FiftyMeter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpeedColumn::Nacelle => "nacelle",
            SpeedColumn::TenMeter => "10m",
            SpeedColumn::FiftyMeter => "50m",
        }
    }

    fn field_name(self) -> &'static str {
        match self {
            SpeedColumn::Nacelle => "wind_speed_nacelle",
            SpeedColumn::TenMeter => "wind_speed_10m",
            SpeedColumn::FiftyMeter => "wind_speed_50m",
        }
    }
}

impl fmt::Display for SpeedColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpeedColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nacelle" => Ok(SpeedColumn::Nacelle),
            "10m" => Ok(SpeedColumn::TenMeter),
            "50m" => Ok(SpeedColumn::FiftyMeter),
            other => Err(Error::domain(format!(
                "unknown speed column '{other}' (nacelle, 10m, 50m)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    /// Row has fewer fields than the schema needs.
    FieldCount,
    /// Row is not valid UTF-8 or not valid CSV.
    Encoding,
    Time,
    Power,
    Speed,
    Direction,
}

impl RejectReason {
    pub fn name(self) -> &'static str {
        match self {
            RejectReason::FieldCount => "field_count",
            RejectReason::Encoding => "encoding",
            RejectReason::Time => "time",
            RejectReason::Power => "power",
            RejectReason::Speed => "speed",
            RejectReason::Direction => "direction",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rows_rejected: usize,
    pub rejection_reasons: BTreeMap<RejectReason, usize>,
}

impl IngestReport {
    fn reject(&mut self, reason: RejectReason) {
        self.rows_rejected += 1;
        *self.rejection_reasons.entry(reason).or_default() += 1;
    }
}

/// Parse `hh:mm` into minutes since midnight.
pub fn parse_time_of_day(s: &str) -> Option<u32> {
    let (h, m) = s.trim().split_once(':')?;
    if h.is_empty() || h.len() > 2 || m.len() != 2 {
        return None;
    }
    let h: u32 = h.parse().ok()?;
    let m: u32 = m.parse().ok()?;
    (h < 24 && m < 60).then_some(h * 60 + m)
}

pub fn format_time_of_day(minutes: u32) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

fn parse_number(field: Option<&str>) -> Option<f64> {
    field?.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_speed(field: Option<&str>) -> Option<f64> {
    parse_number(field).filter(|&v| v >= 0.0)
}

fn parse_direction(field: Option<&str>) -> Option<f64> {
    parse_number(field)
        .map(|v| v.rem_euclid(360.0))
        .map(|v| if v >= 360.0 { 0.0 } else { v })
}

fn parse_row(
    row: &csv::StringRecord,
    schema: &ColumnSchema,
) -> std::result::Result<TelemetryRecord, RejectReason> {
    if row.len() < schema.width() {
        return Err(RejectReason::FieldCount);
    }
    let time_of_day = row
        .get(schema.time)
        .and_then(parse_time_of_day)
        .ok_or(RejectReason::Time)?;
    let power_kw = parse_number(row.get(schema.power)).ok_or(RejectReason::Power)?;
    let speed = |i: usize| parse_speed(row.get(i)).ok_or(RejectReason::Speed);
    let direction = |i: usize| parse_direction(row.get(i)).ok_or(RejectReason::Direction);
    Ok(TelemetryRecord {
        time_of_day,
        power_kw,
        wind_speed_nacelle: speed(schema.speed_nacelle)?,
        wind_dir_nacelle: direction(schema.dir_nacelle)?,
        wind_speed_10m: speed(schema.speed_10m)?,
        wind_dir_10m: direction(schema.dir_10m)?,
        wind_speed_50m: speed(schema.speed_50m)?,
        wind_dir_50m: direction(schema.dir_50m)?,
    })
}

/// Parse telemetry from any reader. I/O failures abort; malformed rows are
/// counted in the report.
pub fn parse_telemetry<R: Read>(
    reader: R,
    schema: &ColumnSchema,
) -> Result<(Vec<TelemetryRecord>, IngestReport)> {
    parse_telemetry_inner(reader, schema, Path::new("<reader>"))
}

fn parse_telemetry_inner<R: Read>(
    reader: R,
    schema: &ColumnSchema,
    path: &Path,
) -> Result<(Vec<TelemetryRecord>, IngestReport)> {
    let mut csv = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    let mut raw = csv::ByteRecord::new();
    loop {
        match csv.read_byte_record(&mut raw) {
            Ok(false) => break,
            Ok(true) => {
                report.rows_read += 1;
                match csv::StringRecord::from_byte_record(raw.clone()) {
                    Ok(row) => match parse_row(&row, schema) {
                        Ok(rec) => {
                            report.rows_accepted += 1;
                            records.push(rec);
                        }
                        Err(reason) => report.reject(reason),
                    },
                    Err(_) => report.reject(RejectReason::Encoding),
                }
            }
            Err(e) => match e.into_kind() {
                csv::ErrorKind::Io(source) => {
                    return Err(Error::Io {
                        path: path.to_path_buf(),
                        source,
                    })
                }
                _ => {
                    report.rows_read += 1;
                    report.reject(RejectReason::Encoding);
                }
            },
        }
    }
    if report.rows_accepted == 0 {
        return Err(Error::EmptyDataset(format!(
            "{}: no valid rows ({} read)",
            path.display(),
            report.rows_read
        )));
    }
    Ok((records, report))
}

/// Load a telemetry CSV file.
pub fn load_csv(
    path: impl AsRef<Path>,
    schema: &ColumnSchema,
) -> Result<(Vec<TelemetryRecord>, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_telemetry_inner(file, schema, path)
}

/// Write records in the default eight-column layout, header included.
pub fn write_csv<W: Write>(records: &[TelemetryRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "T;X1;X2;X3;X4;X5;X6;X7")?;
    for r in records {
        writeln!(
            out,
            "{};{};{};{};{};{};{};{}",
            format_time_of_day(r.time_of_day),
            r.power_kw,
            r.wind_speed_nacelle,
            r.wind_dir_nacelle,
            r.wind_speed_10m,
            r.wind_dir_10m,
            r.wind_speed_50m,
            r.wind_dir_50m
        )?;
    }
    Ok(())
}

/// One speed column as a [`Sample`], labelled with the column name.
pub fn extract_sample(records: &[TelemetryRecord], column: SpeedColumn) -> Result<Sample> {
    if records.is_empty() {
        return Err(Error::EmptyDataset("no telemetry records".into()));
    }
    Sample::new(
        records.iter().map(|r| r.speed(column)).collect(),
        column.field_name(),
    )
}

/// Most frequent gap between consecutive timestamps, in minutes, with gaps
/// taken modulo one day so midnight roll-overs count normally. Ties go to
/// the shorter gap.
pub fn cadence_mode_minutes(records: &[TelemetryRecord]) -> Option<u32> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for w in records.windows(2) {
        let gap = (w[1].time_of_day + MINUTES_PER_DAY - w[0].time_of_day) % MINUTES_PER_DAY;
        *counts.entry(gap).or_default() += 1;
    }
    counts
        .into_iter()
        .fold(None, |best: Option<(u32, usize)>, (gap, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((gap, c)),
        })
        .map(|(gap, _)| gap)
}
