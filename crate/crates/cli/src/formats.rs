//! On-disk formats: JSON web configurations and scenarios, the CSV trace
//! file, line-delimited event logs, and study CSV export.
//!
//! Trace samples are written in Rust's shortest round-trip decimal form,
//! so reading a trace back reproduces the exact bit pattern and identical
//! inputs always produce byte-identical files.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use weavesense_core::characterize::StudyResult;
use weavesense_core::localizer::LocalizationResult;
use weavesense_core::sim::{SimScenario, TraceSet};
use weavesense_core::web::{PluckEvent, WebConfig, FIBER_COUNT};

/// Error type carrying the CLI exit-code classification.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 1: the environment failed (missing file, full disk, ...).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Exit code 2: the input is malformed or violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Exit code 3: processing succeeded but nothing was detected.
    #[error("no impulse detected")]
    NoDetection,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NoDetection => 3,
        }
    }
}

fn validation(message: impl std::fmt::Display) -> CliError {
    CliError::Validation(message.to_string())
}

/// Loads and validates a web configuration from JSON.
pub fn load_web_config(path: &Path) -> Result<WebConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    let config: WebConfig = serde_json::from_str(&text)
        .map_err(|e| validation(format!("{}: {e}", path.display())))?;
    let issues = weavesense_core::web::validate_config(&config);
    if !issues.is_empty() {
        let joined = issues
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(validation(format!("{}: {joined}", path.display())));
    }
    Ok(config)
}

/// A scenario file: the event list and reproducibility parameters. The
/// web configuration travels in its own file and the two are combined at
/// load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub events: Vec<PluckEvent>,
    pub duration_s: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_scales: Option<BTreeMap<usize, f64>>,
}

impl ScenarioFile {
    pub fn into_scenario(self, config: WebConfig) -> SimScenario {
        SimScenario {
            config,
            events: self.events,
            duration_s: self.duration_s,
            seed: self.seed,
            failure_scales: self.failure_scales,
        }
    }
}

/// Loads a scenario file from JSON.
pub fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| validation(format!("{}: {e}", path.display())))
}

/// Hex SHA-256 of the canonical JSON encoding of a configuration; stamped
/// into event-log records so results stay traceable to their calibration.
pub fn config_hash(config: &WebConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("configs always serialize");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        write!(hex, "{byte:02x}").expect("writing to a string");
    }
    hex
}

// ---------------------------------------------------------------------------
// Trace files
// ---------------------------------------------------------------------------

const TRACE_MAGIC: &str = "# weavesense-trace v1";
const TRACE_COLUMNS: &str = "time_s,ch0_v,ch1_v,ch2_v,ch3_v,ch4_v,ch5_v";
/// Relative tolerance on the uniformity of the time column.
const TIME_SPACING_REL_TOL: f64 = 1e-9;

/// Writes a trace as CSV with a commented header.
pub fn write_trace<W: Write>(writer: &mut W, trace: &TraceSet) -> Result<(), CliError> {
    writeln!(writer, "{TRACE_MAGIC}")?;
    writeln!(writer, "# sample_rate_hz={}", trace.sample_rate_hz)?;
    writeln!(writer, "# channel_count={FIBER_COUNT}")?;
    writeln!(writer, "# t0_offset_s={}", trace.t0_offset_s)?;
    writeln!(writer, "{TRACE_COLUMNS}")?;
    let mut line = String::new();
    for i in 0..trace.len() {
        line.clear();
        write!(line, "{}", trace.time_at(i)).expect("writing to a string");
        for channel in &trace.channels {
            write!(line, ",{}", channel[i]).expect("writing to a string");
        }
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Writes a trace to a file path.
pub fn write_trace_file(path: &Path, trace: &TraceSet) -> Result<(), CliError> {
    let mut writer = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_trace(&mut writer, trace)?;
    writer.flush()?;
    Ok(())
}

/// Header metadata of a trace file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceHeader {
    pub sample_rate_hz: f64,
    pub channel_count: usize,
    pub t0_offset_s: f64,
}

/// Parses the commented header and the column line, consuming them from
/// `lines`. Used by both the whole-file reader and the streaming mode.
pub fn parse_trace_header<I>(lines: &mut I) -> Result<TraceHeader, CliError>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    let magic = next_line(lines)?;
    if magic.trim() != TRACE_MAGIC {
        return Err(validation(format!(
            "not a trace file: expected `{TRACE_MAGIC}`, found `{magic}`"
        )));
    }
    let sample_rate_hz = header_field(lines, "sample_rate_hz")?;
    let channel_count = header_field(lines, "channel_count")? as usize;
    let t0_offset_s = header_field(lines, "t0_offset_s")?;
    let columns = next_line(lines)?;
    if columns.trim() != TRACE_COLUMNS {
        return Err(validation(format!(
            "unexpected column header `{}`",
            columns.trim()
        )));
    }
    if channel_count != FIBER_COUNT {
        return Err(validation(format!(
            "channel_count must be {FIBER_COUNT}, found {channel_count}"
        )));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(validation("sample_rate_hz must be > 0".to_string()));
    }
    Ok(TraceHeader {
        sample_rate_hz,
        channel_count,
        t0_offset_s,
    })
}

fn next_line<I>(lines: &mut I) -> Result<String, CliError>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    match lines.next() {
        Some(line) => Ok(line?),
        None => Err(validation("unexpected end of trace header")),
    }
}

fn header_field<I>(lines: &mut I, name: &str) -> Result<f64, CliError>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    let line = next_line(lines)?;
    let rest = line
        .trim()
        .strip_prefix("# ")
        .and_then(|r| r.strip_prefix(name))
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| validation(format!("expected header field `{name}`, found `{line}`")))?;
    rest.parse::<f64>()
        .map_err(|e| validation(format!("header field `{name}`: {e}")))
}

/// Parses one data row into a timestamp and six channel voltages.
pub fn parse_trace_row(line: &str) -> Result<(f64, [f64; FIBER_COUNT]), CliError> {
    let mut fields = line.trim().split(',');
    let time = fields
        .next()
        .ok_or_else(|| validation("empty trace row"))?
        .parse::<f64>()
        .map_err(|e| validation(format!("bad time value in row `{line}`: {e}")))?;
    let mut values = [0.0; FIBER_COUNT];
    for (c, slot) in values.iter_mut().enumerate() {
        let field = fields
            .next()
            .ok_or_else(|| validation(format!("row `{line}` holds fewer than 7 fields")))?;
        *slot = field
            .parse::<f64>()
            .map_err(|e| validation(format!("bad channel {c} value in row `{line}`: {e}")))?;
    }
    if fields.next().is_some() {
        return Err(validation(format!("row `{line}` holds more than 7 fields")));
    }
    Ok((time, values))
}

/// Reads and validates a complete trace file: header, six equal-length
/// channels, and a monotone, uniformly spaced time column.
pub fn read_trace<R: BufRead>(reader: R) -> Result<TraceSet, CliError> {
    let mut lines = reader.lines();
    let header = parse_trace_header(&mut lines)?;

    let mut channels: [Vec<f64>; FIBER_COUNT] = Default::default();
    let mut previous_time = None;
    let dt = 1.0 / header.sample_rate_hz;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (time, values) = parse_trace_row(&line)?;
        if let Some(prev) = previous_time {
            let spacing: f64 = time - prev;
            if (spacing - dt).abs() > TIME_SPACING_REL_TOL * dt {
                return Err(validation(format!(
                    "time column not uniformly spaced: step {spacing} at t={time}, expected {dt}"
                )));
            }
        }
        previous_time = Some(time);
        for (channel, value) in channels.iter_mut().zip(values) {
            channel.push(value);
        }
    }

    let samples = channels[0].len();
    let trace = TraceSet {
        sample_rate_hz: header.sample_rate_hz,
        t0_offset_s: header.t0_offset_s,
        duration_s: samples as f64 / header.sample_rate_hz,
        channels,
    };
    trace.validate().map_err(validation)?;
    Ok(trace)
}

/// Reads a trace from a file path.
pub fn read_trace_file(path: &Path) -> Result<TraceSet, CliError> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    read_trace(reader)
}

// ---------------------------------------------------------------------------
// Event log
// ---------------------------------------------------------------------------

/// One line of the event log: a localization result plus the metadata
/// needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    #[serde(flatten)]
    pub result: LocalizationResult,
    /// Scenario seed, when the trace came from the simulator.
    pub seed: Option<u64>,
    /// SHA-256 of the configuration used for processing.
    pub config_sha256: String,
}

impl EventRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, CliError> {
        serde_json::from_str(line).map_err(|e| validation(format!("bad event record: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Study CSV export
// ---------------------------------------------------------------------------

fn ordered_keys<'a>(maps: impl Iterator<Item = &'a BTreeMap<String, f64>>) -> Vec<String> {
    let mut keys: Vec<String> = Vec::new();
    for map in maps {
        for key in map.keys() {
            if !keys.contains(key) {
                keys.push(key.clone());
            }
        }
    }
    keys
}

/// Writes the raw per-trial rows: one row per trial with the study name,
/// trial index, factor columns and metric columns.
pub fn write_study_raw_csv<W: Write>(writer: &mut W, study: &StudyResult) -> Result<(), CliError> {
    let factors = ordered_keys(study.trials.iter().map(|t| &t.factors));
    let metrics = ordered_keys(study.trials.iter().map(|t| &t.metrics));
    let mut header = String::from("study,trial");
    for key in factors.iter().chain(metrics.iter()) {
        write!(header, ",{key}").expect("writing to a string");
    }
    writeln!(writer, "{header}")?;
    for trial in &study.trials {
        let mut row = format!("{},{}", study.study_name, trial.trial);
        for key in &factors {
            match trial.factors.get(key) {
                Some(v) => write!(row, ",{v}").expect("writing to a string"),
                None => row.push(','),
            }
        }
        for key in &metrics {
            match trial.metrics.get(key) {
                Some(v) => write!(row, ",{v}").expect("writing to a string"),
                None => row.push(','),
            }
        }
        writeln!(writer, "{row}")?;
    }
    Ok(())
}

/// Writes the per-level summary rows; when the study ran an ANOVA its F
/// statistic and p-value repeat on every row.
pub fn write_study_summary_csv<W: Write>(
    writer: &mut W,
    study: &StudyResult,
) -> Result<(), CliError> {
    writeln!(writer, "study,factor,level,metric,n,mean,sd,anova_f,anova_p")?;
    for summary in &study.summaries {
        let (f, p) = match &study.anova {
            Some(a) => (a.f_statistic.to_string(), a.p_value.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{f},{p}",
            study.study_name,
            summary.factor,
            summary.level,
            summary.metric,
            summary.n,
            summary.mean,
            summary.sd
        )?;
    }
    Ok(())
}

/// Derives the summary CSV path from the raw path: `x.csv` becomes
/// `x.summary.csv`.
pub fn summary_path(raw: &Path) -> std::path::PathBuf {
    match raw.extension().and_then(|e| e.to_str()) {
        Some(ext) => raw.with_extension(format!("summary.{ext}")),
        None => raw.with_extension("summary.csv"),
    }
}
