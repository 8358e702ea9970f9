//! `weavesense`: simulate pluck traces, localize impulses offline,
//! reproduce the characterization studies, and process live sample
//! streams.
//!
//! Exit codes are a stable contract: 0 success, 1 I/O failure,
//! 2 validation failure, 3 no detection.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weavesense_cli::formats::{
    self, config_hash, load_scenario, load_web_config, summary_path, CliError, EventRecord,
};
use weavesense_cli::stream::StreamProcessor;
use weavesense_core::characterize::{
    run_break_angle_study, run_delay_study, run_impulse_study, run_position_study,
    run_tension_study, StudyResult,
};
use weavesense_core::dsp::MIN_QUIET_WINDOW;
use weavesense_core::localizer::{run_pipeline, DetectorConfig, LocalizationMode, TrainingStats};
use weavesense_core::sim::synthesize;

#[derive(Parser)]
#[command(
    name = "weavesense",
    about = "Six-waveguide vibration-sensing web: simulation, localization, studies, streaming",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a trace file from a configuration and a scenario.
    Simulate {
        /// Web configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Scenario JSON (events, duration, seed, failure scales).
        #[arg(long)]
        scenario: PathBuf,
        /// Output trace CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Detect and localize the first impulse in a trace file.
    Localize {
        /// Input trace CSV.
        trace: PathBuf,
        /// Web configuration JSON (for provenance hashing).
        #[arg(long)]
        config: PathBuf,
        /// Quiet prefix used to train baselines, in seconds.
        #[arg(long, default_value_t = 0.04)]
        training_window: f64,
    },
    /// Run a characterization study and export raw + summary CSV.
    Characterize {
        /// Which study to run.
        #[arg(long)]
        study: StudyName,
        /// Web configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Raw CSV output path; the summary lands next to it.
        #[arg(long)]
        out: PathBuf,
        /// Trials per factor level (total plucks for the delay study).
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Master seed for the study.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Process trace rows from standard input, emitting one event-log
    /// line per detected impulse.
    Stream {
        /// Web configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Quiet prefix used to train baselines, in seconds.
        #[arg(long, default_value_t = 0.04)]
        training_window: f64,
        /// Seconds to ignore new crossings after each capture.
        #[arg(long, default_value_t = 0.05)]
        rearm_guard: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyName {
    #[value(name = "break-angle")]
    BreakAngle,
    Tension,
    Position,
    Impulse,
    Delay,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("WEAVESENSE_LOG")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weavesense: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            config,
            scenario,
            out,
            seed,
        } => cmd_simulate(&config, &scenario, &out, seed),
        Command::Localize {
            trace,
            config,
            training_window,
        } => cmd_localize(&trace, &config, training_window),
        Command::Characterize {
            study,
            config,
            out,
            trials,
            seed,
        } => cmd_characterize(study, &config, &out, trials, seed),
        Command::Stream {
            config,
            training_window,
            rearm_guard,
        } => cmd_stream(&config, training_window, rearm_guard),
    }
}

fn cmd_simulate(
    config_path: &std::path::Path,
    scenario_path: &std::path::Path,
    out_path: &std::path::Path,
    seed_override: Option<u64>,
) -> Result<(), CliError> {
    let config = load_web_config(config_path)?;
    let mut scenario = load_scenario(scenario_path)?.into_scenario(config);
    if let Some(seed) = seed_override {
        scenario.seed = seed;
    }
    let trace = synthesize(&scenario).map_err(|e| CliError::Validation(e.to_string()))?;
    formats::write_trace_file(out_path, &trace)?;
    log::info!(
        "wrote {} samples x 6 channels to {}",
        trace.len(),
        out_path.display()
    );
    Ok(())
}

fn training_samples(training_window_s: f64, sample_rate_hz: f64) -> Result<usize, CliError> {
    let samples = (training_window_s * sample_rate_hz).round() as usize;
    if samples < MIN_QUIET_WINDOW {
        return Err(CliError::Validation(format!(
            "training window of {samples} samples is shorter than the required {MIN_QUIET_WINDOW}"
        )));
    }
    Ok(samples)
}

fn cmd_localize(
    trace_path: &std::path::Path,
    config_path: &std::path::Path,
    training_window_s: f64,
) -> Result<(), CliError> {
    let config = load_web_config(config_path)?;
    let trace = formats::read_trace_file(trace_path)?;
    let samples = training_samples(training_window_s, trace.sample_rate_hz)?;
    let training = TrainingStats::from_quiet_prefix(&trace, samples)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let detector = DetectorConfig::default();
    let result =
        run_pipeline(&trace, &training, &detector).map_err(|e| CliError::Validation(e.to_string()))?;
    let detected = result.mode != LocalizationMode::None;
    let record = EventRecord {
        result,
        seed: None,
        config_sha256: config_hash(&config),
    };
    println!("{}", record.to_json_line());
    if detected {
        Ok(())
    } else {
        Err(CliError::NoDetection)
    }
}

fn cmd_characterize(
    study: StudyName,
    config_path: &std::path::Path,
    out_path: &std::path::Path,
    trials: usize,
    seed: u64,
) -> Result<(), CliError> {
    let config = load_web_config(config_path)?;
    let result: StudyResult = match study {
        StudyName::BreakAngle => run_break_angle_study(&config, &[0.0, 20.0, 40.0], trials, seed),
        StudyName::Tension => run_tension_study(&config, &[50.0, 100.0, 150.0], trials, seed),
        StudyName::Position => run_position_study(&config, &[0.5, 0.25], trials, seed),
        StudyName::Impulse => run_impulse_study(&config, &[50.0, 75.0, 100.0], trials, seed),
        StudyName::Delay => run_delay_study(&config, trials, seed),
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;

    let mut raw = std::io::BufWriter::new(std::fs::File::create(out_path)?);
    formats::write_study_raw_csv(&mut raw, &result)?;
    raw.flush()?;

    let summary = summary_path(out_path);
    let mut writer = std::io::BufWriter::new(std::fs::File::create(&summary)?);
    formats::write_study_summary_csv(&mut writer, &result)?;
    writer.flush()?;

    log::info!(
        "{}: {} trials -> {} + {}",
        result.study_name,
        result.trials.len(),
        out_path.display(),
        summary.display()
    );
    Ok(())
}

fn cmd_stream(
    config_path: &std::path::Path,
    training_window_s: f64,
    rearm_guard_s: f64,
) -> Result<(), CliError> {
    let config = load_web_config(config_path)?;
    let hash = config_hash(&config);
    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout();
    let mut lines = stdin.lines();

    let header = formats::parse_trace_header(&mut lines)?;
    let samples = training_samples(training_window_s, header.sample_rate_hz)?;
    let detector = DetectorConfig {
        rearm_guard_s,
        ..DetectorConfig::default()
    };
    let mut processor = StreamProcessor::new(header, detector, samples);

    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (_, values) = match formats::parse_trace_row(&line) {
            Ok(row) => row,
            Err(e) => {
                log::warn!("skipping malformed row: {e}");
                eprintln!("weavesense: warning: skipping malformed row: {e}");
                continue;
            }
        };
        if let Some(result) = processor.push_row(values)? {
            let record = EventRecord {
                result,
                seed: None,
                config_sha256: hash.clone(),
            };
            let mut out = stdout.lock();
            writeln!(out, "{}", record.to_json_line())?;
            out.flush()?;
        }
    }
    if let Some(warning) = processor.finish() {
        log::warn!("{warning}");
        eprintln!("weavesense: warning: {warning}");
    }
    Ok(())
}
