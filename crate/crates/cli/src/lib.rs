//! File formats and streaming support behind the `weavesense` binary.
//!
//! The binary itself stays thin: command-line parsing and exit-code
//! mapping live in `main.rs`, while everything testable (trace CSV I/O,
//! config and scenario loading, event-log records, study CSV export, and
//! the incremental stream processor) lives here.

pub mod formats;
pub mod stream;

pub use formats::{
    config_hash, load_scenario, load_web_config, parse_trace_header, parse_trace_row, read_trace,
    read_trace_file, summary_path, write_study_raw_csv, write_study_summary_csv, write_trace,
    write_trace_file, CliError, EventRecord, ScenarioFile, TraceHeader,
};
pub use stream::{StreamProcessor, StreamWarning};
