//! Simulation and real-time signal processing for a six-waveguide
//! vibration-sensing web.
//!
//! The library models a ring of six tensioned optical waveguides coupled
//! by a passive spiral thread. A pluck on one fiber rings that fiber at
//! its fundamental and leaks a delayed, attenuated copy into its
//! neighbors; photodiodes read the oscillating transmission losses as
//! voltage traces. On top of the synthetic traces sits the same
//! detection stack a live deployment would run: baseline and noise
//! training, a threshold trigger, windowed first-peak extraction,
//! time-delta computation, and localization that survives a dead
//! channel by reading the two simultaneous neighbor peaks around it.
//!
//! Modules:
//! - [`web`]: domain types, ring topology, the string frequency law,
//!   configuration validation.
//! - [`sim`]: deterministic seeded trace synthesis.
//! - [`dsp`]: baseline/noise estimation, peak finding, spectrum-based
//!   frequency estimation.
//! - [`localizer`]: trigger, collection window, deltas, localization.
//! - [`characterize`]: the single-fiber studies, delay statistics and
//!   one-way ANOVA.
//! - [`stats`]: the special functions behind the ANOVA p-values.

pub mod characterize;
pub mod dsp;
pub mod localizer;
pub mod sim;
pub mod stats;
pub mod web;

pub use characterize::{anova_one_way, measure_neighbor_delay, StudyResult};
pub use dsp::{estimate_baseline_noise, estimate_natural_frequency, find_peaks, first_peak};
pub use localizer::{
    collect_and_extract, compute_deltas, detect_trigger, localize, run_pipeline, DetectorConfig,
    LocalizationMode, LocalizationResult, TrainingStats,
};
pub use sim::{
    break_angle_gain, fiber_response, sample_coupling_delay, synthesize, SimScenario, TraceSet,
};
pub use web::{
    midpoint_fiber, natural_frequency, ring_distance, validate_config, FiberParams, PluckEvent,
    WebConfig, FIBER_COUNT,
};
