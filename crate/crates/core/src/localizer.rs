//! Impulse detection and localization over a six-channel trace: threshold
//! trigger, bounded collection window, per-channel first peaks, time
//! deltas, and the localization rules including the single-failure
//! inference branch.
//!
//! The pipeline is stateless and deterministic: the same trace, training
//! statistics and configuration always produce the same result. Streaming
//! wrappers own buffering and re-arming; they reuse the same extraction
//! path so offline and live processing agree sample for sample.

use crate::dsp::{estimate_baseline_noise, first_peak, DspError, PeakParams};
use crate::sim::TraceSet;
use crate::web::{midpoint_fiber, ring_distance, FIBER_COUNT};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LocalizerError {
    #[error("no peaks detected on any channel")]
    NoPeaks,
    #[error("capture truncated: window [{start}, {end}) exceeds trace length {len}")]
    TruncatedCapture {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// Detector and localization tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    /// Trigger when any channel deviates from its baseline by more than
    /// `threshold_k` times its noise standard deviation.
    pub threshold_k: f64,
    /// Samples collected from the trigger onward for peak extraction.
    pub window_samples: usize,
    /// Two peaks closer than this are treated as simultaneous.
    pub simultaneity_s: f64,
    /// Expected neighbor-peak delay band `[low, high]` in seconds.
    pub neighbor_delay_band_s: [f64; 2],
    /// Peak acceptance thresholds for the extraction stage.
    pub peak_params: PeakParams,
    /// Streaming wrappers ignore new threshold crossings for this long
    /// after a capture, so a ringing fiber does not retrigger.
    pub rearm_guard_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold_k: 5.0,
            window_samples: 100,
            simultaneity_s: 0.0035,
            neighbor_delay_band_s: [0.003, 0.007],
            peak_params: PeakParams::default(),
            rearm_guard_s: 0.05,
        }
    }
}

/// How the plucked fiber was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalizationMode {
    /// The earliest peak sits on the plucked fiber itself.
    Direct,
    /// Two simultaneous peaks on fibers at ring distance two implicate
    /// the silent fiber between them.
    Inferred,
    /// No trigger, or no qualifying peak inside the window.
    None,
}

/// Per-channel baseline and noise level, estimated from training data or
/// a quiet trace prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub baselines: [f64; FIBER_COUNT],
    pub noise_stds: [f64; FIBER_COUNT],
}

impl TrainingStats {
    /// Estimates the statistics from the first `window_samples` of every
    /// channel, which must precede any event.
    pub fn from_quiet_prefix(traces: &TraceSet, window_samples: usize) -> Result<Self, DspError> {
        let mut baselines = [0.0; FIBER_COUNT];
        let mut noise_stds = [0.0; FIBER_COUNT];
        for (c, channel) in traces.channels.iter().enumerate() {
            let (baseline, noise) = estimate_baseline_noise(channel, 0..window_samples)?;
            baselines[c] = baseline;
            noise_stds[c] = noise;
        }
        Ok(Self {
            baselines,
            noise_stds,
        })
    }
}

/// The full outcome of one detection pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    /// Time of the first threshold crossing; absent when nothing fired.
    pub trigger_time_s: Option<f64>,
    /// Channel that crossed first (lowest index on a tie).
    pub trigger_channel: Option<usize>,
    /// Per-channel first-peak times in seconds; `null` marks a channel
    /// with no qualifying peak in the window.
    pub first_peak_times_s: [Option<f64>; FIBER_COUNT],
    /// Peak times relative to the earliest detected peak; exactly one
    /// entry is zero whenever any peak exists.
    pub deltas_s: [Option<f64>; FIBER_COUNT],
    /// The localized fiber, when one was determined.
    pub fiber: Option<usize>,
    pub mode: LocalizationMode,
    /// Set when the rules could not separate the candidates cleanly and
    /// the earliest channel was reported as a best guess.
    pub fallback: bool,
}

impl LocalizationResult {
    fn empty() -> Self {
        Self {
            trigger_time_s: None,
            trigger_channel: None,
            first_peak_times_s: [None; FIBER_COUNT],
            deltas_s: [None; FIBER_COUNT],
            fiber: None,
            mode: LocalizationMode::None,
            fallback: false,
        }
    }
}

/// Earliest sample at which any channel leaves its noise band, as
/// `(time, channel)`. Ties at the same sample go to the lowest channel.
pub fn detect_trigger(
    traces: &TraceSet,
    training: &TrainingStats,
    config: &DetectorConfig,
) -> Option<(f64, usize)> {
    let thresholds: Vec<f64> = training
        .noise_stds
        .iter()
        .map(|&s| config.threshold_k * s)
        .collect();
    for i in 0..traces.len() {
        for c in 0..FIBER_COUNT {
            if (traces.channels[c][i] - training.baselines[c]).abs() > thresholds[c] {
                return Some((traces.time_at(i), c));
            }
        }
    }
    None
}

/// Runs first-peak extraction on every baseline-removed channel over the
/// closed-open window `[trigger, trigger + window_samples)`.
pub fn collect_and_extract(
    traces: &TraceSet,
    trigger_time_s: f64,
    training: &TrainingStats,
    config: &DetectorConfig,
) -> Result<[Option<f64>; FIBER_COUNT], LocalizerError> {
    let fs = traces.sample_rate_hz;
    let start = ((trigger_time_s - traces.t0_offset_s) * fs).round() as usize;
    let end = start + config.window_samples;
    if end > traces.len() {
        return Err(LocalizerError::TruncatedCapture {
            start,
            end,
            len: traces.len(),
        });
    }

    let mut times = [None; FIBER_COUNT];
    for c in 0..FIBER_COUNT {
        let signal: Vec<f64> = traces.channels[c]
            .iter()
            .map(|&v| v - training.baselines[c])
            .collect();
        let peak = first_peak(&signal, fs, start, config.window_samples, &config.peak_params)?;
        times[c] = peak.map(|p| traces.t0_offset_s + p.index as f64 / fs);
    }
    Ok(times)
}

/// Subtracts the earliest present peak time from every other; `None`
/// entries propagate. Errors when every entry is missing.
pub fn compute_deltas(
    first_peak_times: &[Option<f64>; FIBER_COUNT],
) -> Result<[Option<f64>; FIBER_COUNT], LocalizerError> {
    let earliest = first_peak_times
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !earliest.is_finite() {
        return Err(LocalizerError::NoPeaks);
    }
    Ok(first_peak_times.map(|t| t.map(|t| t - earliest)))
}

/// Applies the localization rules to the time deltas.
///
/// 1. The channels with deltas inside the simultaneity tolerance form the
///    earliest set.
/// 2. A lone earliest channel whose detected neighbors include one inside
///    the expected delay band (or whose neighbors are all silent) is the
///    plucked fiber: direct localization.
/// 3. Exactly two simultaneous channels at ring distance two implicate
///    the fiber between them: inferred localization.
/// 4. Anything else falls back to the earliest channel with the
///    `fallback` flag raised.
pub fn localize(
    deltas: &[Option<f64>; FIBER_COUNT],
    config: &DetectorConfig,
) -> Result<(usize, LocalizationMode, bool), LocalizerError> {
    let present: Vec<(usize, f64)> = deltas
        .iter()
        .enumerate()
        .filter_map(|(c, d)| d.map(|d| (c, d)))
        .collect();
    let &(minimum_channel, _) = present
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(LocalizerError::NoPeaks)?;

    let earliest: Vec<usize> = present
        .iter()
        .filter(|&&(_, d)| d < config.simultaneity_s)
        .map(|&(c, _)| c)
        .collect();

    if earliest.len() == 1 {
        let m = minimum_channel;
        let [low, high] = config.neighbor_delay_band_s;
        let neighbor_deltas: Vec<f64> = [(m + 1) % FIBER_COUNT, (m + FIBER_COUNT - 1) % FIBER_COUNT]
            .iter()
            .filter_map(|&n| deltas[n])
            .collect();
        let supported = neighbor_deltas.is_empty()
            || neighbor_deltas.iter().any(|&d| (low..=high).contains(&d));
        return Ok((m, LocalizationMode::Direct, !supported));
    }

    if earliest.len() == 2 {
        let (i, j) = (earliest[0], earliest[1]);
        if ring_distance(i, j).expect("channel indices are in range") == 2 {
            let fiber = midpoint_fiber(i, j)
                .expect("indices in range")
                .expect("ring distance checked");
            return Ok((fiber, LocalizationMode::Inferred, false));
        }
    }

    Ok((minimum_channel, LocalizationMode::Direct, true))
}

/// Full pass: trigger, collect, deltas, localize.
///
/// Returns a result with `mode == none` when no channel ever crosses its
/// threshold, or when the window after a crossing holds no qualifying
/// peak. Truncated captures (the window running off the end of the
/// trace) surface as errors so callers can capture a longer tail.
pub fn run_pipeline(
    traces: &TraceSet,
    training: &TrainingStats,
    config: &DetectorConfig,
) -> Result<LocalizationResult, LocalizerError> {
    let Some((trigger_time_s, trigger_channel)) = detect_trigger(traces, training, config) else {
        return Ok(LocalizationResult::empty());
    };

    let mut result = LocalizationResult {
        trigger_time_s: Some(trigger_time_s),
        trigger_channel: Some(trigger_channel),
        ..LocalizationResult::empty()
    };

    result.first_peak_times_s = collect_and_extract(traces, trigger_time_s, training, config)?;
    match compute_deltas(&result.first_peak_times_s) {
        Ok(deltas) => result.deltas_s = deltas,
        // A crossing with no qualifying peak reports "nothing localized"
        // rather than failing the pass.
        Err(LocalizerError::NoPeaks) => return Ok(result),
        Err(e) => return Err(e),
    }
    let (fiber, mode, fallback) = localize(&result.deltas_s, config)?;
    result.fiber = Some(fiber);
    result.mode = mode;
    result.fallback = fallback;
    Ok(result)
}
