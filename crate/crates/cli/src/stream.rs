//! Live-acquisition emulation: rows arrive one at a time, a rolling
//! buffer holds just enough history for the capture window, and every
//! completed capture runs the same extraction and localization path as
//! offline processing.
//!
//! The processor trains its baselines on the first rows it sees, arms the
//! trigger once training completes, and after each emitted result ignores
//! further crossings for the configured re-arm guard so a still-ringing
//! fiber cannot retrigger. Times and indices are tracked in absolute
//! stream coordinates, which keeps the emitted results bit-identical to
//! offline processing of the same samples.

use std::collections::VecDeque;

use weavesense_core::dsp::{estimate_baseline_noise, first_peak};
use weavesense_core::localizer::{
    compute_deltas, localize, DetectorConfig, LocalizationResult, LocalizerError, TrainingStats,
};
use weavesense_core::web::FIBER_COUNT;

use crate::formats::{CliError, TraceHeader};

/// What a completed capture could not deliver.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamWarning {
    /// The stream ended while a capture window was still filling.
    PartialCapture { trigger_time_s: f64 },
}

impl std::fmt::Display for StreamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StreamWarning::PartialCapture { trigger_time_s } => write!(
                f,
                "stream ended mid-window after the trigger at t={trigger_time_s}; \
                 partial capture dropped"
            ),
        }
    }
}

enum Phase {
    /// Accumulating the training prefix.
    Training { collected: Vec<Vec<f64>> },
    /// Watching for a threshold crossing; crossings before `armed_at` are
    /// ignored (initial training and post-capture guard).
    Armed { armed_at: usize },
    /// A trigger fired; filling the rest of the capture window.
    Capturing {
        trigger_index: usize,
        trigger_channel: usize,
    },
}

/// Incremental detector over a row-by-row sample feed.
pub struct StreamProcessor {
    header: TraceHeader,
    config: DetectorConfig,
    training_samples: usize,
    training: Option<TrainingStats>,
    phase: Phase,
    /// Rolling history of the most recent rows, spanning at least
    /// `[trigger - 1, trigger + window]` once a capture completes.
    buffer: VecDeque<[f64; FIBER_COUNT]>,
    buffer_start: usize,
    next_index: usize,
}

impl StreamProcessor {
    pub fn new(header: TraceHeader, config: DetectorConfig, training_samples: usize) -> Self {
        let capacity = config.window_samples + 2;
        Self {
            header,
            config,
            training_samples,
            training: None,
            phase: Phase::Training {
                collected: vec![Vec::with_capacity(training_samples); FIBER_COUNT],
            },
            buffer: VecDeque::with_capacity(capacity),
            buffer_start: 0,
            next_index: 0,
        }
    }

    /// Baseline and noise statistics once training has completed.
    pub fn training_stats(&self) -> Option<&TrainingStats> {
        self.training.as_ref()
    }

    fn time_at(&self, index: usize) -> f64 {
        self.header.t0_offset_s + index as f64 / self.header.sample_rate_hz
    }

    fn push_to_buffer(&mut self, values: [f64; FIBER_COUNT]) {
        let capacity = self.config.window_samples + 2;
        if self.buffer.len() == capacity {
            self.buffer.pop_front();
            self.buffer_start += 1;
        }
        self.buffer.push_back(values);
    }

    /// Lowest channel whose deviation from baseline exceeds the trigger
    /// threshold, if any.
    fn crossing_channel(&self, values: &[f64; FIBER_COUNT]) -> Option<usize> {
        let stats = self.training.as_ref()?;
        (0..FIBER_COUNT).find(|&c| {
            (values[c] - stats.baselines[c]).abs()
                > self.config.threshold_k * stats.noise_stds[c]
        })
    }

    /// Feeds one row; returns a result when this row completes a capture.
    pub fn push_row(
        &mut self,
        values: [f64; FIBER_COUNT],
    ) -> Result<Option<LocalizationResult>, CliError> {
        let index = self.next_index;
        self.next_index += 1;
        self.push_to_buffer(values);

        match &mut self.phase {
            Phase::Training { collected } => {
                for (channel, &v) in collected.iter_mut().zip(values.iter()) {
                    channel.push(v);
                }
                if collected[0].len() >= self.training_samples {
                    let mut baselines = [0.0; FIBER_COUNT];
                    let mut noise_stds = [0.0; FIBER_COUNT];
                    for (c, channel) in collected.iter().enumerate() {
                        let (b, n) = estimate_baseline_noise(channel, 0..channel.len())
                            .map_err(|e| CliError::Validation(e.to_string()))?;
                        baselines[c] = b;
                        noise_stds[c] = n;
                    }
                    self.training = Some(TrainingStats {
                        baselines,
                        noise_stds,
                    });
                    self.phase = Phase::Armed {
                        armed_at: index + 1,
                    };
                }
                Ok(None)
            }
            Phase::Armed { armed_at } => {
                if index < *armed_at {
                    return Ok(None);
                }
                if let Some(channel) = self.crossing_channel(&values) {
                    self.phase = Phase::Capturing {
                        trigger_index: index,
                        trigger_channel: channel,
                    };
                    // A window of zero samples completes immediately.
                    return self.try_complete_capture();
                }
                Ok(None)
            }
            Phase::Capturing { .. } => self.try_complete_capture(),
        }
    }

    fn try_complete_capture(&mut self) -> Result<Option<LocalizationResult>, CliError> {
        let Phase::Capturing {
            trigger_index,
            trigger_channel,
        } = self.phase
        else {
            return Ok(None);
        };
        // Hold until the window plus one sample of right-hand context has
        // arrived, mirroring the peak extractor's neighbor comparisons.
        if self.next_index < trigger_index + self.config.window_samples + 1 {
            return Ok(None);
        }
        let result = self.extract(trigger_index, trigger_channel)?;
        let guard = (self.config.rearm_guard_s * self.header.sample_rate_hz).round() as usize;
        self.phase = Phase::Armed {
            armed_at: self.next_index + guard,
        };
        Ok(Some(result))
    }

    fn extract(
        &self,
        trigger_index: usize,
        trigger_channel: usize,
    ) -> Result<LocalizationResult, CliError> {
        let stats = self.training.as_ref().expect("capturing implies trained");
        let window = self.config.window_samples;
        let context_start = trigger_index.saturating_sub(1).max(self.buffer_start);

        let mut result = LocalizationResult {
            trigger_time_s: Some(self.time_at(trigger_index)),
            trigger_channel: Some(trigger_channel),
            first_peak_times_s: [None; FIBER_COUNT],
            deltas_s: [None; FIBER_COUNT],
            fiber: None,
            mode: weavesense_core::localizer::LocalizationMode::None,
            fallback: false,
        };

        for c in 0..FIBER_COUNT {
            let signal: Vec<f64> = (context_start..self.next_index)
                .map(|i| self.buffer[i - self.buffer_start][c] - stats.baselines[c])
                .collect();
            let peak = first_peak(
                &signal,
                self.header.sample_rate_hz,
                trigger_index - context_start,
                window,
                &self.config.peak_params,
            )
            .map_err(|e| CliError::Validation(e.to_string()))?;
            result.first_peak_times_s[c] = peak.map(|p| {
                let absolute = p.index + context_start;
                self.time_at(absolute)
            });
        }

        match compute_deltas(&result.first_peak_times_s) {
            Ok(deltas) => result.deltas_s = deltas,
            Err(LocalizerError::NoPeaks) => return Ok(result),
            Err(e) => return Err(CliError::Validation(e.to_string())),
        }
        match localize(&result.deltas_s, &self.config) {
            Ok((fiber, mode, fallback)) => {
                result.fiber = Some(fiber);
                result.mode = mode;
                result.fallback = fallback;
            }
            Err(LocalizerError::NoPeaks) => {}
            Err(e) => return Err(CliError::Validation(e.to_string())),
        }
        Ok(result)
    }

    /// Signals end of input; reports a warning when a capture was cut off.
    pub fn finish(&mut self) -> Option<StreamWarning> {
        if let Phase::Capturing { trigger_index, .. } = self.phase {
            let warning = StreamWarning::PartialCapture {
                trigger_time_s: self.time_at(trigger_index),
            };
            self.phase = Phase::Armed {
                armed_at: self.next_index,
            };
            return Some(warning);
        }
        None
    }
}
