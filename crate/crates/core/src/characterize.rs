//! Experiment harness for the single-fiber characterization studies and
//! the full-web delay statistics: break-angle gain and dispersion, the
//! tension/frequency law, pluck-position amplitude dependence, the
//! impulse-strength null (with a one-way ANOVA), and the neighbor
//! propagation delay.
//!
//! Each study drives the simulator through a fixed protocol, measures the
//! responses with the same signal-processing used by the live pipeline,
//! and reports both per-trial raw rows and per-level summaries so results
//! can be exported and analyzed offline.

use crate::dsp::{estimate_natural_frequency, first_peak};
use crate::localizer::{run_pipeline, DetectorConfig, LocalizerError, TrainingStats};
use crate::sim::{derive_seed, synthesize, SimError, SimScenario, TraceSet};
use crate::stats::f_distribution_sf;
use crate::web::{PluckEvent, WebConfig, FIBER_COUNT};
use crate::dsp::DspError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Ring position of the fiber exercised by the single-fiber studies.
const STUDY_FIBER: usize = 0;
/// Pluck onset inside each study trace, seconds.
const STUDY_ONSET_S: f64 = 0.05;
/// Study trace length: leaves 4096 samples after the onset at 10 kHz for
/// the spectrum estimate.
const STUDY_DURATION_S: f64 = 0.5;
/// Samples used to estimate the per-channel baseline and noise.
const TRAINING_SAMPLES: usize = 400;
/// Samples scanned for the first peak after the onset.
const PEAK_WINDOW_SAMPLES: usize = 100;
/// Samples handed to the spectrum estimate.
const SPECTRUM_SAMPLES: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum StudyError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate groups: zero variance everywhere")]
    DegenerateGroups,
    #[error("measurement failed: {0}")]
    Measurement(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Localizer(#[from] LocalizerError),
}

/// One simulated experiment: the varied factors and measured metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub factors: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
}

/// Mean and spread of one metric at one factor level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub factor: String,
    pub level: f64,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub p_value: f64,
    pub df_between: usize,
    pub df_within: usize,
}

/// Raw rows plus per-level summaries for one study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub study_name: String,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<LevelSummary>,
    /// Present for studies that pool levels into a hypothesis test.
    pub anova: Option<AnovaResult>,
}

impl StudyResult {
    /// Metric values at one factor level, in trial order.
    pub fn metric_at_level(&self, factor: &str, level: f64, metric: &str) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.factors.get(factor) == Some(&level))
            .filter_map(|t| t.metrics.get(metric).copied())
            .collect()
    }

    /// Summary row for one (factor level, metric) pair.
    pub fn summary_for(&self, level: f64, metric: &str) -> Option<&LevelSummary> {
        self.summaries
            .iter()
            .find(|s| s.level == level && s.metric == metric)
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.max(0.0).sqrt())
}

fn summarize(trials: &[TrialRecord], factor: &str) -> Vec<LevelSummary> {
    let mut levels: Vec<f64> = Vec::new();
    for t in trials {
        if let Some(&level) = t.factors.get(factor) {
            if !levels.contains(&level) {
                levels.push(level);
            }
        }
    }
    let mut metrics: Vec<&str> = Vec::new();
    for t in trials {
        for name in t.metrics.keys() {
            if !metrics.contains(&name.as_str()) {
                metrics.push(name);
            }
        }
    }
    let mut summaries = Vec::new();
    for &level in &levels {
        for &metric in &metrics {
            let values: Vec<f64> = trials
                .iter()
                .filter(|t| t.factors.get(factor) == Some(&level))
                .filter_map(|t| t.metrics.get(metric).copied())
                .collect();
            if values.is_empty() {
                continue;
            }
            let (mean, sd) = mean_sd(&values);
            summaries.push(LevelSummary {
                factor: factor.to_string(),
                level,
                metric: metric.to_string(),
                n: values.len(),
                mean,
                sd,
            });
        }
    }
    summaries
}

/// Classical one-way analysis of variance.
///
/// Returns `(F, p)` with `F = (SS_between/df_between) / (SS_within/df_within)`
/// and the p-value from the F-distribution survival function. Groups with
/// no within-group scatter but separated means drive `F` to infinity with
/// `p = 0`; fully constant data yields `F = 0`, `p = 1`.
pub fn anova_one_way(groups: &[Vec<f64>]) -> Result<(f64, f64), StudyError> {
    if groups.len() < 2 {
        return Err(StudyError::InsufficientData(
            "ANOVA needs at least two groups".to_string(),
        ));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(StudyError::InsufficientData(
            "every ANOVA group needs at least one sample".to_string(),
        ));
    }
    let total_n: usize = groups.iter().map(|g| g.len()).sum();
    let k = groups.len();
    if total_n <= k {
        return Err(StudyError::InsufficientData(format!(
            "within-group degrees of freedom must be >= 1 (n = {total_n}, groups = {k})"
        )));
    }

    let grand_mean = groups.iter().flatten().sum::<f64>() / total_n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for group in groups {
        let mean = group.iter().sum::<f64>() / group.len() as f64;
        ss_between += group.len() as f64 * (mean - grand_mean) * (mean - grand_mean);
        ss_within += group.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    }

    let df_between = (k - 1) as f64;
    let df_within = (total_n - k) as f64;
    if ss_within == 0.0 {
        return if ss_between == 0.0 {
            Ok((0.0, 1.0))
        } else {
            Ok((f64::INFINITY, 0.0))
        };
    }
    let f = (ss_between / df_between) / (ss_within / df_within);
    Ok((f, f_distribution_sf(f, df_between, df_within)))
}

/// One simulated single-fiber trial and its measured responses.
struct TrialMeasurement {
    first_peak_amplitude_v: f64,
    natural_frequency_hz: f64,
}

fn run_single_fiber_trial(config: WebConfig, weight_g: f64, position_frac: f64, seed: u64)
    -> Result<TrialMeasurement, StudyError>
{
    let scenario = SimScenario {
        config,
        events: vec![PluckEvent {
            fiber: STUDY_FIBER,
            onset_s: STUDY_ONSET_S,
            position_frac,
            impulse_weight_g: weight_g,
        }],
        duration_s: STUDY_DURATION_S,
        seed,
        failure_scales: None,
    };
    let trace = synthesize(&scenario)?;
    let training = TrainingStats::from_quiet_prefix(&trace, TRAINING_SAMPLES)?;

    let fs = trace.sample_rate_hz;
    let onset_index = (STUDY_ONSET_S * fs).round() as usize;
    let signal: Vec<f64> = trace.channels[STUDY_FIBER]
        .iter()
        .map(|&v| v - training.baselines[STUDY_FIBER])
        .collect();

    let peak = first_peak(
        &signal,
        fs,
        onset_index,
        PEAK_WINDOW_SAMPLES,
        &DetectorConfig::default().peak_params,
    )?
    .ok_or_else(|| {
        StudyError::Measurement("no first peak inside the collection window".to_string())
    })?;

    let spectrum_slice = &signal[onset_index..onset_index + SPECTRUM_SAMPLES];
    let frequency = estimate_natural_frequency(spectrum_slice, fs)?;

    Ok(TrialMeasurement {
        first_peak_amplitude_v: peak.amplitude_v,
        natural_frequency_hz: frequency,
    })
}

fn study_fiber_mut(config: &mut WebConfig) -> &mut crate::web::FiberParams {
    config
        .fibers
        .iter_mut()
        .find(|f| f.index == STUDY_FIBER)
        .expect("six-fiber configuration")
}

/// Plucks the study fiber at a range of break angles and records the
/// first-peak amplitude and the estimated natural frequency per trial.
pub fn run_break_angle_study(
    config_template: &WebConfig,
    angles: &[f64],
    trials: usize,
    seed: u64,
) -> Result<StudyResult, StudyError> {
    require_trials(trials)?;
    let mut records = Vec::new();
    for (level_index, &angle) in angles.iter().enumerate() {
        for trial in 0..trials {
            let mut config = config_template.clone();
            study_fiber_mut(&mut config).break_angle_deg = angle;
            let m = run_single_fiber_trial(
                config,
                50.0,
                0.5,
                derive_seed(seed, &[level_index as u64, trial as u64]),
            )?;
            records.push(TrialRecord {
                trial,
                factors: BTreeMap::from([(String::from("break_angle_deg"), angle)]),
                metrics: BTreeMap::from([
                    (String::from("first_peak_amplitude_v"), m.first_peak_amplitude_v),
                    (String::from("natural_frequency_hz"), m.natural_frequency_hz),
                ]),
            });
        }
    }
    let summaries = summarize(&records, "break_angle_deg");
    Ok(StudyResult {
        study_name: "break-angle".to_string(),
        trials: records,
        summaries,
        anova: None,
    })
}

/// Retensions the study fiber per level and records the estimated natural
/// frequency (and first-peak amplitude) per trial.
pub fn run_tension_study(
    config_template: &WebConfig,
    tensions_g: &[f64],
    trials: usize,
    seed: u64,
) -> Result<StudyResult, StudyError> {
    require_trials(trials)?;
    let mut records = Vec::new();
    for (level_index, &tension) in tensions_g.iter().enumerate() {
        for trial in 0..trials {
            let mut config = config_template.clone();
            study_fiber_mut(&mut config).tension_grams = tension;
            let m = run_single_fiber_trial(
                config,
                50.0,
                0.5,
                derive_seed(seed, &[level_index as u64, trial as u64]),
            )?;
            records.push(TrialRecord {
                trial,
                factors: BTreeMap::from([(String::from("tension_grams"), tension)]),
                metrics: BTreeMap::from([
                    (String::from("first_peak_amplitude_v"), m.first_peak_amplitude_v),
                    (String::from("natural_frequency_hz"), m.natural_frequency_hz),
                ]),
            });
        }
    }
    let summaries = summarize(&records, "tension_grams");
    Ok(StudyResult {
        study_name: "tension".to_string(),
        trials: records,
        summaries,
        anova: None,
    })
}

/// Plucks the study fiber at each position and records the first-peak
/// amplitude per trial.
pub fn run_position_study(
    config_template: &WebConfig,
    positions: &[f64],
    trials: usize,
    seed: u64,
) -> Result<StudyResult, StudyError> {
    require_trials(trials)?;
    if positions.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(StudyError::InsufficientData(
            "positions must lie strictly inside (0, 1)".to_string(),
        ));
    }
    let mut records = Vec::new();
    for (level_index, &position) in positions.iter().enumerate() {
        for trial in 0..trials {
            let m = run_single_fiber_trial(
                config_template.clone(),
                50.0,
                position,
                derive_seed(seed, &[level_index as u64, trial as u64]),
            )?;
            records.push(TrialRecord {
                trial,
                factors: BTreeMap::from([(String::from("position_frac"), position)]),
                metrics: BTreeMap::from([(
                    String::from("first_peak_amplitude_v"),
                    m.first_peak_amplitude_v,
                )]),
            });
        }
    }
    let summaries = summarize(&records, "position_frac");
    Ok(StudyResult {
        study_name: "position".to_string(),
        trials: records,
        summaries,
        anova: None,
    })
}

/// Plucks with a range of plucker weights and pools the first-peak
/// amplitudes into a one-way ANOVA. The response model carries no weight
/// dependence, so a large p-value is the expected outcome.
pub fn run_impulse_study(
    config_template: &WebConfig,
    weights_g: &[f64],
    trials: usize,
    seed: u64,
) -> Result<StudyResult, StudyError> {
    if weights_g.len() < 2 {
        return Err(StudyError::InsufficientData(
            "impulse study needs at least two weight levels".to_string(),
        ));
    }
    if trials < 2 {
        return Err(StudyError::InsufficientData(
            "impulse study needs at least two trials per level".to_string(),
        ));
    }
    let mut records = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for (level_index, &weight) in weights_g.iter().enumerate() {
        let mut group = Vec::with_capacity(trials);
        for trial in 0..trials {
            let m = run_single_fiber_trial(
                config_template.clone(),
                weight,
                0.5,
                derive_seed(seed, &[level_index as u64, trial as u64]),
            )?;
            group.push(m.first_peak_amplitude_v);
            records.push(TrialRecord {
                trial,
                factors: BTreeMap::from([(String::from("impulse_weight_g"), weight)]),
                metrics: BTreeMap::from([(
                    String::from("first_peak_amplitude_v"),
                    m.first_peak_amplitude_v,
                )]),
            });
        }
        groups.push(group);
    }

    let first = groups[0][0];
    if groups.iter().flatten().all(|&v| v == first) {
        return Err(StudyError::DegenerateGroups);
    }
    let (f, p) = anova_one_way(&groups)?;
    let total_n: usize = groups.iter().map(|g| g.len()).sum();
    let summaries = summarize(&records, "impulse_weight_g");
    Ok(StudyResult {
        study_name: "impulse".to_string(),
        trials: records,
        summaries,
        anova: Some(AnovaResult {
            f_statistic: f,
            p_value: p,
            df_between: groups.len() - 1,
            df_within: total_n - groups.len(),
        }),
    })
}

/// Plucks fibers round-robin, runs the live pipeline and records every
/// (neighbor first peak - plucked first peak) delay it can extract.
pub fn run_delay_study(
    config: &WebConfig,
    trials: usize,
    seed: u64,
) -> Result<StudyResult, StudyError> {
    if trials < 2 {
        return Err(StudyError::InsufficientData(
            "delay study needs at least two trials".to_string(),
        ));
    }
    let detector = DetectorConfig::default();
    let mut records = Vec::new();
    for trial in 0..trials {
        let fiber = trial % FIBER_COUNT;
        let scenario = SimScenario {
            config: config.clone(),
            events: vec![PluckEvent {
                fiber,
                onset_s: STUDY_ONSET_S,
                position_frac: 0.5,
                impulse_weight_g: 50.0,
            }],
            duration_s: 0.3,
            seed: derive_seed(seed, &[trial as u64]),
            failure_scales: None,
        };
        let trace: TraceSet = synthesize(&scenario)?;
        let training = TrainingStats::from_quiet_prefix(&trace, TRAINING_SAMPLES)?;
        let result = run_pipeline(&trace, &training, &detector)?;

        let Some(plucked_time) = result.first_peak_times_s[fiber] else {
            continue;
        };
        for neighbor in [(fiber + 1) % FIBER_COUNT, (fiber + FIBER_COUNT - 1) % FIBER_COUNT] {
            if let Some(neighbor_time) = result.first_peak_times_s[neighbor] {
                records.push(TrialRecord {
                    trial,
                    factors: BTreeMap::from([
                        (String::from("fiber"), fiber as f64),
                        (String::from("neighbor"), neighbor as f64),
                    ]),
                    metrics: BTreeMap::from([(
                        String::from("delay_s"),
                        neighbor_time - plucked_time,
                    )]),
                });
            }
        }
    }
    let summaries = summarize(&records, "fiber");
    Ok(StudyResult {
        study_name: "delay".to_string(),
        trials: records,
        summaries,
        anova: None,
    })
}

/// Mean and standard deviation of the neighbor propagation delay over
/// `trials` seeded single plucks.
pub fn measure_neighbor_delay(
    config: &WebConfig,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64), StudyError> {
    let study = run_delay_study(config, trials, seed)?;
    let delays: Vec<f64> = study
        .trials
        .iter()
        .filter_map(|t| t.metrics.get("delay_s").copied())
        .collect();
    if delays.len() < 2 {
        return Err(StudyError::InsufficientData(format!(
            "only {} neighbor delays could be extracted",
            delays.len()
        )));
    }
    Ok(mean_sd(&delays))
}

fn require_trials(trials: usize) -> Result<(), StudyError> {
    if trials < 1 {
        return Err(StudyError::InsufficientData(
            "at least one trial per level is required".to_string(),
        ));
    }
    Ok(())
}
