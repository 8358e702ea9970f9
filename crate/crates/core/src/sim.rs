//! Deterministic synthesis of six-channel photodiode traces from pluck
//! events.
//!
//! Each pluck excites the plucked fiber as a lightly damped string at its
//! fundamental, scaled by the mode-shape factor `sin(pi * position)` and
//! the break-angle gain. The spiral thread is abstracted as a
//! delay-attenuation channel: first neighbors ring at their own natural
//! frequency after a normally distributed transfer delay, second neighbors
//! receive a further attenuated copy after twice that delay, and the
//! opposite fiber receives nothing. Gaussian sensor noise, the
//! shallow-break-angle artifact and per-channel failure scaling complete
//! the model.
//!
//! Synthesis is a pure function of the scenario: every random quantity is
//! drawn from a stream keyed by the scenario seed and the identity of the
//! thing being drawn (event content, target fiber, channel), so identical
//! scenarios produce bit-identical traces and event lists compose.

use crate::web::{
    natural_frequency, validate_config, FiberParams, PluckEvent, ValidationIssue, WebConfig,
    FIBER_COUNT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Minimum trace time that must remain after the last event onset.
pub const MIN_TAIL_S: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {}", format_issues(.0))]
    InvalidConfig(Vec<ValidationIssue>),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Six synchronized sample buffers at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    /// Sample rate in Hz.
    pub sample_rate_hz: f64,
    /// Time of sample 0 in seconds.
    pub t0_offset_s: f64,
    /// Nominal duration in seconds; every channel holds
    /// `round(duration_s * sample_rate_hz)` samples.
    pub duration_s: f64,
    /// One voltage buffer per ring position.
    pub channels: [Vec<f64>; FIBER_COUNT],
}

impl TraceSet {
    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trace time of a sample index in seconds.
    pub fn time_at(&self, index: usize) -> f64 {
        self.t0_offset_s + index as f64 / self.sample_rate_hz
    }

    /// Checks the structural invariants (positive rate, six equal-length
    /// channels matching the nominal duration).
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(SimError::InvalidScenario(
                "trace sample_rate_hz must be > 0".to_string(),
            ));
        }
        let expected = (self.duration_s * self.sample_rate_hz).round() as usize;
        for (c, ch) in self.channels.iter().enumerate() {
            if ch.len() != expected {
                return Err(SimError::InvalidScenario(format!(
                    "channel {c} holds {} samples, expected {expected}",
                    ch.len()
                )));
            }
        }
        Ok(())
    }
}

/// A complete, reproducible simulation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub config: WebConfig,
    pub events: Vec<PluckEvent>,
    /// Trace duration in seconds; must leave [`MIN_TAIL_S`] of room after
    /// the last event onset.
    pub duration_s: f64,
    /// Seed for every random quantity in the synthesis.
    pub seed: u64,
    /// Optional per-fiber output scaling in [0, 1], applied to the
    /// deviation from baseline; models a degraded or dead channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_scales: Option<BTreeMap<usize, f64>>,
}

/// Break-angle sensitivity factor, piecewise linear through the anchor
/// points (0deg, 1.0), (20deg, 2.0) and (40deg, 1.0), flat beyond.
pub fn break_angle_gain(angle_deg: f64) -> Result<f64, SimError> {
    if !(angle_deg >= 0.0) {
        return Err(SimError::InvalidParameter("break angle must be >= 0"));
    }
    Ok(gain_for(angle_deg))
}

fn gain_for(angle_deg: f64) -> f64 {
    if angle_deg <= 20.0 {
        1.0 + angle_deg / 20.0
    } else if angle_deg <= 40.0 {
        2.0 - (angle_deg - 20.0) / 20.0
    } else {
        1.0
    }
}

/// Photodiode deviation from baseline of a plucked fiber at `t_rel`
/// seconds after the impulse.
///
/// `A * sin(pi x) * gain(angle) * exp(-zeta w0 t) * sin(wd t)` with the
/// fiber's own fundamental; zero before the impulse. Parameters must
/// satisfy the [`FiberParams`] invariants.
pub fn fiber_response(params: &FiberParams, pluck: &PluckEvent, t_rel: f64) -> f64 {
    if t_rel < 0.0 {
        return 0.0;
    }
    let f0 = natural_frequency(
        params.tension_grams,
        params.vibrating_length_m,
        params.linear_density_kg_per_m,
    )
    .expect("fiber parameters must satisfy the documented invariants");
    let w0 = 2.0 * PI * f0;
    let zeta = params.damping_ratio;
    let wd = w0 * (1.0 - zeta * zeta).sqrt();
    let amplitude =
        params.optical_gain_v * (PI * pluck.position_frac).sin() * gain_for(params.break_angle_deg);
    amplitude * (-zeta * w0 * t_rel).exp() * (wd * t_rel).sin()
}

/// Draws one spiral-thread transfer delay in seconds: normal with the
/// configured mean and spread, clamped to three standard deviations so
/// the delay can never run nonphysically short or negative.
pub fn sample_coupling_delay<R: Rng + ?Sized>(rng: &mut R, config: &WebConfig) -> f64 {
    let mean = config.coupling_delay_mean_s;
    let sd = config.coupling_delay_sd_s;
    let normal = Normal::new(mean, sd).expect("validated coupling parameters");
    normal.sample(rng).clamp(mean - 3.0 * sd, mean + 3.0 * sd)
}

// Stream tags keeping the per-purpose random draws independent.
const STREAM_DELAY: u64 = 1;
const STREAM_JITTER: u64 = 2;
const STREAM_ARTIFACT: u64 = 3;
const STREAM_NOISE: u64 = 4;

/// SplitMix64 finalizer; mixes identity words into stream seeds.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn combine(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |h, &p| splitmix64(h ^ p))
}

/// Derives a reproducible sub-seed from a master seed and an identity
/// path (trial index, level index, ...). Used by the study harness to
/// give every trial an independent stream.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    combine(seed, parts)
}

fn stream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(combine(seed, parts))
}

/// Every random draw for one event is keyed by the event content, not its
/// list position, so event lists compose linearly.
fn event_key(seed: u64, event: &PluckEvent) -> u64 {
    combine(
        seed,
        &[
            event.fiber as u64,
            event.onset_s.to_bits(),
            event.position_frac.to_bits(),
            event.impulse_weight_g.to_bits(),
        ],
    )
}

/// One damped-oscillation contribution to one channel.
struct Component {
    target: usize,
    onset_s: f64,
    amplitude_v: f64,
    zeta: f64,
    w0: f64,
    wd: f64,
    artifact_amp_v: f64,
    artifact_w: f64,
    artifact_phase: f64,
}

impl Component {
    fn value(&self, t_rel: f64) -> f64 {
        if t_rel < 0.0 {
            return 0.0;
        }
        let envelope = (-self.zeta * self.w0 * t_rel).exp();
        let mut v = self.amplitude_v * envelope * (self.wd * t_rel).sin();
        if self.artifact_amp_v != 0.0 {
            v += self.artifact_amp_v
                * envelope
                * (self.artifact_w * t_rel + self.artifact_phase).sin();
        }
        v
    }
}

/// Relative 1-sigma natural-frequency jitter for a break angle: widest at
/// 0 degrees, narrowing linearly to the nominal value at 20 degrees.
fn jitter_sd_frac(config: &WebConfig, angle_deg: f64) -> f64 {
    let a = &config.artifacts;
    if angle_deg >= 20.0 {
        a.freq_jitter_frac_nominal
    } else {
        let t = angle_deg / 20.0;
        a.freq_jitter_frac_at_0deg + t * (a.freq_jitter_frac_nominal - a.freq_jitter_frac_at_0deg)
    }
}

/// Fraction of the shallow-angle artifact present at a break angle:
/// full strength at 0 degrees, gone by 20 degrees.
fn artifact_fade(angle_deg: f64) -> f64 {
    (1.0 - angle_deg / 20.0).max(0.0)
}

fn build_component(
    ev_key: u64,
    config: &WebConfig,
    target: &FiberParams,
    event: &PluckEvent,
    attenuation: f64,
    onset_s: f64,
) -> Component {
    let f0 = natural_frequency(
        target.tension_grams,
        target.vibrating_length_m,
        target.linear_density_kg_per_m,
    )
    .expect("validated fiber parameters");

    let sd_frac = jitter_sd_frac(config, target.break_angle_deg);
    let jitter = if sd_frac > 0.0 {
        let mut rng = stream(ev_key, &[STREAM_JITTER, target.index as u64]);
        let normal = Normal::new(0.0, sd_frac).expect("non-negative jitter spread");
        normal.sample(&mut rng).clamp(-3.0 * sd_frac, 3.0 * sd_frac)
    } else {
        0.0
    };

    let w0 = 2.0 * PI * f0 * (1.0 + jitter);
    let zeta = target.damping_ratio;
    let amplitude = attenuation
        * target.optical_gain_v
        * (PI * event.position_frac).sin()
        * gain_for(target.break_angle_deg);

    let fade = artifact_fade(target.break_angle_deg);
    let artifact_amp = fade * config.artifacts.artifact_amp_frac * amplitude;
    let artifact_phase = if artifact_amp != 0.0 {
        let mut rng = stream(ev_key, &[STREAM_ARTIFACT, target.index as u64]);
        rng.gen_range(0.0..2.0 * PI)
    } else {
        0.0
    };

    Component {
        target: target.index,
        onset_s,
        amplitude_v: amplitude,
        zeta,
        w0,
        wd: w0 * (1.0 - zeta * zeta).sqrt(),
        artifact_amp_v: artifact_amp,
        artifact_w: 2.0 * PI * config.artifacts.artifact_freq_hz,
        artifact_phase,
    }
}

fn validate_scenario(scenario: &SimScenario) -> Result<(), SimError> {
    if !(scenario.duration_s > 0.0) {
        return Err(SimError::InvalidScenario(
            "duration_s must be > 0".to_string(),
        ));
    }
    for (i, event) in scenario.events.iter().enumerate() {
        if event.fiber >= FIBER_COUNT {
            return Err(SimError::InvalidScenario(format!(
                "event {i}: fiber {} out of range 0..{FIBER_COUNT}",
                event.fiber
            )));
        }
        if !(event.onset_s >= 0.0) {
            return Err(SimError::InvalidScenario(format!(
                "event {i}: onset_s must be >= 0"
            )));
        }
        if !(event.position_frac > 0.0 && event.position_frac < 1.0) {
            return Err(SimError::InvalidScenario(format!(
                "event {i}: position_frac must lie strictly inside (0, 1)"
            )));
        }
        if scenario.duration_s <= event.onset_s + MIN_TAIL_S {
            return Err(SimError::InvalidScenario(format!(
                "event {i}: duration_s must exceed onset_s + {MIN_TAIL_S} s \
                 so the response can develop"
            )));
        }
    }
    if let Some(scales) = &scenario.failure_scales {
        for (&fiber, &scale) in scales {
            if fiber >= FIBER_COUNT {
                return Err(SimError::InvalidScenario(format!(
                    "failure scale for fiber {fiber} out of range 0..{FIBER_COUNT}"
                )));
            }
            if !(0.0..=1.0).contains(&scale) {
                return Err(SimError::InvalidScenario(format!(
                    "failure scale {scale} for fiber {fiber} outside [0, 1]"
                )));
            }
        }
    }
    Ok(())
}

/// Renders the scenario into a six-channel trace.
///
/// Per pluck on fiber `p`: channel `p` carries the direct response; each
/// first neighbor carries an attenuated response at its own fundamental,
/// delayed by a per-(event, neighbor) draw of the transfer delay; second
/// neighbors carry a further attenuated copy at twice that delay; the
/// opposite fiber receives nothing. Channels are then offset to their
/// baseline, perturbed with Gaussian noise and scaled by any configured
/// failure factor (baseline excluded, so a failed channel still idles at
/// its resting voltage). Identical scenarios yield bit-identical traces.
pub fn synthesize(scenario: &SimScenario) -> Result<TraceSet, SimError> {
    let issues = validate_config(&scenario.config);
    if !issues.is_empty() {
        return Err(SimError::InvalidConfig(issues));
    }
    validate_scenario(scenario)?;

    let config = &scenario.config;
    let fs = config.sample_rate_hz;
    let samples = (scenario.duration_s * fs).round() as usize;

    let mut components: Vec<Component> = Vec::new();
    for event in &scenario.events {
        let ev_key = event_key(scenario.seed, event);
        let plucked = config.fiber(event.fiber).expect("validated config");
        components.push(build_component(
            ev_key,
            config,
            plucked,
            event,
            1.0,
            event.onset_s,
        ));

        for step in [1usize, FIBER_COUNT - 1] {
            let neighbor_idx = (event.fiber + step) % FIBER_COUNT;
            let second_idx = (event.fiber + 2 * step) % FIBER_COUNT;
            let mut delay_rng = stream(ev_key, &[STREAM_DELAY, neighbor_idx as u64]);
            let delay = sample_coupling_delay(&mut delay_rng, config);

            let neighbor = config.fiber(neighbor_idx).expect("validated config");
            components.push(build_component(
                ev_key,
                config,
                neighbor,
                event,
                config.coupling_attenuation,
                event.onset_s + delay,
            ));

            if config.second_neighbor_attenuation > 0.0 {
                let second = config.fiber(second_idx).expect("validated config");
                components.push(build_component(
                    ev_key,
                    config,
                    second,
                    event,
                    config.second_neighbor_attenuation,
                    event.onset_s + 2.0 * delay,
                ));
            }
        }
    }

    let mut channels: [Vec<f64>; FIBER_COUNT] = std::array::from_fn(|_| vec![0.0; samples]);
    for component in &components {
        let buffer = &mut channels[component.target];
        let start = (component.onset_s * fs).ceil().max(0.0) as usize;
        for (i, slot) in buffer.iter_mut().enumerate().skip(start) {
            *slot += component.value(i as f64 / fs - component.onset_s);
        }
    }

    for fiber in &config.fibers {
        let buffer = &mut channels[fiber.index];
        if fiber.noise_std_v > 0.0 {
            let mut rng = stream(scenario.seed, &[STREAM_NOISE, fiber.index as u64]);
            let normal = Normal::new(0.0, fiber.noise_std_v).expect("validated noise");
            for slot in buffer.iter_mut() {
                *slot += normal.sample(&mut rng);
            }
        }
        let scale = scenario
            .failure_scales
            .as_ref()
            .and_then(|s| s.get(&fiber.index))
            .copied()
            .unwrap_or(1.0);
        for slot in buffer.iter_mut() {
            *slot = fiber.baseline_v + scale * *slot;
        }
    }

    Ok(TraceSet {
        sample_rate_hz: fs,
        t0_offset_s: 0.0,
        duration_s: scenario.duration_s,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pluck(fiber: usize, onset_s: f64, position_frac: f64) -> PluckEvent {
        PluckEvent {
            fiber,
            onset_s,
            position_frac,
            impulse_weight_g: 50.0,
        }
    }

    fn quiet_config() -> WebConfig {
        let mut config = WebConfig::default();
        for fiber in &mut config.fibers {
            fiber.noise_std_v = 0.0;
        }
        config
    }

    fn scenario(config: WebConfig, events: Vec<PluckEvent>, seed: u64) -> SimScenario {
        SimScenario {
            config,
            events,
            duration_s: 0.4,
            seed,
            failure_scales: None,
        }
    }

    #[test]
    fn break_angle_gain_anchor_points() {
        assert_eq!(break_angle_gain(0.0).unwrap(), 1.0);
        assert_eq!(break_angle_gain(20.0).unwrap(), 2.0);
        assert_eq!(break_angle_gain(40.0).unwrap(), 1.0);
        assert_eq!(break_angle_gain(10.0).unwrap(), 1.5);
        assert_eq!(break_angle_gain(30.0).unwrap(), 1.5);
        assert_eq!(break_angle_gain(55.0).unwrap(), 1.0);
        assert!(break_angle_gain(-1.0).is_err());
    }

    #[test]
    fn response_is_causal() {
        let params = FiberParams::with_tension(0, 50.0);
        let event = pluck(0, 0.0, 0.5);
        assert_eq!(fiber_response(&params, &event, -1e-6), 0.0);
        assert_eq!(fiber_response(&params, &event, 0.0), 0.0);
        assert!(fiber_response(&params, &event, 0.002) > 0.0);
    }

    #[test]
    fn response_scales_with_the_mode_shape() {
        let params = FiberParams::with_tension(0, 100.0);
        let center = pluck(0, 0.0, 0.5);
        let quarter = pluck(0, 0.0, 0.25);
        for t in [0.001, 0.0025, 0.01, 0.05] {
            let ratio = fiber_response(&params, &quarter, t) / fiber_response(&params, &center, t);
            assert_relative_eq!(ratio, (PI * 0.25).sin(), max_relative = 1e-12);
        }
    }

    #[test]
    fn twenty_degree_break_angle_doubles_the_zero_degree_response() {
        let mut at_zero = FiberParams::with_tension(0, 100.0);
        at_zero.break_angle_deg = 0.0;
        let mut at_twenty = at_zero.clone();
        at_twenty.break_angle_deg = 20.0;
        let event = pluck(0, 0.0, 0.5);
        for t in [0.001, 0.0025, 0.02] {
            let ratio =
                fiber_response(&at_twenty, &event, t) / fiber_response(&at_zero, &event, t);
            assert_relative_eq!(ratio, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn coupling_delay_degenerates_to_the_mean() {
        let mut config = WebConfig::default();
        config.coupling_delay_sd_s = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_coupling_delay(&mut rng, &config), 0.005);
        }
    }

    #[test]
    fn coupling_delay_statistics_and_clamp() {
        let config = WebConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| sample_coupling_delay(&mut rng, &config))
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd =
            (draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((mean - 0.005).abs() < 1e-4, "mean {mean}");
        assert!((sd - 0.0008).abs() < 1e-4, "sd {sd}");
        // Three-sigma clamp arithmetic: [0.0026, 0.0074] s.
        assert!(draws.iter().all(|&d| (0.0026..=0.0074).contains(&d)));
    }

    /// Noise, frequency jitter and artifacts all disabled.
    fn sterile_config() -> WebConfig {
        let mut config = quiet_config();
        config.artifacts.freq_jitter_frac_at_0deg = 0.0;
        config.artifacts.freq_jitter_frac_nominal = 0.0;
        config.artifacts.artifact_amp_frac = 0.0;
        config
    }

    #[test]
    fn empty_scenario_without_noise_is_flat_baseline() {
        let trace = synthesize(&scenario(quiet_config(), vec![], 9)).unwrap();
        for (c, ch) in trace.channels.iter().enumerate() {
            assert!(ch.iter().all(|&v| v == 2.5), "channel {c} not flat");
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let sc = scenario(WebConfig::default(), vec![pluck(3, 0.05, 0.5)], 42);
        let a = synthesize(&sc).unwrap();
        let b = synthesize(&sc).unwrap();
        assert_eq!(a, b, "identical scenarios must be bit-identical");
    }

    #[test]
    fn neighbors_wake_about_five_milliseconds_late() {
        // Oracle: exhaustive scan for the first sample exceeding the true
        // noise band on each channel.
        let sc = scenario(WebConfig::default(), vec![pluck(3, 0.05, 0.5)], 42);
        let trace = synthesize(&sc).unwrap();
        let first_excursion = |c: usize| {
            trace.channels[c]
                .iter()
                .position(|&v| (v - 2.5).abs() > 5.0 * 0.005)
                .map(|i| trace.time_at(i))
        };
        let plucked = first_excursion(3).expect("plucked channel must respond");
        for neighbor in [2usize, 4] {
            let t = first_excursion(neighbor).expect("neighbor must respond");
            let lag = t - plucked;
            assert!(
                (0.0025..=0.0076).contains(&lag),
                "neighbor {neighbor} lag {lag}"
            );
        }
    }

    #[test]
    fn distant_fibers_stay_inside_the_noise_band() {
        let sc = scenario(WebConfig::default(), vec![pluck(3, 0.05, 0.5)], 42);
        let trace = synthesize(&sc).unwrap();
        for c in [0usize, 1, 5] {
            let max = trace.channels[c].iter().cloned().fold(f64::MIN, f64::max);
            assert!(
                max <= 2.5 + 5.0 * 0.005,
                "channel {c} pokes above the noise band: {max}"
            );
        }
    }

    #[test]
    fn failure_scale_shrinks_excursions_linearly() {
        let base = scenario(quiet_config(), vec![pluck(3, 0.05, 0.5)], 7);
        let mut failed = base.clone();
        failed.failure_scales = Some(BTreeMap::from([(3usize, 0.1f64)]));
        let healthy = synthesize(&base).unwrap();
        let scaled = synthesize(&failed).unwrap();
        for i in 0..healthy.len() {
            let expected = 2.5 + 0.1 * (healthy.channels[3][i] - 2.5);
            assert_relative_eq!(scaled.channels[3][i], expected, epsilon = 1e-12);
            // Other channels untouched.
            assert_eq!(scaled.channels[2][i], healthy.channels[2][i]);
        }
    }

    #[test]
    fn superposition_of_event_lists() {
        // With noise off, synthesis is linear in the event list and the
        // per-event draws are keyed by event content, so the sum of two
        // separate runs matches the combined run exactly.
        let e1 = pluck(1, 0.05, 0.5);
        let e2 = pluck(4, 0.12, 0.3);
        let only1 = synthesize(&scenario(quiet_config(), vec![e1.clone()], 5)).unwrap();
        let only2 = synthesize(&scenario(quiet_config(), vec![e2.clone()], 5)).unwrap();
        let both = synthesize(&scenario(quiet_config(), vec![e1, e2], 5)).unwrap();
        for c in 0..FIBER_COUNT {
            for i in 0..both.len() {
                let sum = (only1.channels[c][i] - 2.5) + (only2.channels[c][i] - 2.5);
                let combined = both.channels[c][i] - 2.5;
                // Bit-for-bit up to the rounding of the baseline add/remove.
                assert!(
                    (combined - sum).abs() <= 1e-12,
                    "channel {c} sample {i} breaks superposition: {combined} vs {sum}"
                );
            }
        }
    }

    #[test]
    fn envelope_decays_after_the_pluck() {
        let trace = synthesize(&scenario(quiet_config(), vec![pluck(2, 0.05, 0.5)], 3)).unwrap();
        let signal: Vec<f64> = trace.channels[2].iter().map(|&v| (v - 2.5).abs()).collect();
        // Successive rectified maxima of a damped oscillation shrink.
        let mut last = f64::INFINITY;
        let mut count = 0;
        for i in 1..signal.len() - 1 {
            if signal[i] > signal[i - 1] && signal[i] > signal[i + 1] && signal[i] > 1e-6 {
                assert!(
                    signal[i] <= last * (1.0 + 1e-9),
                    "rectified peak at {i} grew: {} -> {}",
                    last,
                    signal[i]
                );
                last = signal[i];
                count += 1;
            }
        }
        assert!(count > 20, "expected many half-period peaks, saw {count}");
    }

    #[test]
    fn rejects_invalid_config_and_scenario() {
        let mut bad = WebConfig::default();
        bad.coupling_attenuation = 1.5;
        let err = synthesize(&scenario(bad, vec![], 1)).unwrap_err();
        assert!(matches!(err, SimError::InvalidConfig(_)));

        let mut short = scenario(WebConfig::default(), vec![pluck(0, 0.35, 0.5)], 1);
        short.duration_s = 0.4;
        assert!(matches!(
            synthesize(&short).unwrap_err(),
            SimError::InvalidScenario(_)
        ));

        let mut bad_scale = scenario(WebConfig::default(), vec![pluck(0, 0.05, 0.5)], 1);
        bad_scale.failure_scales = Some(BTreeMap::from([(0usize, 1.5f64)]));
        assert!(matches!(
            synthesize(&bad_scale).unwrap_err(),
            SimError::InvalidScenario(_)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn mode_shape_is_symmetric_about_the_center(
            x in 0.05f64..0.45,
            fiber in 0usize..6,
            seed in 0u64..1000,
        ) {
            // Jitter is keyed by event content (which includes the
            // position), so it is switched off for the comparison.
            let near = synthesize(&scenario(sterile_config(), vec![pluck(fiber, 0.05, x)], seed))
                .unwrap();
            let far = synthesize(
                &scenario(sterile_config(), vec![pluck(fiber, 0.05, 1.0 - x)], seed),
            )
            .unwrap();
            for i in (0..near.len()).step_by(7) {
                let a = near.channels[fiber][i];
                let b = far.channels[fiber][i];
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "sample {i}: {a} vs {b}");
            }
        }

        #[test]
        fn traces_validate_structurally(seed in 0u64..50) {
            let trace = synthesize(
                &scenario(WebConfig::default(), vec![pluck(1, 0.05, 0.4)], seed),
            )
            .unwrap();
            prop_assert!(trace.validate().is_ok());
            prop_assert_eq!(trace.len(), 4000);
        }
    }
}
