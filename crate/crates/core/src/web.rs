//! Domain types for the six-waveguide sensing web: per-fiber physical
//! parameters, the ring configuration, pluck events, ring topology helpers,
//! and configuration validation.
//!
//! The web consists of six tensioned polymer waveguides arranged radially
//! and coupled by a passive spiral thread. Each waveguide behaves as a
//! lightly damped string whose fundamental frequency follows the ideal
//! string law `f = (1/2L) * sqrt(T/mu)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard gravity, used to convert calibration weights to newtons.
pub const GRAVITY_M_PER_S2: f64 = 9.81;

/// Number of radial waveguides in the web.
pub const FIBER_COUNT: usize = 6;

/// Default linear density of the 0.8 mm waveguide thread in kg/m.
///
/// Derived from a polymer density of 1200 kg/m^3 and a 0.4 mm radius
/// circular cross-section. The thread manufacturer publishes no figure,
/// so this is an overridable default.
pub const DEFAULT_LINEAR_DENSITY_KG_PER_M: f64 = 6.03e-4;

/// Default vibrating span of each waveguide in meters.
pub const DEFAULT_VIBRATING_LENGTH_M: f64 = 0.175;

#[derive(Debug, Error, PartialEq)]
pub enum WebError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("fiber index {0} out of range 0..{FIBER_COUNT}")]
    InvalidIndex(usize),
}

/// Physical and sensing parameters of one radial waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberParams {
    /// Position of the fiber on the ring, 0..=5.
    pub index: usize,
    /// Tensioning calibration weight in grams-force (e.g. 50, 100, 150).
    pub tension_grams: f64,
    /// Vibrating span between the two bridges in meters.
    pub vibrating_length_m: f64,
    /// Linear density of the thread in kg/m.
    pub linear_density_kg_per_m: f64,
    /// Viscous damping ratio, strictly inside (0, 1).
    pub damping_ratio: f64,
    /// Angle the fiber makes over the bridge supports in degrees.
    pub break_angle_deg: f64,
    /// Photodiode response in volts per unit modal displacement.
    pub optical_gain_v: f64,
    /// Resting photodiode output in volts.
    pub baseline_v: f64,
    /// Standard deviation of the additive Gaussian sensor noise in volts.
    pub noise_std_v: f64,
}

impl FiberParams {
    /// A fiber with the bench default geometry and electronics at the
    /// given ring position and tension.
    pub fn with_tension(index: usize, tension_grams: f64) -> Self {
        Self {
            index,
            tension_grams,
            vibrating_length_m: DEFAULT_VIBRATING_LENGTH_M,
            linear_density_kg_per_m: DEFAULT_LINEAR_DENSITY_KG_PER_M,
            damping_ratio: 0.02,
            break_angle_deg: 20.0,
            optical_gain_v: 0.5,
            baseline_v: 2.5,
            noise_std_v: 0.005,
        }
    }

    /// Fundamental frequency of this fiber in Hz.
    pub fn natural_frequency_hz(&self) -> Result<f64, WebError> {
        natural_frequency(
            self.tension_grams,
            self.vibrating_length_m,
            self.linear_density_kg_per_m,
        )
    }
}

/// Calibration knobs for the shallow-break-angle signal artifacts.
///
/// Shallow break angles fail to isolate the vibration to the span between
/// the bridges, which shows up as a low-frequency component riding on the
/// response and as a wider spread of the measured natural frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArtifactParams {
    /// Frequency of the parasitic low-frequency component in Hz.
    pub artifact_freq_hz: f64,
    /// Amplitude of the parasitic component relative to the main response
    /// at a 0 degree break angle.
    pub artifact_amp_frac: f64,
    /// Relative natural-frequency jitter (1 sigma) at a 0 degree break angle.
    pub freq_jitter_frac_at_0deg: f64,
    /// Relative natural-frequency jitter (1 sigma) at break angles of
    /// 20 degrees and above.
    pub freq_jitter_frac_nominal: f64,
}

impl Default for ArtifactParams {
    fn default() -> Self {
        Self {
            artifact_freq_hz: 20.0,
            artifact_amp_frac: 0.3,
            freq_jitter_frac_at_0deg: 0.08,
            freq_jitter_frac_nominal: 0.01,
        }
    }
}

/// Configuration of the full six-fiber web and its acquisition chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebConfig {
    /// The six radial fibers in ring order; `fibers[i].index` must be a
    /// permutation of 0..=5.
    pub fibers: Vec<FiberParams>,
    /// Mean vibration transfer delay to a first neighbor in seconds.
    pub coupling_delay_mean_s: f64,
    /// Standard deviation of the transfer delay in seconds.
    pub coupling_delay_sd_s: f64,
    /// Amplitude ratio between a plucked fiber's response and the response
    /// it induces on a first neighbor.
    pub coupling_attenuation: f64,
    /// Amplitude ratio for second neighbors; must sit below the noise
    /// floor so distant fibers stay quiet.
    pub second_neighbor_attenuation: f64,
    /// Acquisition sample rate in Hz.
    pub sample_rate_hz: f64,
    /// Shallow-break-angle artifact calibration.
    #[serde(default)]
    pub artifacts: ArtifactParams,
}

impl Default for WebConfig {
    /// The as-built web: one 50 g fiber, four 100 g fibers and one 150 g
    /// fiber, sampled at 10 kHz.
    fn default() -> Self {
        let tensions = [50.0, 100.0, 100.0, 100.0, 100.0, 150.0];
        Self {
            fibers: tensions
                .iter()
                .enumerate()
                .map(|(i, &t)| FiberParams::with_tension(i, t))
                .collect(),
            coupling_delay_mean_s: 0.005,
            coupling_delay_sd_s: 0.0008,
            coupling_attenuation: 0.3,
            second_neighbor_attenuation: 0.002,
            sample_rate_hz: 10_000.0,
            artifacts: ArtifactParams::default(),
        }
    }
}

impl WebConfig {
    /// Fiber parameters for ring position `index`.
    pub fn fiber(&self, index: usize) -> Result<&FiberParams, WebError> {
        self.fibers
            .iter()
            .find(|f| f.index == index)
            .ok_or(WebError::InvalidIndex(index))
    }
}

/// An impulse applied to one fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluckEvent {
    /// Ring index of the plucked fiber, 0..=5.
    pub fiber: usize,
    /// Time of the impulse relative to the start of the trace in seconds.
    pub onset_s: f64,
    /// Fractional position along the vibrating span, strictly inside (0, 1).
    /// 0.5 is the span center, 0.25 is a quarter of the way off a bridge.
    pub position_frac: f64,
    /// Calibration weight driving the plucker in grams. Carried for
    /// experiment bookkeeping; it does not scale the response amplitude.
    pub impulse_weight_g: f64,
}

/// Fundamental frequency of an ideal tensioned string in Hz.
///
/// `f = (1/2L) * sqrt(T/mu)` with the tension given as a calibration
/// weight in grams-force.
pub fn natural_frequency(
    tension_grams: f64,
    vibrating_length_m: f64,
    linear_density_kg_per_m: f64,
) -> Result<f64, WebError> {
    if !(tension_grams > 0.0) {
        return Err(WebError::InvalidParameter("tension_grams must be > 0"));
    }
    if !(vibrating_length_m > 0.0) {
        return Err(WebError::InvalidParameter("vibrating_length_m must be > 0"));
    }
    if !(linear_density_kg_per_m > 0.0) {
        return Err(WebError::InvalidParameter(
            "linear_density_kg_per_m must be > 0",
        ));
    }
    let tension_n = tension_grams * 1e-3 * GRAVITY_M_PER_S2;
    Ok((tension_n / linear_density_kg_per_m).sqrt() / (2.0 * vibrating_length_m))
}

/// Minimal hop count between two ring positions, in 0..=3.
pub fn ring_distance(i: usize, j: usize) -> Result<usize, WebError> {
    if i >= FIBER_COUNT {
        return Err(WebError::InvalidIndex(i));
    }
    if j >= FIBER_COUNT {
        return Err(WebError::InvalidIndex(j));
    }
    let d = i.abs_diff(j);
    Ok(d.min(FIBER_COUNT - d))
}

/// The unique fiber adjacent to both `i` and `j` along the short arc,
/// defined only when the two sit at ring distance 2.
pub fn midpoint_fiber(i: usize, j: usize) -> Result<Option<usize>, WebError> {
    if ring_distance(i, j)? != 2 {
        return Ok(None);
    }
    // Exactly one of the two directed hops is the short arc.
    if (j + FIBER_COUNT - i) % FIBER_COUNT == 2 {
        Ok(Some((i + 1) % FIBER_COUNT))
    } else {
        Ok(Some((j + 1) % FIBER_COUNT))
    }
}

/// One configuration invariant violation found by [`validate_config`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    /// What was violated, e.g. "fiber count" or "attenuation range".
    pub what: String,
    /// Human-readable detail.
    pub detail: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.what, self.detail)
    }
}

/// Checks every configuration invariant and returns all violations,
/// not just the first. An empty list means the configuration is valid.
pub fn validate_config(config: &WebConfig) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut push = |what: &str, detail: String| {
        issues.push(ValidationIssue {
            what: what.to_string(),
            detail,
        })
    };

    if config.fibers.len() != FIBER_COUNT {
        push(
            "fiber count",
            format!("expected {FIBER_COUNT} fibers, got {}", config.fibers.len()),
        );
    }
    let mut seen = [false; FIBER_COUNT];
    for fiber in &config.fibers {
        if fiber.index >= FIBER_COUNT {
            push(
                "fiber index",
                format!("fiber index {} out of range 0..{FIBER_COUNT}", fiber.index),
            );
        } else if seen[fiber.index] {
            push("fiber index", format!("duplicate fiber index {}", fiber.index));
        } else {
            seen[fiber.index] = true;
        }
        let tag = |field: &str| format!("fiber {} {field}", fiber.index);
        if !(fiber.tension_grams > 0.0) {
            push("fiber tension", tag("tension_grams must be > 0"));
        }
        if !(fiber.vibrating_length_m > 0.0) {
            push("fiber length", tag("vibrating_length_m must be > 0"));
        }
        if !(fiber.linear_density_kg_per_m > 0.0) {
            push("fiber density", tag("linear_density_kg_per_m must be > 0"));
        }
        if !(fiber.damping_ratio > 0.0 && fiber.damping_ratio < 1.0) {
            push("damping ratio", tag("damping_ratio must lie in (0, 1)"));
        }
        if !(fiber.break_angle_deg >= 0.0) {
            push("break angle", tag("break_angle_deg must be >= 0"));
        }
        if !(fiber.baseline_v > 0.0) {
            push("baseline", tag("baseline_v must be > 0"));
        }
        if !(fiber.noise_std_v >= 0.0) {
            push("noise", tag("noise_std_v must be >= 0"));
        }
    }
    if !(config.coupling_delay_mean_s > 0.0) {
        push(
            "coupling delay",
            "coupling_delay_mean_s must be > 0".to_string(),
        );
    }
    if !(config.coupling_delay_sd_s >= 0.0) {
        push(
            "coupling delay",
            "coupling_delay_sd_s must be >= 0".to_string(),
        );
    }
    let att_ok = 0.0 <= config.second_neighbor_attenuation
        && config.second_neighbor_attenuation < config.coupling_attenuation
        && config.coupling_attenuation < 1.0;
    if !att_ok {
        push(
            "attenuation range",
            format!(
                "require 0 <= second_neighbor_attenuation ({}) < coupling_attenuation ({}) < 1",
                config.second_neighbor_attenuation, config.coupling_attenuation
            ),
        );
    }
    if !(config.sample_rate_hz > 0.0) {
        push("sample rate", "sample_rate_hz must be > 0".to_string());
    }
    issues
}
