//! Signal-processing primitives: quiet-window baseline and noise
//! estimation, local-maximum peak detection with prominence and spacing
//! filters, first-peak extraction over a bounded window, and FFT-based
//! natural-frequency estimation with parabolic bin interpolation.
//!
//! All operations are pure and offset-agnostic: callers remove the
//! channel baseline before handing signals in, and the height thresholds
//! apply to the samples exactly as given.

use rustfft::{num_complex::Complex, FftPlanner};
use std::ops::Range;
use thiserror::Error;

/// Minimum number of samples accepted by [`estimate_baseline_noise`].
pub const MIN_QUIET_WINDOW: usize = 100;

/// Minimum signal length accepted by [`estimate_natural_frequency`].
pub const MIN_FFT_LENGTH: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum DspError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("no spectral peak above the noise floor (degenerate or DC-only signal)")]
    NoSpectralPeak,
}

/// One detected local maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakInfo {
    /// Sample index of the peak (first sample of a plateau).
    pub index: usize,
    /// Peak time in seconds relative to the start of the analyzed signal.
    pub time_s: f64,
    /// Signal value at the peak, in the units of the input (signed).
    pub amplitude_v: f64,
    /// Topographic prominence of the peak.
    pub prominence_v: f64,
}

/// Acceptance thresholds for [`find_peaks`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakParams {
    /// Minimum signal value for a peak to qualify.
    pub min_height_v: f64,
    /// Minimum topographic prominence for a peak to qualify.
    pub min_prominence_v: f64,
    /// Minimum index separation between retained peaks; when two peaks
    /// sit closer, the higher one wins (ties go to the lower index).
    pub min_distance_samples: usize,
}

impl Default for PeakParams {
    /// Defaults tuned for baseline-removed photodiode traces from the
    /// default web configuration: tall enough to reject coupled-in
    /// second-neighbor ripple and a failed fiber scaled to a tenth,
    /// short enough to accept every healthy first-neighbor response.
    fn default() -> Self {
        Self {
            min_height_v: 0.12,
            min_prominence_v: 0.0,
            min_distance_samples: 20,
        }
    }
}

/// Estimates the resting level and noise of a channel from a quiet window.
///
/// Returns `(baseline, noise_std)` where the baseline is the window median
/// and the noise is the sample standard deviation. The window must hold at
/// least [`MIN_QUIET_WINDOW`] samples.
pub fn estimate_baseline_noise(
    signal: &[f64],
    quiet_window: Range<usize>,
) -> Result<(f64, f64), DspError> {
    if quiet_window.end > signal.len() || quiet_window.start > quiet_window.end {
        return Err(DspError::InvalidWindow(format!(
            "window {quiet_window:?} out of bounds for signal of length {}",
            signal.len()
        )));
    }
    let window = &signal[quiet_window];
    if window.len() < MIN_QUIET_WINDOW {
        return Err(DspError::InvalidWindow(format!(
            "quiet window of {} samples is shorter than the required {MIN_QUIET_WINDOW}",
            window.len()
        )));
    }

    let mut sorted = window.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    let baseline = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };

    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((baseline, var.max(0.0).sqrt()))
}

/// Finds local maxima that satisfy the given thresholds.
///
/// A peak is a sample strictly greater than both neighbors; a flat run is
/// reported at its first sample. Retained peaks are at least
/// `min_distance_samples` apart (higher peaks win the pruning) and are
/// returned sorted by index. Signals shorter than 3 samples yield no peaks.
pub fn find_peaks(signal: &[f64], sample_rate_hz: f64, params: &PeakParams) -> Vec<PeakInfo> {
    let n = signal.len();
    if n < 3 {
        return Vec::new();
    }

    let mut kept: Vec<PeakInfo> = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if signal[i] > signal[i - 1] {
            // Extend across a possible plateau.
            let mut j = i;
            while j + 1 < n && signal[j + 1] == signal[i] {
                j += 1;
            }
            if j + 1 < n && signal[j + 1] < signal[i] {
                let amplitude = signal[i];
                if amplitude >= params.min_height_v {
                    let prominence = prominence_at(signal, i);
                    if prominence >= params.min_prominence_v {
                        kept.push(PeakInfo {
                            index: i,
                            time_s: i as f64 / sample_rate_hz,
                            amplitude_v: amplitude,
                            prominence_v: prominence,
                        });
                    }
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    if params.min_distance_samples > 1 {
        kept = prune_by_distance(kept, params.min_distance_samples);
    }
    kept
}

/// Topographic prominence: height above the higher of the two valley
/// minima reached before meeting a taller sample (or the signal edge).
fn prominence_at(signal: &[f64], peak: usize) -> f64 {
    let peak_value = signal[peak];
    let mut left_min = peak_value;
    for l in (0..peak).rev() {
        if signal[l] > peak_value {
            break;
        }
        left_min = left_min.min(signal[l]);
    }
    let mut right_min = peak_value;
    for r in peak + 1..signal.len() {
        if signal[r] > peak_value {
            break;
        }
        right_min = right_min.min(signal[r]);
    }
    peak_value - left_min.max(right_min)
}

fn prune_by_distance(peaks: Vec<PeakInfo>, min_distance: usize) -> Vec<PeakInfo> {
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| {
        peaks[b]
            .amplitude_v
            .total_cmp(&peaks[a].amplitude_v)
            .then(peaks[a].index.cmp(&peaks[b].index))
    });
    let mut selected: Vec<usize> = Vec::new();
    for &cand in &order {
        let idx = peaks[cand].index;
        if selected
            .iter()
            .all(|&s| peaks[s].index.abs_diff(idx) >= min_distance)
        {
            selected.push(cand);
        }
    }
    selected.sort_by_key(|&c| peaks[c].index);
    selected.into_iter().map(|c| peaks[c].clone()).collect()
}

/// Earliest qualifying peak with index in `[start_index, start_index +
/// window_samples)`, or `None` when the window holds no peak.
///
/// The window bounds select peak *indices*; one sample of context on each
/// side, when available, still participates in the neighbor comparisons,
/// so a peak sitting exactly on the last window sample is detected.
pub fn first_peak(
    signal: &[f64],
    sample_rate_hz: f64,
    start_index: usize,
    window_samples: usize,
    params: &PeakParams,
) -> Result<Option<PeakInfo>, DspError> {
    let end = start_index
        .checked_add(window_samples)
        .filter(|&e| e <= signal.len())
        .ok_or_else(|| {
            DspError::InvalidWindow(format!(
                "window [{start_index}, {start_index}+{window_samples}) exceeds signal length {}",
                signal.len()
            ))
        })?;

    let ctx_start = start_index.saturating_sub(1);
    let ctx_end = (end + 1).min(signal.len());
    let peaks = find_peaks(&signal[ctx_start..ctx_end], sample_rate_hz, params);
    Ok(peaks
        .into_iter()
        .map(|p| {
            let index = p.index + ctx_start;
            PeakInfo {
                index,
                time_s: index as f64 / sample_rate_hz,
                ..p
            }
        })
        .find(|p| p.index >= start_index && p.index < end))
}

/// Estimates the dominant oscillation frequency of a signal in Hz.
///
/// Removes the mean, applies a Hann window, takes the magnitude spectrum
/// and refines the maximum bin (DC excluded) with parabolic interpolation
/// over the three bins around it. Errors when the signal is shorter than
/// [`MIN_FFT_LENGTH`] or carries no spectral content besides DC.
pub fn estimate_natural_frequency(signal: &[f64], sample_rate_hz: f64) -> Result<f64, DspError> {
    let n = signal.len();
    if n < MIN_FFT_LENGTH {
        return Err(DspError::SignalTooShort {
            needed: MIN_FFT_LENGTH,
            got: n,
        });
    }

    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buffer: Vec<Complex<f64>> = signal
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = 0.5
                * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos());
            Complex::new((x - mean) * w, 0.0)
        })
        .collect();

    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let half = n / 2;
    let magnitude = |k: usize| buffer[k].norm();
    let mut peak_bin = 1;
    let mut peak_mag = magnitude(1);
    for k in 2..=half {
        let m = magnitude(k);
        if m > peak_mag {
            peak_mag = m;
            peak_bin = k;
        }
    }
    if !(peak_mag > 0.0) {
        return Err(DspError::NoSpectralPeak);
    }

    // Parabolic refinement through the neighboring bins.
    let mut offset = 0.0;
    if peak_bin >= 1 && peak_bin + 1 <= half {
        let a = magnitude(peak_bin - 1);
        let b = peak_mag;
        let c = magnitude(peak_bin + 1);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok((peak_bin as f64 + offset) * sample_rate_hz / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FS: f64 = 10_000.0;

    fn loose_params() -> PeakParams {
        PeakParams {
            min_height_v: f64::NEG_INFINITY,
            min_prominence_v: 0.0,
            min_distance_samples: 1,
        }
    }

    #[test]
    fn baseline_noise_of_constant_signal() {
        let signal = vec![2.5; 500];
        let (baseline, noise) = estimate_baseline_noise(&signal, 0..500).unwrap();
        assert_eq!(baseline, 2.5);
        assert_eq!(noise, 0.0);
    }

    #[test]
    fn baseline_noise_recovers_gaussian_sigma() {
        use rand::SeedableRng;
        use rand_distr::Distribution;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dist = rand_distr::Normal::new(2.5, 0.005).unwrap();
        let signal: Vec<f64> = (0..10_000).map(|_| dist.sample(&mut rng)).collect();
        let (baseline, noise) = estimate_baseline_noise(&signal, 0..signal.len()).unwrap();
        assert!((baseline - 2.5).abs() < 5e-4, "baseline {baseline}");
        assert!((noise - 0.005).abs() < 5e-4, "noise {noise}");
    }

    #[test]
    fn baseline_noise_rejects_short_window() {
        let signal = vec![1.0; 200];
        assert!(matches!(
            estimate_baseline_noise(&signal, 0..50),
            Err(DspError::InvalidWindow(_))
        ));
        assert!(matches!(
            estimate_baseline_noise(&signal, 150..300),
            Err(DspError::InvalidWindow(_))
        ));
    }

    #[test]
    fn monotone_signal_has_no_peaks() {
        let signal: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert!(find_peaks(&signal, FS, &loose_params()).is_empty());
    }

    #[test]
    fn single_sine_period_peaks_at_quarter() {
        // One period of 100 Hz at 10 kHz: maximum at sample 25.
        let signal: Vec<f64> = (0..100).map(|i| (2.0 * PI * i as f64 / 100.0).sin()).collect();
        let params = PeakParams {
            min_height_v: 0.5,
            min_prominence_v: 0.0,
            min_distance_samples: 1,
        };
        let peaks = find_peaks(&signal, FS, &params);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, 25);
        assert_relative_eq!(peaks[0].amplitude_v, 1.0, max_relative = 1e-12);
        assert_relative_eq!(peaks[0].time_s, 25.0 / FS, max_relative = 1e-12);
    }

    #[test]
    fn close_equal_peaks_prune_to_the_earlier_one() {
        // Peaks at indices 1 and 4 with equal height, 3 samples apart.
        let signal = [0.0, 1.0, 0.0, 0.0, 1.0, 0.0];
        let params = PeakParams {
            min_height_v: 0.0,
            min_prominence_v: 0.0,
            min_distance_samples: 5,
        };
        let peaks = find_peaks(&signal, FS, &params);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, 1, "tie must resolve to the lower index");
    }

    #[test]
    fn plateau_reports_first_sample() {
        let signal = [0.0, 1.0, 1.0, 1.0, 0.0];
        let peaks = find_peaks(&signal, FS, &loose_params());
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, 1);
    }

    #[test]
    fn plateau_running_to_the_edge_is_not_a_peak() {
        let signal = [0.0, 1.0, 1.0, 1.0];
        assert!(find_peaks(&signal, FS, &loose_params()).is_empty());
    }

    #[test]
    fn prominence_filter_drops_shoulder_peaks() {
        // Hand-worked: peak at 1 has prominence 3 - max(0, 2) = 1,
        // peak at 5 has prominence 4 - max(0, 0) = 4.
        let signal = [0.0, 3.0, 2.0, 2.5, 2.0, 4.0, 0.0];
        let all = find_peaks(&signal, FS, &loose_params());
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].prominence_v, 1.0);
        assert_eq!(all[2].prominence_v, 4.0);

        let params = PeakParams {
            min_height_v: f64::NEG_INFINITY,
            min_prominence_v: 2.0,
            min_distance_samples: 1,
        };
        let filtered = find_peaks(&signal, FS, &params);
        assert_eq!(filtered.len(), 1);
        assert_eq!(filtered[0].index, 5);
    }

    #[test]
    fn first_peak_over_flat_window_is_none() {
        let signal = vec![0.0; 400];
        let got = first_peak(&signal, FS, 100, 100, &loose_params()).unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn first_peak_finds_the_quarter_period_of_a_decaying_sinusoid() {
        // Damped response starting at sample 100; oracle is a dense argmax
        // over the first half period.
        let f0 = 100.0;
        let zeta: f64 = 0.02;
        let w0 = 2.0 * PI * f0;
        let wd = w0 * (1.0 - zeta * zeta).sqrt();
        let signal: Vec<f64> = (0..600)
            .map(|i| {
                let t = (i as f64 - 100.0) / FS;
                if t < 0.0 {
                    0.0
                } else {
                    (-zeta * w0 * t).exp() * (wd * t).sin()
                }
            })
            .collect();
        let oracle = (100..150)
            .max_by(|&a, &b| signal[a].total_cmp(&signal[b]))
            .unwrap();
        let got = first_peak(&signal, FS, 100, 200, &loose_params())
            .unwrap()
            .expect("a peak must exist in the window");
        assert_eq!(got.index, oracle);
        // Analytic argmax of exp(-zeta w0 t) sin(wd t).
        let t_star = (wd / (zeta * w0)).atan() / wd;
        assert!((got.time_s - (100.0 / FS + t_star)).abs() <= 1.5 / FS);
    }

    #[test]
    fn first_peak_returns_the_earlier_of_two_peaks() {
        let mut signal = vec![0.0; 300];
        signal[120] = 1.0;
        signal[180] = 5.0;
        let got = first_peak(&signal, FS, 100, 150, &loose_params())
            .unwrap()
            .unwrap();
        assert_eq!(got.index, 120, "ordering wins over amplitude");
    }

    #[test]
    fn first_peak_includes_the_last_window_sample() {
        // Peak exactly at start + window - 1; the sample after it exists
        // in the signal and provides the right-hand comparison.
        let mut signal = vec![0.0; 300];
        signal[199] = 1.0;
        let got = first_peak(&signal, FS, 100, 100, &loose_params())
            .unwrap()
            .unwrap();
        assert_eq!(got.index, 199);
        // The same peak one sample later falls outside the half-open window.
        let mut signal = vec![0.0; 300];
        signal[200] = 1.0;
        assert!(first_peak(&signal, FS, 100, 100, &loose_params())
            .unwrap()
            .is_none());
    }

    #[test]
    fn first_peak_rejects_out_of_bounds_window() {
        let signal = vec![0.0; 150];
        assert!(matches!(
            first_peak(&signal, FS, 100, 100, &loose_params()),
            Err(DspError::InvalidWindow(_))
        ));
    }

    #[test]
    fn frequency_estimate_recovers_pure_tone_within_one_bin() {
        let n = 4096;
        let signal: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 100.0 * i as f64 / FS).sin())
            .collect();
        let f = estimate_natural_frequency(&signal, FS).unwrap();
        let bin = FS / n as f64;
        assert!((f - 100.0).abs() <= bin, "estimate {f} Hz, bin width {bin}");
        // Interpolation does much better than the raw bin in practice.
        assert!((f - 100.0).abs() < 0.5, "estimate {f} Hz");
    }

    #[test]
    fn frequency_estimate_rejects_dc_and_short_signals() {
        let flat = vec![2.5; 4096];
        assert_eq!(
            estimate_natural_frequency(&flat, FS),
            Err(DspError::NoSpectralPeak)
        );
        let short = vec![0.0; 128];
        assert!(matches!(
            estimate_natural_frequency(&short, FS),
            Err(DspError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn frequency_estimate_is_invariant_to_amplitude_and_phase() {
        let n = 4096;
        let reference = {
            let signal: Vec<f64> = (0..n)
                .map(|i| (2.0 * PI * 123.4 * i as f64 / FS).sin())
                .collect();
            estimate_natural_frequency(&signal, FS).unwrap()
        };
        for (amp, phase) in [(0.01, 1.0), (50.0, 2.5), (3.0, -0.7)] {
            let signal: Vec<f64> = (0..n)
                .map(|i| amp * (2.0 * PI * 123.4 * i as f64 / FS + phase).sin())
                .collect();
            let f = estimate_natural_frequency(&signal, FS).unwrap();
            assert!(
                (f - reference).abs() < 0.05,
                "amp {amp} phase {phase}: {f} vs {reference}"
            );
        }
    }

    /// Exhaustive reference implementation used by the equivalence
    /// property: quadratic scans, written independently of `find_peaks`.
    fn reference_find_peaks(signal: &[f64], params: &PeakParams) -> Vec<(usize, f64, f64)> {
        let n = signal.len();
        let mut candidates = Vec::new();
        for i in 1..n.saturating_sub(1) {
            if signal[i] <= signal[i - 1] {
                continue;
            }
            // Walk the plateau to the right; i must be its first sample.
            let mut j = i;
            while j + 1 < n && signal[j + 1] == signal[i] {
                j += 1;
            }
            if j + 1 >= n || signal[j + 1] >= signal[i] {
                continue;
            }
            if signal[i] < params.min_height_v {
                continue;
            }
            let left = signal[..i]
                .iter()
                .rev()
                .take_while(|&&v| v <= signal[i])
                .fold(signal[i], |m, &v| m.min(v));
            let right = signal[i + 1..]
                .iter()
                .take_while(|&&v| v <= signal[i])
                .fold(signal[i], |m, &v| m.min(v));
            let prominence = signal[i] - left.max(right);
            if prominence < params.min_prominence_v {
                continue;
            }
            candidates.push((i, signal[i], prominence));
        }
        // Greedy pruning by descending height, ties to the lower index.
        let mut order = candidates.clone();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut kept: Vec<(usize, f64, f64)> = Vec::new();
        for cand in order {
            if kept
                .iter()
                .all(|k| k.0.abs_diff(cand.0) >= params.min_distance_samples)
            {
                kept.push(cand);
            }
        }
        kept.sort_by_key(|k| k.0);
        kept
    }

    proptest! {
        #[test]
        fn matches_exhaustive_reference(
            values in proptest::collection::vec(-3i8..=3, 3..64),
            min_height in -2i8..=2,
            min_prominence in 0i8..=3,
            min_distance in 1usize..8,
        ) {
            let signal: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let params = PeakParams {
                min_height_v: min_height as f64,
                min_prominence_v: min_prominence as f64,
                min_distance_samples: min_distance,
            };
            let got: Vec<(usize, f64, f64)> = find_peaks(&signal, FS, &params)
                .iter()
                .map(|p| (p.index, p.amplitude_v, p.prominence_v))
                .collect();
            let expected = reference_find_peaks(&signal, &params);
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn weaker_thresholds_admit_a_superset(
            values in proptest::collection::vec(-4i8..=4, 3..64),
            min_height in -1i8..=2,
            min_prominence in 1i8..=3,
        ) {
            // Subset monotonicity is exact when no spacing pruning runs.
            let signal: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let strict = PeakParams {
                min_height_v: min_height as f64,
                min_prominence_v: min_prominence as f64,
                min_distance_samples: 1,
            };
            let weak = PeakParams {
                min_height_v: min_height as f64 - 1.0,
                min_prominence_v: min_prominence as f64 - 1.0,
                min_distance_samples: 1,
            };
            let strict_idx: Vec<usize> =
                find_peaks(&signal, FS, &strict).iter().map(|p| p.index).collect();
            let weak_idx: Vec<usize> =
                find_peaks(&signal, FS, &weak).iter().map(|p| p.index).collect();
            prop_assert!(strict_idx.iter().all(|i| weak_idx.contains(i)));
        }

        #[test]
        fn scaling_by_powers_of_two_is_exactly_equivariant(
            values in proptest::collection::vec(-4i8..=4, 3..48),
            exponent in -3i32..=3,
            min_distance in 1usize..6,
        ) {
            let alpha = (2.0f64).powi(exponent);
            let signal: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let scaled: Vec<f64> = signal.iter().map(|&v| alpha * v).collect();
            let params = PeakParams {
                min_height_v: 0.5,
                min_prominence_v: 1.0,
                min_distance_samples: min_distance,
            };
            let scaled_params = PeakParams {
                min_height_v: alpha * params.min_height_v,
                min_prominence_v: alpha * params.min_prominence_v,
                min_distance_samples: min_distance,
            };
            let base = find_peaks(&signal, FS, &params);
            let equiv = find_peaks(&scaled, FS, &scaled_params);
            prop_assert_eq!(base.len(), equiv.len());
            for (p, q) in base.iter().zip(&equiv) {
                prop_assert_eq!(p.index, q.index);
                prop_assert_eq!(alpha * p.amplitude_v, q.amplitude_v);
                prop_assert_eq!(alpha * p.prominence_v, q.prominence_v);
            }
        }

        #[test]
        fn adding_a_constant_keeps_indices_when_heights_shift(
            values in proptest::collection::vec(-4i8..=4, 3..48),
            shift in -2i8..=2,
        ) {
            // Heights apply to the signal as given: shifting both the
            // samples and the height threshold leaves the result alone.
            let c = shift as f64;
            let signal: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let shifted: Vec<f64> = signal.iter().map(|&v| v + c).collect();
            let params = PeakParams {
                min_height_v: 1.0,
                min_prominence_v: 1.0,
                min_distance_samples: 3,
            };
            let shifted_params = PeakParams { min_height_v: 1.0 + c, ..params.clone() };
            let base = find_peaks(&signal, FS, &params);
            let moved = find_peaks(&shifted, FS, &shifted_params);
            prop_assert_eq!(base.len(), moved.len());
            for (p, q) in base.iter().zip(&moved) {
                prop_assert_eq!(p.index, q.index);
                prop_assert_eq!(p.amplitude_v + c, q.amplitude_v);
                prop_assert_eq!(p.prominence_v, q.prominence_v);
            }
        }
    }
}
