//! Azimuthal pattern cuts and equivalent-mode recovery from their phase.

use super::field::{beam_field, ModeSpectrum};
use super::{check_distance, BeamError, BeamKind, BeamSpec, Truncation, WaveParameters};
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

/// Minimum number of samples inside the 3 dB window for a slope fit.
pub const MIN_WINDOW_SAMPLES: usize = 5;

/// Amplitude and unwrapped phase sampled over azimuth at a fixed polar angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCut {
    angles: Vec<f64>,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    polar_angle: f64,
}

impl PatternCut {
    /// Builds a cut from already-unwrapped phase samples.
    pub fn new(angles: Vec<f64>, amplitude: Vec<f64>, phase: Vec<f64>, polar_angle: f64) -> Result<Self, BeamError> {
        check_grid(&angles)?;
        if amplitude.len() != angles.len() || phase.len() != angles.len() {
            return Err(BeamError::InvalidCut("angles, amplitude and phase differ in length".into()));
        }
        if amplitude.iter().chain(&phase).any(|v| !v.is_finite()) || amplitude.iter().any(|&a| a < 0.0) {
            return Err(BeamError::InvalidCut("amplitudes must be finite and nonnegative, phases finite".into()));
        }
        if phase.windows(2).any(|w| (w[1] - w[0]).abs() >= PI) {
            return Err(BeamError::InvalidCut("phase is not unwrapped".into()));
        }
        Ok(Self { angles, amplitude, phase, polar_angle })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn polar_angle(&self) -> f64 {
        self.polar_angle
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

fn check_grid(grid: &[f64]) -> Result<(), BeamError> {
    if grid.len() < 3 {
        return Err(BeamError::InvalidGrid(format!("need at least 3 samples, got {}", grid.len())));
    }
    if grid.iter().any(|a| !a.is_finite()) {
        return Err(BeamError::InvalidGrid("non-finite azimuth".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BeamError::InvalidGrid("azimuths must be strictly increasing".into()));
    }
    Ok(())
}

/// Adjacent-sample unwrap: each step is folded into `(−π, π]`.
pub fn unwrap_phase(wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut offset = 0.0;
    for (i, &p) in wrapped.iter().enumerate() {
        if i > 0 {
            let prev = wrapped[i - 1];
            let mut step = p - prev;
            step = (step + PI).rem_euclid(TAU) - PI;
            if step == -PI {
                step = PI;
            }
            offset += step - (p - prev);
        }
        out.push(p + offset);
    }
    out
}

/// Samples the beam over `azimuth_grid` at polar angle `theta` and distance `d`.
///
/// The grid must resolve the phase winding: `|ℓe|·Δφ < π` for every step.
pub fn pattern_cut(
    spec: &BeamSpec,
    wave: &WaveParameters,
    theta: f64,
    azimuth_grid: &[f64],
    d: f64,
    truncation: Truncation,
) -> Result<PatternCut, BeamError> {
    check_distance(d)?;
    check_grid(azimuth_grid)?;
    spec.validate()?;
    let winding = f64::from(spec.equivalent_mode.unsigned_abs());
    if let Some(w) = azimuth_grid.windows(2).find(|w| winding * (w[1] - w[0]) >= PI) {
        return Err(BeamError::InvalidGrid(format!(
            "step {} rad too coarse for mode {}",
            w[1] - w[0],
            spec.equivalent_mode
        )));
    }

    let field: Vec<_> = match spec.kind {
        BeamKind::NtcsOam => {
            let spectrum = ModeSpectrum::new(spec, wave, theta, truncation)?;
            let ct = num_complex::Complex64::from_polar(spec.amplitude_scale / (2.0 * d), -wave.wavenumber * d);
            azimuth_grid.iter().map(|&phi| ct * spectrum.evaluate(phi)).collect()
        }
        BeamKind::PlaneWave => azimuth_grid
            .iter()
            .map(|&phi| beam_field(spec, wave, d, theta, phi, truncation))
            .collect::<Result<_, _>>()?,
    };
    let amplitude: Vec<f64> = field.iter().map(|u| u.norm()).collect();
    let wrapped: Vec<f64> = field.iter().map(|u| u.arg()).collect();
    PatternCut::new(azimuth_grid.to_vec(), amplitude, unwrap_phase(&wrapped), theta)
}

/// Equivalent mode estimated from the phase slope inside the 3 dB main lobe.
///
/// The window is the contiguous run of samples around the global maximum whose
/// amplitude is at least `max/√2`. The least-squares slope of phase against
/// azimuth is negated to follow the `e^{−jℓφ}` convention.
pub fn main_lobe_phase_slope(cut: &PatternCut) -> Result<f64, BeamError> {
    let (lo, hi) = main_lobe_window(cut)?;
    let found = hi - lo + 1;
    if found < MIN_WINDOW_SAMPLES {
        return Err(BeamError::InsufficientSamples { found, required: MIN_WINDOW_SAMPLES });
    }
    let xs = &cut.angles[lo..=hi];
    let ys = &cut.phase[lo..=hi];
    let n = found as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    Ok(-sxy / sxx)
}

/// Inclusive index range of the 3 dB main lobe.
pub(crate) fn main_lobe_window(cut: &PatternCut) -> Result<(usize, usize), BeamError> {
    let amp = &cut.amplitude;
    let (peak_idx, peak) = amp
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, a)| if a > best.1 { (i, a) } else { best });
    if !(peak > 0.0) {
        return Err(BeamError::NoMainLobe);
    }
    let threshold = peak * FRAC_1_SQRT_2;
    let mut lo = peak_idx;
    while lo > 0 && amp[lo - 1] >= threshold {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < amp.len() && amp[hi + 1] >= threshold {
        hi += 1;
    }
    // A lobe needs an edge on both sides, and the maximum must be unique.
    if lo == 0 || hi + 1 == amp.len() {
        return Err(BeamError::NoMainLobe);
    }
    let rival = amp
        .iter()
        .enumerate()
        .any(|(i, &a)| (i < lo || i > hi) && a >= peak * (1.0 - 1e-9));
    if rival {
        return Err(BeamError::NoMainLobe);
    }
    Ok((lo, hi))
}
