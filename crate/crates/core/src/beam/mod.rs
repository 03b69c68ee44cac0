//! Far-field models of plane-wave and NTCS-OAM transmitters.
//!
//! An NTCS (non-uniform traveling-wave current source) is an arc of angle
//! `φc` cut from a ring of radius `r`. Its far field is a sinc-weighted
//! superposition of OAM modes centred on the equivalent mode `ℓe`, which
//! produces a directional main lobe whose wavefront phase still winds as
//! `e^{−jℓe·φ}`.
//!
//! Angles inside this module are in the beam's own spherical frame: `θ` is
//! measured from the ring axis and `φ` around it. Mapping a link direction
//! into that frame is done by [`BeamPattern::native_angles`].

mod bessel;
mod cut;
mod field;
mod pattern;

pub use bessel::{bessel_j, bessel_j_table};
pub use cut::{main_lobe_phase_slope, pattern_cut, unwrap_phase, PatternCut};
pub use field::{plane_wave_exponent, ntcs_field, plane_wave_field, single_mode_field, sinc, ModeSpectrum};
pub use pattern::{first_bessel_maximum, cone_angle, gain_pattern, BeamPattern};

use crate::SPEED_OF_LIGHT;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Mode-sum half width used when a fixed truncation is not requested.
pub const DEFAULT_TRUNCATION: usize = 64;
/// Largest omitted `|weight·J_ℓ|` tolerated, relative to the retained mass.
pub const TAIL_TOLERANCE: f64 = 1e-4;
/// Antenna peak gain used by the reference hardware, dB.
pub const DEFAULT_PEAK_GAIN_DB: f64 = 16.0;
/// Arc angle of the reference NTCS radiator.
pub const DEFAULT_ARC_ANGLE: f64 = FRAC_PI_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("evanescent TE10 mode: wavelength {wavelength_m} m is not below 2·s_w = {limit_m} m")]
    EvanescentMode { wavelength_m: f64, limit_m: f64 },
    #[error("mode {mode} needs a non-positive arc radius ({radius_m} m) in this waveguide")]
    NonPhysicalRadius { mode: i32, radius_m: f64 },
    #[error("equivalent mode must be nonzero")]
    ZeroMode,
    #[error("distance must be positive and finite, got {0}")]
    InvalidDistance(f64),
    #[error("invalid beam specification: {0}")]
    InvalidSpec(String),
    #[error("invalid frequency {0} Hz")]
    InvalidFrequency(f64),
    #[error("invalid waveguide: {0}")]
    InvalidWaveguide(String),
    #[error("truncation K = {truncation} omits a term {ratio:.3e} of the retained mode mass")]
    TruncationTooSmall { truncation: usize, ratio: f64 },
    #[error("invalid azimuth grid: {0}")]
    InvalidGrid(String),
    #[error("invalid pattern cut: {0}")]
    InvalidCut(String),
    #[error("no 3 dB main lobe found in the cut")]
    NoMainLobe,
    #[error("only {found} samples inside the 3 dB window, need {required}")]
    InsufficientSamples { found: usize, required: usize },
}

/// Free-space wave quantities derived from the carrier frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub wavenumber: f64,
}

impl WaveParameters {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self, BeamError> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(BeamError::InvalidFrequency(frequency_hz));
        }
        let wavelength_m = SPEED_OF_LIGHT / frequency_hz;
        Ok(Self { frequency_hz, wavelength_m, wavenumber: TAU / wavelength_m })
    }
}

/// Rectangular waveguide cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSpec {
    pub wide_side_m: f64,
    pub narrow_side_m: f64,
}

impl WaveguideSpec {
    pub fn new(wide_side_m: f64, narrow_side_m: f64) -> Result<Self, BeamError> {
        if !(narrow_side_m.is_finite() && wide_side_m.is_finite()) {
            return Err(BeamError::InvalidWaveguide("sides must be finite".into()));
        }
        if !(narrow_side_m > 0.0 && wide_side_m > narrow_side_m) {
            return Err(BeamError::InvalidWaveguide(format!(
                "need s_w > s_n > 0, got s_w = {wide_side_m}, s_n = {narrow_side_m}"
            )));
        }
        Ok(Self { wide_side_m, narrow_side_m })
    }

    /// WR-90 X-band guide.
    pub fn wr90() -> Self {
        Self { wide_side_m: 0.02286, narrow_side_m: 0.01016 }
    }

    fn check_propagates(&self, wave: &WaveParameters) -> Result<(), BeamError> {
        let limit_m = 2.0 * self.wide_side_m;
        if wave.wavelength_m >= limit_m {
            return Err(BeamError::EvanescentMode { wavelength_m: wave.wavelength_m, limit_m });
        }
        Ok(())
    }
}

/// Guide wavelength of the TE10 mode, `λ0 / sqrt(1 − (λ0/2s_w)²)`.
pub fn cutoff_wavelength(wg: &WaveguideSpec, wave: &WaveParameters) -> Result<f64, BeamError> {
    wg.check_propagates(wave)?;
    let ratio = wave.wavelength_m / (2.0 * wg.wide_side_m);
    Ok(wave.wavelength_m / (1.0 - ratio * ratio).sqrt())
}

/// Arc radius at which the traveling wave in the guide radiates mode `mode`.
pub fn radius_for_mode(mode: i32, wave: &WaveParameters, wg: &WaveguideSpec) -> Result<f64, BeamError> {
    if mode == 0 {
        return Err(BeamError::ZeroMode);
    }
    wg.check_propagates(wave)?;
    let two_over_lambda = 2.0 / wave.wavelength_m;
    let inv_sw = 1.0 / wg.wide_side_m;
    let root = (two_over_lambda * two_over_lambda - inv_sw * inv_sw).sqrt();
    let radius_m = f64::from(mode.unsigned_abs()) / (PI * root) - wg.wide_side_m / 2.0;
    if radius_m <= 0.0 {
        return Err(BeamError::NonPhysicalRadius { mode, radius_m });
    }
    Ok(radius_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamKind {
    PlaneWave,
    NtcsOam,
}

/// Radiation model of one transmitter.
///
/// For [`BeamKind::PlaneWave`] only `peak_gain_db`, `boresight_azimuth` and
/// `amplitude_scale` matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    pub kind: BeamKind,
    pub equivalent_mode: i32,
    pub arc_angle: f64,
    pub boresight_azimuth: f64,
    pub source_radius_m: f64,
    pub peak_gain_db: f64,
    pub amplitude_scale: f64,
}

impl BeamSpec {
    pub fn plane_wave(peak_gain_db: f64) -> Self {
        Self {
            kind: BeamKind::PlaneWave,
            equivalent_mode: 0,
            arc_angle: TAU,
            boresight_azimuth: 0.0,
            source_radius_m: 0.0,
            peak_gain_db,
            amplitude_scale: 1.0,
        }
    }

    pub fn ntcs(mode: i32, arc_angle: f64, boresight_azimuth: f64, source_radius_m: f64) -> Result<Self, BeamError> {
        let spec = Self {
            kind: BeamKind::NtcsOam,
            equivalent_mode: mode,
            arc_angle,
            boresight_azimuth,
            source_radius_m,
            peak_gain_db: DEFAULT_PEAK_GAIN_DB,
            amplitude_scale: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// NTCS radiator whose radius is sized from the waveguide for `mode`.
    pub fn ntcs_for_waveguide(
        mode: i32,
        arc_angle: f64,
        wave: &WaveParameters,
        wg: &WaveguideSpec,
    ) -> Result<Self, BeamError> {
        let radius = radius_for_mode(mode, wave, wg)?;
        Self::ntcs(mode, arc_angle, 0.0, radius)
    }

    pub fn with_peak_gain_db(mut self, peak_gain_db: f64) -> Self {
        self.peak_gain_db = peak_gain_db;
        self
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        if !self.peak_gain_db.is_finite() {
            return Err(BeamError::InvalidSpec("peak gain must be finite".into()));
        }
        if !(self.amplitude_scale.is_finite() && self.amplitude_scale > 0.0) {
            return Err(BeamError::InvalidSpec("amplitude scale must be positive".into()));
        }
        if !self.boresight_azimuth.is_finite() {
            return Err(BeamError::InvalidSpec("boresight azimuth must be finite".into()));
        }
        if self.kind == BeamKind::NtcsOam {
            if self.equivalent_mode == 0 {
                return Err(BeamError::ZeroMode);
            }
            self.validate_source()?;
        }
        Ok(())
    }

    /// Arc and radius checks shared with the single-mode field, which also
    /// accepts mode 0.
    pub(crate) fn validate_source(&self) -> Result<(), BeamError> {
        if !(self.arc_angle > 0.0 && self.arc_angle <= TAU) {
            return Err(BeamError::InvalidSpec(format!("arc angle {} outside (0, 2π]", self.arc_angle)));
        }
        if !(self.source_radius_m.is_finite() && self.source_radius_m > 0.0) {
            return Err(BeamError::InvalidSpec(format!(
                "source radius must be positive, got {}",
                self.source_radius_m
            )));
        }
        Ok(())
    }

    pub fn peak_gain_linear(&self) -> f64 {
        10f64.powf(self.peak_gain_db / 10.0)
    }
}

/// How many modes on each side of `ℓe` enter the NTCS mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// At least [`DEFAULT_TRUNCATION`], widened until every Bessel term that
    /// is not vanishingly small at the evaluation angle is retained.
    #[default]
    Auto,
    /// Exactly `K` modes on each side, checked against [`TAIL_TOLERANCE`].
    Terms(usize),
}

impl Truncation {
    pub(crate) fn resolve(self, mode: i32, bessel_arg: f64) -> Result<usize, BeamError> {
        match self {
            Truncation::Auto => {
                let span = mode.unsigned_abs() as usize + bessel_arg.abs().ceil() as usize + 40;
                Ok(span.max(DEFAULT_TRUNCATION))
            }
            Truncation::Terms(0) => Err(BeamError::InvalidSpec("truncation K must be at least 1".into())),
            Truncation::Terms(k) => Ok(k),
        }
    }
}

pub(crate) fn check_distance(d: f64) -> Result<(), BeamError> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(BeamError::InvalidDistance(d))
    }
}
