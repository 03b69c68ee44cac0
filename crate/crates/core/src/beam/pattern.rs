//! Gain normalisation, main-lobe location and the antenna mounting frame.

use super::field::{beam_field, plane_wave_main_direction, ModeSpectrum};
use super::{bessel_j, BeamError, BeamKind, BeamSpec, Truncation, WaveParameters};
use crate::Complex64;
use nalgebra::Vector3;
use std::f64::consts::{FRAC_PI_2, PI};

/// A beam together with its gain normalisation and main-lobe direction.
///
/// Gains are `|U|²` scaled so that the pattern maximum equals the spec's peak
/// gain. The maximum of an NTCS pattern is located by a 1° grid search over
/// the upper hemisphere (the pattern depends on `θ` only through `sinθ`)
/// followed by a shrinking-step local search.
#[derive(Debug, Clone)]
pub struct BeamPattern {
    spec: BeamSpec,
    wave: WaveParameters,
    truncation: Truncation,
    peak_power: f64,
    main_lobe: (f64, f64),
    e_r: Vector3<f64>,
    e_theta: Vector3<f64>,
    e_phi: Vector3<f64>,
}

impl BeamPattern {
    pub fn new(spec: &BeamSpec, wave: &WaveParameters, truncation: Truncation) -> Result<Self, BeamError> {
        spec.validate()?;
        let (main_lobe, peak_power) = match spec.kind {
            BeamKind::PlaneWave => {
                let dir = plane_wave_main_direction(spec);
                let u = beam_field(spec, wave, 1.0, dir.0, dir.1, truncation)?;
                (dir, u.norm_sqr())
            }
            BeamKind::NtcsOam => locate_peak(spec, wave, truncation)?,
        };
        if !(peak_power > 0.0) {
            return Err(BeamError::InvalidSpec("pattern radiates no power".into()));
        }
        let (t, p) = main_lobe;
        let e_r = Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
        let e_theta = Vector3::new(t.cos() * p.cos(), t.cos() * p.sin(), -t.sin());
        let e_phi = Vector3::new(-p.sin(), p.cos(), 0.0);
        Ok(Self { spec: *spec, wave: *wave, truncation, peak_power, main_lobe, e_r, e_theta, e_phi })
    }

    pub fn spec(&self) -> &BeamSpec {
        &self.spec
    }

    /// Direction `(θ, φ)` of the pattern maximum in the beam's own frame.
    pub fn main_lobe(&self) -> (f64, f64) {
        self.main_lobe
    }

    /// Field at unit distance.
    pub fn field(&self, theta: f64, phi: f64) -> Result<Complex64, BeamError> {
        beam_field(&self.spec, &self.wave, 1.0, theta, phi, self.truncation)
    }

    /// Linear gain, equal to the peak gain at [`Self::main_lobe`].
    pub fn gain(&self, theta: f64, phi: f64) -> Result<f64, BeamError> {
        Ok(self.spec.peak_gain_linear() * self.field(theta, phi)?.norm_sqr() / self.peak_power)
    }

    /// Converts a direction given relative to the mounting (polar angle from
    /// the boresight, azimuth from the horizontal reference axis) into the
    /// beam's own frame.
    ///
    /// The antenna is mounted with its main lobe on the boresight, the
    /// direction of increasing source azimuth along the horizontal reference
    /// axis, and the ring axis tilted toward the vertical reference axis.
    pub fn native_angles(&self, theta_b: f64, phi_b: f64) -> (f64, f64) {
        let n = self.e_r * theta_b.cos() + (self.e_phi * phi_b.cos() - self.e_theta * phi_b.sin()) * theta_b.sin();
        (n.z.clamp(-1.0, 1.0).acos(), n.y.atan2(n.x))
    }

    /// Gain toward a direction given relative to the mounting.
    pub fn gain_toward(&self, theta_b: f64, phi_b: f64) -> Result<f64, BeamError> {
        let (t, p) = self.native_angles(theta_b, phi_b);
        self.gain(t, p)
    }
}

fn power_at(spec: &BeamSpec, wave: &WaveParameters, truncation: Truncation, theta: f64, phi: f64) -> Result<f64, BeamError> {
    Ok(ModeSpectrum::new(spec, wave, theta, truncation)?.evaluate(phi).norm_sqr())
}

fn locate_peak(spec: &BeamSpec, wave: &WaveParameters, truncation: Truncation) -> Result<((f64, f64), f64), BeamError> {
    let deg = PI / 180.0;
    let mut best = ((FRAC_PI_2, spec.boresight_azimuth), f64::NEG_INFINITY);
    for i in 1..=90 {
        let theta = i as f64 * deg;
        let spectrum = ModeSpectrum::new(spec, wave, theta, truncation)?;
        for j in 0..360 {
            let phi = spec.boresight_azimuth - PI + j as f64 * deg;
            let p = spectrum.evaluate(phi).norm_sqr();
            if p > best.1 {
                best = ((theta, phi), p);
            }
        }
    }
    let ((mut theta, mut phi), mut power) = best;
    let mut step = 0.5 * deg;
    while step > 1e-10 {
        let mut moved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let t = (theta + dt * step).clamp(1e-9, FRAC_PI_2);
            let p = phi + dp * step;
            let candidate = power_at(spec, wave, truncation, t, p)?;
            if candidate > power {
                theta = t;
                phi = p;
                power = candidate;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let scale = spec.amplitude_scale / 2.0;
    Ok(((theta, phi), power * scale * scale))
}

/// First maximum of `J_ν` on the positive axis.
pub fn first_bessel_maximum(nu: i32) -> f64 {
    let n = f64::from(nu.unsigned_abs());
    let upper = n + 2.0 * n.cbrt() + 3.0;
    let samples = 2000;
    let h = upper / samples as f64;
    let f = |x: f64| bessel_j(nu.abs(), x);
    let mut i = 1;
    while i < samples && f((i + 1) as f64 * h) >= f(i as f64 * h) {
        i += 1;
    }
    // Golden-section refinement on [x_{i−1}, x_{i+1}].
    let (mut a, mut b) = ((i - 1) as f64 * h, (i + 1) as f64 * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

/// Polar angle of the cone on which the equivalent mode `J_ℓe(kr sinθ)` peaks,
/// `asin(x₁/kr)` with `x₁` the first maximum of `J_ℓe`; `π/2` when the ring is
/// too small for that maximum to be reached, and for plane-wave specs.
pub fn cone_angle(spec: &BeamSpec, wave: &WaveParameters) -> f64 {
    if spec.kind == BeamKind::PlaneWave {
        return FRAC_PI_2;
    }
    let kr = wave.wavenumber * spec.source_radius_m;
    let x1 = first_bessel_maximum(spec.equivalent_mode);
    if x1 >= kr {
        FRAC_PI_2
    } else {
        (x1 / kr).asin()
    }
}

/// Linear gain of `spec` at `(θ, φ)`; see [`BeamPattern`].
pub fn gain_pattern(
    spec: &BeamSpec,
    wave: &WaveParameters,
    theta: f64,
    phi: f64,
    truncation: Truncation,
) -> Result<f64, BeamError> {
    BeamPattern::new(spec, wave, truncation)?.gain(theta, phi)
}
