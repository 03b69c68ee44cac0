//! Field evaluation: single OAM mode, NTCS mode superposition and the
//! idealised plane-wave horn.

use super::{bessel_j, bessel_j_table, check_distance, BeamError, BeamKind, BeamSpec, Truncation, WaveParameters, TAIL_TOLERANCE};
use crate::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Unnormalised sinc, `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Mode weight `sinc(φc·n/2)`, exactly zero where the argument is a nonzero
/// multiple of π so that a full ring collapses to a single mode.
fn mode_weight(arc_angle: f64, offset: i64) -> f64 {
    if offset == 0 {
        return 1.0;
    }
    let turns = arc_angle * offset as f64 / TAU;
    if (turns - turns.round()).abs() < 1e-12 {
        0.0
    } else {
        sinc(arc_angle * offset as f64 / 2.0)
    }
}

fn distance_factor(spec: &BeamSpec, wave: &WaveParameters, d: f64) -> Complex64 {
    Complex64::from_polar(spec.amplitude_scale / (2.0 * d), -wave.wavenumber * d)
}

/// Field of a full-ring source carrying the single mode `spec.equivalent_mode`
/// (mode 0 allowed): `A·e^{−jkd}/(2d)·J_ℓ(kr sinθ)·e^{−jℓφ}`.
pub fn single_mode_field(
    spec: &BeamSpec,
    wave: &WaveParameters,
    d: f64,
    theta: f64,
    phi: f64,
) -> Result<Complex64, BeamError> {
    check_distance(d)?;
    if spec.kind != BeamKind::NtcsOam {
        return Err(BeamError::InvalidSpec("single-mode field needs an NTCS source".into()));
    }
    spec.validate_source()?;
    if (spec.arc_angle - TAU).abs() > 1e-12 {
        return Err(BeamError::InvalidSpec("single-mode field needs a full-ring source (φc = 2π)".into()));
    }
    let l = spec.equivalent_mode;
    let j = bessel_j(l, wave.wavenumber * spec.source_radius_m * theta.sin());
    Ok(distance_factor(spec, wave, d) * j * Complex64::from_polar(1.0, -f64::from(l) * phi))
}

/// Sinc-weighted mode spectrum of an NTCS source at one polar angle.
///
/// Holds `w_ℓ·J_ℓ(kr sinθ)·e^{−jℓe·φc/2}` for every retained `ℓ`, so that the
/// azimuthal dependence can be evaluated cheaply for many `φ`.
#[derive(Debug, Clone)]
pub struct ModeSpectrum {
    first_mode: i64,
    coefficients: Vec<Complex64>,
    boresight_azimuth: f64,
    truncation: usize,
}

impl ModeSpectrum {
    pub fn new(spec: &BeamSpec, wave: &WaveParameters, theta: f64, truncation: Truncation) -> Result<Self, BeamError> {
        if spec.kind != BeamKind::NtcsOam {
            return Err(BeamError::InvalidSpec("mode spectrum needs an NTCS source".into()));
        }
        spec.validate()?;
        let x = wave.wavenumber * spec.source_radius_m * theta.sin();
        let k = truncation.resolve(spec.equivalent_mode, x)?;
        let le = i64::from(spec.equivalent_mode);
        let first_mode = le - k as i64;
        let last_mode = le + k as i64;

        // Orders needed: the retained window, plus every order that could
        // still carry weight when checking an explicit truncation.
        let reach = x.abs().ceil() as i64 + 40;
        let max_order = first_mode.abs().max(last_mode.abs()).max(reach) as usize;
        let table = bessel_j_table(max_order, x.abs());
        let bessel = |order: i64| -> f64 {
            let v = table[order.unsigned_abs() as usize];
            let odd = order.rem_euclid(2) == 1;
            // Negative order and negative argument each contribute (−1)^n.
            let flips = u32::from(order < 0) + u32::from(x < 0.0);
            if odd && flips == 1 {
                -v
            } else {
                v
            }
        };

        let centre_phase = Complex64::from_polar(1.0, -f64::from(spec.equivalent_mode) * spec.arc_angle / 2.0);
        let mut retained_mass = 0.0;
        let coefficients: Vec<Complex64> = (first_mode..=last_mode)
            .map(|l| {
                let term = mode_weight(spec.arc_angle, l - le) * bessel(l);
                retained_mass += term.abs();
                centre_phase * term
            })
            .collect();

        if let Truncation::Terms(_) = truncation {
            let omitted = (-reach..=reach)
                .filter(|l| (l - le).unsigned_abs() as usize > k)
                .map(|l| (mode_weight(spec.arc_angle, l - le) * bessel(l)).abs())
                .fold(0.0_f64, f64::max);
            if omitted > 0.0 {
                let ratio = omitted / retained_mass;
                if !(ratio <= TAIL_TOLERANCE) {
                    return Err(BeamError::TruncationTooSmall { truncation: k, ratio });
                }
            }
        }

        Ok(Self { first_mode, coefficients, boresight_azimuth: spec.boresight_azimuth, truncation: k })
    }

    /// `Σ_ℓ c_ℓ·e^{−jℓ(φ−φd)}`, the field without the distance factor.
    pub fn evaluate(&self, phi: f64) -> Complex64 {
        let psi = phi - self.boresight_azimuth;
        let step = Complex64::from_polar(1.0, -psi);
        let mut rot = Complex64::from_polar(1.0, -(self.first_mode as f64) * psi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coefficients.iter().enumerate() {
            acc += c * rot;
            rot *= step;
            // Re-anchor occasionally so rounding in the rotation cannot drift.
            if i % 64 == 63 {
                rot = Complex64::from_polar(1.0, -((self.first_mode + i as i64 + 1) as f64) * psi);
            }
        }
        acc
    }

    /// Half width `K` actually used.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Squared weights `Σ sinc²` of the retained window (no Bessel factor).
    pub fn weight_energy(arc_angle: f64, truncation: usize) -> f64 {
        let k = truncation as i64;
        (-k..=k).map(|n| mode_weight(arc_angle, n).powi(2)).sum()
    }
}

/// NTCS far field: the sinc-weighted OAM mode superposition.
pub fn ntcs_field(
    spec: &BeamSpec,
    wave: &WaveParameters,
    d: f64,
    theta: f64,
    phi: f64,
    truncation: Truncation,
) -> Result<Complex64, BeamError> {
    check_distance(d)?;
    let spectrum = ModeSpectrum::new(spec, wave, theta, truncation)?;
    Ok(distance_factor(spec, wave, d) * spectrum.evaluate(phi))
}

/// Exponent `q` of the idealised `cos^q` power pattern whose directivity over
/// the forward hemisphere, `2(q+1)`, equals the peak gain.
pub fn plane_wave_exponent(spec: &BeamSpec) -> f64 {
    (spec.peak_gain_linear() / 2.0 - 1.0).max(0.0)
}

/// Angle between `(θ, φ)` and the plane-wave main direction `(π/2, φd)`.
pub(crate) fn plane_wave_off_axis_cos(spec: &BeamSpec, theta: f64, phi: f64) -> f64 {
    theta.sin() * (phi - spec.boresight_azimuth).cos()
}

/// Idealised horn: flat phase, `cos^{q/2}` amplitude about `(π/2, φd)`,
/// nothing radiated into the back hemisphere.
pub fn plane_wave_field(spec: &BeamSpec, wave: &WaveParameters, d: f64, theta: f64, phi: f64) -> Result<Complex64, BeamError> {
    check_distance(d)?;
    spec.validate()?;
    let c = plane_wave_off_axis_cos(spec, theta, phi);
    let amplitude = if c > 0.0 { c.powf(plane_wave_exponent(spec) / 2.0) } else { 0.0 };
    Ok(distance_factor(spec, wave, d) * amplitude)
}

/// Dispatches on the beam kind.
pub(crate) fn beam_field(
    spec: &BeamSpec,
    wave: &WaveParameters,
    d: f64,
    theta: f64,
    phi: f64,
    truncation: Truncation,
) -> Result<Complex64, BeamError> {
    match spec.kind {
        BeamKind::PlaneWave => plane_wave_field(spec, wave, d, theta, phi),
        BeamKind::NtcsOam => ntcs_field(spec, wave, d, theta, phi, truncation),
    }
}

/// Main direction of a plane-wave spec in its own frame.
pub(crate) fn plane_wave_main_direction(spec: &BeamSpec) -> (f64, f64) {
    (FRAC_PI_2, spec.boresight_azimuth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{radius_for_mode, WaveguideSpec, DEFAULT_ARC_ANGLE};
    use std::f64::consts::PI;

fn wrap_angle(a: f64) -> f64 {
        let w = (a + PI).rem_euclid(TAU) - PI;
        if w == -PI {
            PI
        } else {
            w
        }
    }


    fn wave() -> WaveParameters {
        WaveParameters::from_frequency(10e9).unwrap()
    }

    fn ring(mode: i32, radius: f64) -> BeamSpec {
        BeamSpec::ntcs(mode, TAU, 0.0, radius).unwrap()
    }

    #[test]
    fn sinc_basics() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(FRAC_PI_2) - 2.0 / PI).abs() < 1e-15);
        assert_eq!(mode_weight(FRAC_PI_2, 0), 1.0);
    }

    #[test]
    fn quarter_arc_weights_vanish_every_fourth_mode() {
        for k in 1..20 {
            assert_eq!(mode_weight(FRAC_PI_2, 4 * k), 0.0);
            assert_eq!(mode_weight(FRAC_PI_2, -4 * k), 0.0);
            assert!(mode_weight(FRAC_PI_2, 4 * k + 1).abs() > 0.0);
        }
    }

    #[test]
    fn single_mode_on_axis() {
        let w = wave();
        let on_axis = single_mode_field(&ring(5, 0.1), &w, 3.0, 0.0, 0.7).unwrap();
        assert_eq!(on_axis.norm(), 0.0);
        let mut zero = ring(5, 0.1);
        zero.equivalent_mode = 0;
        let u = single_mode_field(&zero, &w, 3.0, 0.0, 0.7).unwrap();
        assert!((u.norm() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn single_mode_phase_winds_with_azimuth() {
        let w = wave();
        let spec = ring(7, 0.1);
        let a = single_mode_field(&spec, &w, 2.0, 0.4, 0.2).unwrap();
        let b = single_mode_field(&spec, &w, 2.0, 0.4, 0.5).unwrap();
        let diff = (a * b.conj()).arg();
        assert!((diff - wrap_angle(-7.0 * (0.2 - 0.5))).abs() < 1e-12);
    }

    #[test]
    fn single_mode_rejects_partial_arc_and_bad_distance() {
        let w = wave();
        let spec = BeamSpec::ntcs(3, FRAC_PI_2, 0.0, 0.1).unwrap();
        assert!(single_mode_field(&spec, &w, 1.0, 0.3, 0.0).is_err());
        assert_eq!(
            single_mode_field(&ring(3, 0.1), &w, 0.0, 0.3, 0.0),
            Err(BeamError::InvalidDistance(0.0))
        );
    }

    #[test]
    fn full_ring_reduces_to_single_mode() {
        let w = wave();
        let spec = ring(30, 0.178);
        for i in 0..181 {
            let phi = -PI + i as f64 * TAU / 180.0;
            let theta = 0.9;
            let a = ntcs_field(&spec, &w, 5.0, theta, phi, Truncation::Terms(64)).unwrap();
            let b = single_mode_field(&spec, &w, 5.0, theta, phi).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm());
        }
    }

    #[test]
    fn full_ring_odd_mode_differs_by_centre_phase_sign() {
        // e^{−jℓe·φc/2} = (−1)^ℓe for a full ring.
        let w = wave();
        let spec = ring(7, 0.05);
        let a = ntcs_field(&spec, &w, 5.0, 0.9, 0.4, Truncation::Auto).unwrap();
        let b = single_mode_field(&spec, &w, 5.0, 0.9, 0.4).unwrap();
        assert!((a + b).norm() <= 1e-9 * b.norm());
    }

    #[test]
    fn directional_main_lobe_is_not_void() {
        let w = wave();
        let spec = BeamSpec::ntcs_for_waveguide(30, DEFAULT_ARC_ANGLE, &w, &WaveguideSpec::wr90()).unwrap();
        let u = ntcs_field(&spec, &w, 1.0, 0.9, 0.0, Truncation::Auto).unwrap();
        assert!(u.norm() > 1e-3);
    }

    #[test]
    fn explicit_truncation_that_is_too_small_is_reported() {
        let w = wave();
        let r = radius_for_mode(45, &w, &WaveguideSpec::wr90()).unwrap();
        let spec = BeamSpec::ntcs(45, DEFAULT_ARC_ANGLE, 0.0, r).unwrap();
        // k·r ≈ 57: the Bessel content reaches |ℓ| ≈ 57, far beyond ℓe ± 4.
        let err = ntcs_field(&spec, &w, 1.0, FRAC_PI_2, 0.0, Truncation::Terms(4));
        assert!(matches!(err, Err(BeamError::TruncationTooSmall { .. })));
        assert!(ntcs_field(&spec, &w, 1.0, FRAC_PI_2, 0.0, Truncation::Terms(200)).is_ok());
    }

    #[test]
    fn auto_truncation_agrees_with_wide_explicit_sum() {
        let w = wave();
        let spec = BeamSpec::ntcs(30, DEFAULT_ARC_ANGLE, 0.0, 0.178).unwrap();
        for &theta in &[0.2, 0.7, 1.3, FRAC_PI_2] {
            let a = ntcs_field(&spec, &w, 1.0, theta, 0.1, Truncation::Auto).unwrap();
            let b = ntcs_field(&spec, &w, 1.0, theta, 0.1, Truncation::Terms(400)).unwrap();
            assert!((a - b).norm() < 1e-9 * b.norm().max(1e-12));
        }
    }

    #[test]
    fn plane_wave_field_shape() {
        let w = wave();
        let spec = BeamSpec::plane_wave(16.0);
        let peak = plane_wave_field(&spec, &w, 1.0, FRAC_PI_2, 0.0).unwrap();
        assert!((peak.norm() - 0.5).abs() < 1e-15);
        let back = plane_wave_field(&spec, &w, 1.0, FRAC_PI_2, PI).unwrap();
        assert_eq!(back.norm(), 0.0);
        assert!((plane_wave_exponent(&spec) - (10f64.powf(1.6) / 2.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
    }
}
