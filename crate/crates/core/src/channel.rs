//! LoS-MIMO channel matrices and their analytics.
//!
//! Entries follow the free-space form
//! `h = β·λ/(4πd)·sqrt(g)·e^{−jk·path}·e^{−jℓe·φ}` where `g` is the linear
//! transmit gain toward the receiver, so the gain enters as an amplitude.
//! Two propagation models are available, see [`Wavefront`].

use crate::beam::{BeamError, BeamKind, BeamPattern, BeamSpec, Truncation, WaveParameters};
use crate::geometry::{ArrayGeometry, GeometryError};
use crate::Complex64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

/// Ratios of squared singular values above this are reported as infinite.
pub const CONDITION_OVERFLOW: f64 = 1e18;
/// Condition numbers above this are flagged as numerically singular.
pub const SINGULAR_FLAG_THRESHOLD: f64 = 1e10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error("attenuation must be positive and finite, got {0}")]
    InvalidAttenuation(f64),
    #[error("channel entries must be finite")]
    NonFinite,
    #[error("channel matrix must have at least one row and one column")]
    Empty,
    #[error("expected {expected} beams (one per Tx), got {found}")]
    BeamCount { expected: usize, found: usize },
    #[error("receive row {0} has zero norm")]
    ZeroRow(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("channel JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    PlaneWave,
    NtcsOam(Vec<i32>),
    Measured,
}

/// Propagation model for the per-link terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wavefront {
    /// Far-field array approximation: the receive array sees one plane wave
    /// per transmitter. Path loss and transmit gain are taken along the
    /// array-to-array axis and are common to all links; the propagation phase
    /// is `k·(b_m·(r_n − r_m))`; OAM azimuthal phase is still resolved per link.
    #[default]
    Planar,
    /// Exact per-link distances, gains and propagation phase `k·d_{n,m}`.
    Spherical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
    frequency_hz: f64,
    attenuation: f64,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    n: usize,
    m: usize,
    frequency_hz: f64,
    entries: Vec<[f64; 2]>,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, frequency_hz: f64, attenuation: f64, provenance: Provenance) -> Result<Self, ChannelError> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(ChannelError::Empty);
        }
        if entries.iter().any(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(ChannelError::NonFinite);
        }
        if !(attenuation.is_finite() && attenuation > 0.0) {
            return Err(ChannelError::InvalidAttenuation(attenuation));
        }
        Ok(Self { entries, frequency_hz, attenuation, provenance })
    }

    /// Bare matrix with unit attenuation, for analytics on given data.
    pub fn measured(entries: CMatrix, frequency_hz: f64) -> Result<Self, ChannelError> {
        Self::new(entries, frequency_hz, 1.0, Provenance::Measured)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Entry `h_{n,m}` (zero-based).
    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn attenuation(&self) -> f64 {
        self.attenuation
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `{"n", "m", "frequency_hz", "entries": [[re, im], ...]}`, row-major.
    pub fn to_json(&self) -> String {
        let doc = ChannelJson {
            n: self.rows(),
            m: self.cols(),
            frequency_hz: self.frequency_hz,
            entries: (0..self.rows())
                .flat_map(|n| (0..self.cols()).map(move |m| (n, m)))
                .map(|(n, m)| [self.entries[(n, m)].re, self.entries[(n, m)].im])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("channel JSON serialisation cannot fail")
    }

    /// Reads the [`Self::to_json`] format; the result is marked measured.
    pub fn from_json(text: &str) -> Result<Self, ChannelError> {
        let doc: ChannelJson = serde_json::from_str(text).map_err(|e| ChannelError::Json(e.to_string()))?;
        if doc.entries.len() != doc.n * doc.m {
            return Err(ChannelError::Json(format!(
                "{} entries for a {}×{} matrix",
                doc.entries.len(),
                doc.n,
                doc.m
            )));
        }
        let entries = CMatrix::from_row_iterator(doc.n, doc.m, doc.entries.iter().map(|[re, im]| Complex64::new(*re, *im)));
        Self::measured(entries, doc.frequency_hz)
    }
}

fn check_attenuation(beta: f64) -> Result<(), ChannelError> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(ChannelError::InvalidAttenuation(beta))
    }
}

fn build(
    geom: &ArrayGeometry,
    wave: &WaveParameters,
    beta: f64,
    beams: &[BeamSpec],
    wavefront: Wavefront,
) -> Result<CMatrix, ChannelError> {
    check_attenuation(beta)?;
    if beams.len() != geom.tx_count() {
        return Err(ChannelError::BeamCount { expected: geom.tx_count(), found: beams.len() });
    }
    let patterns = beams
        .iter()
        .map(|b| BeamPattern::new(b, wave, Truncation::Auto))
        .collect::<Result<Vec<_>, _>>()?;
    let centroid = |poses: &[crate::geometry::AntennaPose]| {
        poses.iter().map(|p| p.position()).sum::<crate::geometry::Vec3>() / poses.len() as f64
    };
    let array_range = (centroid(geom.rx()) - centroid(geom.tx())).norm();
    let friis = |d: f64| beta * wave.wavelength_m / (4.0 * PI * d);

    let mut h = CMatrix::zeros(geom.rx_count(), geom.tx_count());
    for (m, pattern) in patterns.iter().enumerate() {
        let spec = pattern.spec();
        let boresight = geom.tx()[m].boresight();
        for n in 0..geom.rx_count() {
            let angles = geom.link_angles(n, m)?;
            let (theta_r, phi_r) = pattern.native_angles(angles.theta, angles.phi);
            let (amplitude, path) = match wavefront {
                Wavefront::Planar => {
                    let g = pattern.gain_toward(0.0, 0.0)?;
                    (friis(array_range) * g.sqrt(), geom.link_vector(n, m)?.dot(&boresight))
                }
                Wavefront::Spherical => {
                    let d = geom.link_distance(n, m)?;
                    (friis(d) * pattern.gain(theta_r, phi_r)?.sqrt(), d)
                }
            };
            let oam_phase = match spec.kind {
                BeamKind::PlaneWave => 0.0,
                BeamKind::NtcsOam => -f64::from(spec.equivalent_mode) * (phi_r - spec.boresight_azimuth),
            };
            h[(n, m)] = Complex64::from_polar(amplitude, -wave.wavenumber * path + oam_phase);
        }
    }
    Ok(h)
}

/// Channel of identical plane-wave transmitters with pattern `gain_model`.
pub fn plane_wave_channel(
    geom: &ArrayGeometry,
    wave: &WaveParameters,
    beta: f64,
    gain_model: &BeamSpec,
    wavefront: Wavefront,
) -> Result<ChannelMatrix, ChannelError> {
    if gain_model.kind != BeamKind::PlaneWave {
        return Err(BeamError::InvalidSpec("plane-wave channel needs a plane-wave gain model".into()).into());
    }
    let beams = vec![*gain_model; geom.tx_count()];
    let h = build(geom, wave, beta, &beams, wavefront)?;
    ChannelMatrix::new(h, wave.frequency_hz, beta, Provenance::PlaneWave)
}

/// Channel with one beam per transmitter; plane-wave beams contribute no
/// azimuthal phase.
pub fn oam_channel(
    geom: &ArrayGeometry,
    wave: &WaveParameters,
    beta: f64,
    beams: &[BeamSpec],
    wavefront: Wavefront,
) -> Result<ChannelMatrix, ChannelError> {
    let h = build(geom, wave, beta, beams, wavefront)?;
    let modes = beams.iter().map(|b| b.equivalent_mode).collect();
    ChannelMatrix::new(h, wave.frequency_hz, beta, Provenance::NtcsOam(modes))
}

fn row_correlation(h: &CMatrix, a: usize, b: usize) -> Result<f64, ChannelError> {
    let ra = h.row(a);
    let rb = h.row(b);
    let pa: f64 = ra.iter().map(|v| v.norm_sqr()).sum();
    let pb: f64 = rb.iter().map(|v| v.norm_sqr()).sum();
    if pa == 0.0 {
        return Err(ChannelError::ZeroRow(a));
    }
    if pb == 0.0 {
        return Err(ChannelError::ZeroRow(b));
    }
    let cross: Complex64 = ra.iter().zip(rb.iter()).map(|(x, y)| x * y.conj()).sum();
    Ok((cross.norm() / (pa * pb).sqrt()).min(1.0))
}

/// Correlation of every pair of receive rows; the diagonal is 1.
pub fn pairwise_correlation(h: &ChannelMatrix) -> Result<DMatrix<f64>, ChannelError> {
    let n = h.rows();
    let mut out = DMatrix::from_element(n, n, 1.0);
    for a in 0..n {
        for b in (a + 1)..n {
            let r = row_correlation(&h.entries, a, b)?;
            out[(a, b)] = r;
            out[(b, a)] = r;
        }
    }
    if n == 1 {
        row_correlation(&h.entries, 0, 0)?;
    }
    Ok(out)
}

/// Normalised inner product of the two receive rows; for more rows the
/// largest pairwise value. A single row has no partner and yields 0.
pub fn correlation_coefficient(h: &ChannelMatrix) -> Result<f64, ChannelError> {
    let pairs = pairwise_correlation(h)?;
    let n = h.rows();
    let mut rho: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            rho = rho.max(pairs[(a, b)]);
        }
    }
    Ok(rho)
}

/// `R = H·H^H`.
pub fn covariance(h: &ChannelMatrix) -> CMatrix {
    &h.entries * h.entries.adjoint()
}

/// Relative capacity `log2(N·(1 − ρ²))` of a two-row channel, where `N` is the
/// product of the row powers. Equals `log2 det(H·H^H)`; `−∞` when the rows are
/// linearly dependent.
pub fn capacity_approx(h: &ChannelMatrix) -> Result<f64, ChannelError> {
    if h.rows() != 2 {
        return Err(ChannelError::DimensionMismatch(format!("relative capacity needs 2 rows, got {}", h.rows())));
    }
    let e = &h.entries;
    let p1: f64 = e.row(0).iter().map(|v| v.norm_sqr()).sum();
    let p2: f64 = e.row(1).iter().map(|v| v.norm_sqr()).sum();
    if p1 == 0.0 {
        return Err(ChannelError::ZeroRow(0));
    }
    if p2 == 0.0 {
        return Err(ChannelError::ZeroRow(1));
    }
    let cross: Complex64 = e.row(0).iter().zip(e.row(1).iter()).map(|(x, y)| x * y.conj()).sum();
    // N·(1 − ρ²) = p1·p2 − |cross|²
    let det = p1 * p2 - cross.norm_sqr();
    if det <= 4.0 * f64::EPSILON * p1 * p2 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(det.log2())
}

/// Singular values, descending.
pub fn singular_values(h: &ChannelMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = h.entries.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Squared ratio of largest to smallest singular value; infinite when that
/// ratio exceeds [`CONDITION_OVERFLOW`] or the smallest value is zero.
pub fn condition_number(h: &ChannelMatrix) -> f64 {
    condition_from_singular_values(&singular_values(h))
}

pub fn condition_from_singular_values(sv: &[f64]) -> f64 {
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    if max == 0.0 {
        return f64::INFINITY;
    }
    let ratio = (max / min).powi(2);
    if !ratio.is_finite() || ratio > CONDITION_OVERFLOW {
        f64::INFINITY
    } else {
        ratio
    }
}

pub fn is_numerically_singular(condition: f64) -> bool {
    condition > SINGULAR_FLAG_THRESHOLD
}

/// `log2 det(I + (snr/m)·Ĥ·Ĥ^H)` with `Ĥ` scaled so that the mean receive-row
/// power `‖Ĥ‖²/n` is one; `snr` is then the SNR at each receiver, as in the
/// link simulation.
pub fn shannon_capacity(h: &ChannelMatrix, snr: f64) -> f64 {
    let row_power = h.entries.iter().map(|v| v.norm_sqr()).sum::<f64>() / h.rows() as f64;
    if !(snr > 0.0) || row_power == 0.0 {
        return 0.0;
    }
    let scale = snr / h.cols() as f64 / row_power;
    singular_values(h).iter().map(|s| (1.0 + scale * s * s).log2()).sum()
}

/// All analytics of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelAnalytics {
    pub rho: f64,
    pub covariance: CMatrix,
    pub singular_values: Vec<f64>,
    pub condition_number: f64,
    /// Relative capacity; `None` unless the channel has two rows.
    pub capacity_rel: Option<f64>,
    pub capacity_shannon: f64,
    /// Linear SNR at which `capacity_shannon` was evaluated.
    pub snr: f64,
}

impl ChannelAnalytics {
    pub fn compute(h: &ChannelMatrix, snr: f64) -> Result<Self, ChannelError> {
        let singular_values = singular_values(h);
        Ok(Self {
            rho: correlation_coefficient(h)?,
            covariance: covariance(h),
            condition_number: condition_from_singular_values(&singular_values),
            singular_values,
            capacity_rel: if h.rows() == 2 { Some(capacity_approx(h)?) } else { None },
            capacity_shannon: shannon_capacity(h, snr),
            snr,
        })
    }

    pub fn numerically_singular(&self) -> bool {
        is_numerically_singular(self.condition_number)
    }
}
