//! Antenna placements and per-link geometry.
//!
//! World axes: `x` runs along the arrays, `y` from the Tx array toward the Rx
//! array, `z` is up. Link azimuths are measured in the plane orthogonal to a
//! transmitter's boresight, from the horizontal axis `b × ẑ` (to the right
//! when looking along the boresight) toward the upward axis.

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("{side} index {index} out of range (count {count})")]
    IndexOutOfRange { side: &'static str, index: usize, count: usize },
    #[error("Rx {n} coincides with Tx {m}")]
    DegenerateDirection { n: usize, m: usize },
}

/// Position and pointing direction of one antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPose {
    position: Vec3,
    boresight: Vec3,
}

impl AntennaPose {
    /// `boresight` is normalised; it must be finite and nonzero.
    pub fn new(position: Vec3, boresight: Vec3) -> Result<Self, GeometryError> {
        let norm = boresight.norm();
        if !(position.iter().all(|v| v.is_finite()) && norm.is_finite() && norm > 0.0) {
            return Err(GeometryError::InvalidGeometry("pose needs finite position and nonzero boresight".into()));
        }
        Ok(Self { position, boresight: boresight / norm })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn boresight(&self) -> Vec3 {
        self.boresight
    }

    /// Horizontal and vertical reference axes orthogonal to the boresight.
    pub fn reference_axes(&self) -> (Vec3, Vec3) {
        let b = self.boresight;
        let mut u = b.cross(&Vec3::z());
        if u.norm() < 1e-12 {
            u = Vec3::x();
        }
        let u = u.normalize();
        (u, u.cross(&b))
    }
}

/// Polar angle from the boresight and azimuth about it, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAngles {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    tx: Vec<AntennaPose>,
    rx: Vec<AntennaPose>,
}

impl ArrayGeometry {
    pub fn new(tx: Vec<AntennaPose>, rx: Vec<AntennaPose>) -> Result<Self, GeometryError> {
        if tx.is_empty() || rx.is_empty() {
            return Err(GeometryError::InvalidGeometry("need at least one Tx and one Rx".into()));
        }
        for (n, r) in rx.iter().enumerate() {
            for (m, t) in tx.iter().enumerate() {
                if (r.position - t.position).norm() <= 0.0 {
                    return Err(GeometryError::DegenerateDirection { n, m });
                }
            }
        }
        Ok(Self { tx, rx })
    }

    pub fn tx(&self) -> &[AntennaPose] {
        &self.tx
    }

    pub fn rx(&self) -> &[AntennaPose] {
        &self.rx
    }

    pub fn tx_count(&self) -> usize {
        self.tx.len()
    }

    pub fn rx_count(&self) -> usize {
        self.rx.len()
    }

    fn pair(&self, n: usize, m: usize) -> Result<(&AntennaPose, &AntennaPose), GeometryError> {
        let rx = self.rx.get(n).ok_or(GeometryError::IndexOutOfRange { side: "Rx", index: n, count: self.rx.len() })?;
        let tx = self.tx.get(m).ok_or(GeometryError::IndexOutOfRange { side: "Tx", index: m, count: self.tx.len() })?;
        Ok((rx, tx))
    }

    /// Vector from Tx `m` to Rx `n` (zero-based indices).
    pub fn link_vector(&self, n: usize, m: usize) -> Result<Vec3, GeometryError> {
        let (rx, tx) = self.pair(n, m)?;
        Ok(rx.position - tx.position)
    }

    /// Distance between Rx `n` and Tx `m`.
    pub fn link_distance(&self, n: usize, m: usize) -> Result<f64, GeometryError> {
        Ok(self.link_vector(n, m)?.norm())
    }

    /// Direction of Rx `n` as seen from Tx `m`, relative to its boresight.
    pub fn link_angles(&self, n: usize, m: usize) -> Result<LinkAngles, GeometryError> {
        let w = self.link_vector(n, m)?;
        let d = w.norm();
        if d == 0.0 {
            return Err(GeometryError::DegenerateDirection { n, m });
        }
        let tx = &self.tx[m];
        let b = tx.boresight;
        let (u, v) = tx.reference_axes();
        let along = w.dot(&b);
        let (x, y) = (w.dot(&u), w.dot(&v));
        let across = x.hypot(y);
        let theta = across.atan2(along);
        let phi = if across <= 1e-15 * d { 0.0 } else { y.atan2(x) };
        // atan2 returns −π for (−x, −0.0); report π to stay in (−π, π].
        Ok(LinkAngles { theta, phi: if phi == -std::f64::consts::PI { std::f64::consts::PI } else { phi } })
    }
}

/// Tx and Rx arrays on two parallel horizontal lines `range` apart, both
/// centred on the `y` axis at height `height`.
///
/// Every Tx shares one boresight, from the Tx-array centroid to the Rx-array
/// centroid; every Rx faces back along it.
pub fn build_uniform_linear_geometry(
    m: usize,
    n: usize,
    tx_spacing: f64,
    rx_spacing: f64,
    range: f64,
    height: f64,
) -> Result<ArrayGeometry, GeometryError> {
    if m == 0 || n == 0 {
        return Err(GeometryError::InvalidGeometry("element counts must be positive".into()));
    }
    for (name, v) in [("tx_spacing", tx_spacing), ("rx_spacing", rx_spacing), ("range", range), ("height", height)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(GeometryError::InvalidGeometry(format!("{name} must be positive, got {v}")));
        }
    }
    let line = |count: usize, spacing: f64, y: f64| -> Vec<Vec3> {
        (0..count)
            .map(|i| Vec3::new((i as f64 - (count as f64 - 1.0) / 2.0) * spacing, y, height))
            .collect()
    };
    let tx_pos = line(m, tx_spacing, 0.0);
    let rx_pos = line(n, rx_spacing, range);
    let centroid = |p: &[Vec3]| p.iter().sum::<Vec3>() / p.len() as f64;
    let aim = centroid(&rx_pos) - centroid(&tx_pos);
    let tx = tx_pos
        .into_iter()
        .map(|p| AntennaPose::new(p, aim))
        .collect::<Result<_, _>>()?;
    let rx = rx_pos
        .into_iter()
        .map(|p| AntennaPose::new(p, -aim))
        .collect::<Result<_, _>>()?;
    ArrayGeometry::new(tx, rx)
}
