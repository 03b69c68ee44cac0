//! Physical-layer simulation of line-of-sight MIMO links whose transmitters
//! radiate directional OAM beams (no central energy void).
//!
//! The crate is split along the signal path:
//!
//! - [`beam`]: far-field synthesis of plane-wave and NTCS-OAM beams, arc
//!   waveguide sizing and equivalent-mode recovery from a pattern cut.
//! - [`geometry`]: antenna placements and per-link distance / direction.
//! - [`channel`]: LoS-MIMO channel matrices and their analytics
//!   (correlation, covariance, capacity, singular values, condition number).
//! - [`link`]: 16-QAM two-stream link simulation with time-division pilots,
//!   least-squares channel estimation and BER statistics.
//! - [`seed`]: deterministic seed derivation for reproducible Monte Carlo runs.

pub mod beam;
pub mod channel;
pub mod geometry;
pub mod link;
pub mod seed;

pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
