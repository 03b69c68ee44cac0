//! Two-stream link simulation: 16-QAM, time-division pilots, LS channel
//! estimation, per-receiver or zero-forcing reception and BER counting.
//!
//! Frame layout per transmitter (slots in time order):
//!
//! | slot | Tx 1 | Tx 2 |
//! |------|------|------|
//! | P1   | pilot 1 | silent |
//! | P2   | silent | pilot 2 |
//! | M    | message 1 | message 2 |
//!
//! SNR is the average received signal power at each receiver (both
//! transmitters, unit-energy symbols) over that receiver's noise power:
//! `σ_n² = Σ_m |h_{n,m}|² / snr`.

mod qam;

pub use qam::{qam16_demodulate, qam16_modulate, qam16_symbol, QAM16_SCALE};

use crate::channel::{condition_from_singular_values, correlation_coefficient, ChannelError, ChannelMatrix, CMatrix};
use crate::seed::{self, Stream};
use crate::Complex64;
use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;

/// Pre-FEC bit error rate below which standard hard-decision FEC is error free.
pub const FEC_THRESHOLD: f64 = 3.8e-3;
/// Squared-singular-value ratio above which a channel estimate is not inverted.
pub const ZF_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("bit count {0} is not a multiple of 4")]
    MisalignedBits(usize),
    #[error("bit value {0} is neither 0 nor 1")]
    InvalidBit(u8),
    #[error("stream id must be 1 or 2, got {0}")]
    InvalidStreamId(u8),
    #[error("stream {stream}: {symbols} symbols exceed payload length {payload_len}")]
    PayloadOverflow { stream: u8, symbols: usize, payload_len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pilot {0} has zero energy")]
    ZeroPilotEnergy(u8),
    #[error("channel estimate too ill-conditioned to invert (condition {0:e})")]
    SingularEstimate(f64),
    #[error("bit streams differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid frame schedule: {0}")]
    InvalidSchedule(String),
    #[error("trial count must be at least 1")]
    InvalidTrials,
    #[error("SNR must not be NaN or −∞ dB, got {0}")]
    InvalidSnr(f64),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Message bits of one stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    bits: Vec<u8>,
    stream_id: u8,
}

impl BitStream {
    pub fn new(bits: Vec<u8>, stream_id: u8) -> Result<Self, LinkError> {
        if !(stream_id == 1 || stream_id == 2) {
            return Err(LinkError::InvalidStreamId(stream_id));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(LinkError::InvalidBit(b));
        }
        Ok(Self { bits, stream_id })
    }

    /// Uniform random bits.
    pub fn random<R: Rng>(len: usize, stream_id: u8, rng: &mut R) -> Result<Self, LinkError> {
        Self::new((0..len).map(|_| rng.random_range(0..=1u8)).collect(), stream_id)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn stream_id(&self) -> u8 {
        self.stream_id
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Pilot1,
    Pilot2,
    Message,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub symbols: Vec<Complex64>,
    pub slot_kind: SlotKind,
}

/// Slot lengths of one frame, in symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSchedule {
    pilot_len: usize,
    payload_len: usize,
}

impl Default for FrameSchedule {
    fn default() -> Self {
        Self { pilot_len: 64, payload_len: 1024 }
    }
}

impl FrameSchedule {
    pub fn new(pilot_len: usize, payload_len: usize) -> Result<Self, LinkError> {
        if pilot_len == 0 || payload_len == 0 {
            return Err(LinkError::InvalidSchedule("pilot and payload lengths must be at least 1".into()));
        }
        Ok(Self { pilot_len, payload_len })
    }

    pub fn pilot_len(&self) -> usize {
        self.pilot_len
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn pilot1(&self) -> Range<usize> {
        0..self.pilot_len
    }

    pub fn pilot2(&self) -> Range<usize> {
        self.pilot_len..2 * self.pilot_len
    }

    pub fn message(&self) -> Range<usize> {
        2 * self.pilot_len..self.frame_len()
    }

    pub fn frame_len(&self) -> usize {
        2 * self.pilot_len + self.payload_len
    }
}

/// Transmit sequences of both antennas plus the pilots they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub tx1: Vec<Complex64>,
    pub tx2: Vec<Complex64>,
    pub pilot1: Vec<Complex64>,
    pub pilot2: Vec<Complex64>,
}

impl Frame {
    pub fn energy(&self) -> f64 {
        self.tx1.iter().chain(&self.tx2).map(|s| s.norm_sqr()).sum()
    }
}

/// Random 16-QAM pilot blocks for both transmitters.
pub fn generate_pilots(sched: &FrameSchedule, pilot_seed: u64) -> (Vec<Complex64>, Vec<Complex64>) {
    let block = |stream: Stream| -> Vec<Complex64> {
        let mut rng = seed::rng(pilot_seed, &[stream as u64]);
        (0..sched.pilot_len)
            .map(|_| {
                let v: u8 = rng.random_range(0..16);
                qam16_symbol([(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1])
            })
            .collect()
    };
    (block(Stream::Pilot1), block(Stream::Pilot2))
}

/// Lays out pilots and modulated messages; short messages are zero padded.
pub fn build_frame(m1: &BitStream, m2: &BitStream, sched: &FrameSchedule, pilot_seed: u64) -> Result<Frame, LinkError> {
    let s1 = qam16_modulate(m1)?.symbols;
    let s2 = qam16_modulate(m2)?.symbols;
    for (stream, s) in [(m1.stream_id, &s1), (m2.stream_id, &s2)] {
        if s.len() > sched.payload_len {
            return Err(LinkError::PayloadOverflow { stream, symbols: s.len(), payload_len: sched.payload_len });
        }
    }
    let (pilot1, pilot2) = generate_pilots(sched, pilot_seed);
    let zero = Complex64::new(0.0, 0.0);
    let mut tx1 = vec![zero; sched.frame_len()];
    let mut tx2 = vec![zero; sched.frame_len()];
    tx1[sched.pilot1()].copy_from_slice(&pilot1);
    tx2[sched.pilot2()].copy_from_slice(&pilot2);
    let msg = sched.message().start;
    tx1[msg..msg + s1.len()].copy_from_slice(&s1);
    tx2[msg..msg + s2.len()].copy_from_slice(&s2);
    Ok(Frame { tx1, tx2, pilot1, pilot2 })
}

fn linear_snr(snr_db: f64) -> Result<f64, LinkError> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(LinkError::InvalidSnr(snr_db));
    }
    Ok(10f64.powf(snr_db / 10.0))
}

/// Circularly symmetric complex Gaussian samples of variance `variance`.
pub fn complex_noise<R: Rng>(rng: &mut R, len: usize, variance: f64) -> Vec<Complex64> {
    let sd = (variance / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * sd, im * sd)
        })
        .collect()
}

/// `y_n = h_{n,1}·x_1 + h_{n,2}·x_2 + w_n`; `snr_db = +∞` adds no noise.
pub fn apply_channel(
    tx1: &[Complex64],
    tx2: &[Complex64],
    h: &ChannelMatrix,
    snr_db: f64,
    noise_seed: u64,
) -> Result<(Vec<Complex64>, Vec<Complex64>), LinkError> {
    if h.rows() != 2 || h.cols() != 2 {
        return Err(LinkError::DimensionMismatch(format!("need a 2×2 channel, got {}×{}", h.rows(), h.cols())));
    }
    if tx1.len() != tx2.len() {
        return Err(LinkError::DimensionMismatch(format!("tx lengths {} and {}", tx1.len(), tx2.len())));
    }
    let snr = linear_snr(snr_db)?;
    let mut rng = seed::rng(noise_seed, &[Stream::Noise as u64]);
    let mut rx = |n: usize| -> Vec<Complex64> {
        let (h1, h2) = (h.entry(n, 0), h.entry(n, 1));
        let signal: Vec<Complex64> = tx1.iter().zip(tx2).map(|(a, b)| h1 * a + h2 * b).collect();
        if snr.is_infinite() {
            return signal;
        }
        let variance = (h1.norm_sqr() + h2.norm_sqr()) / snr;
        let noise = complex_noise(&mut rng, signal.len(), variance);
        signal.iter().zip(noise).map(|(s, w)| s + w).collect()
    };
    let y1 = rx(0);
    let y2 = rx(1);
    Ok((y1, y2))
}

/// Least-squares estimate from the time-disjoint pilot slots:
/// `ĥ_{n,m} = Σ y_n·p_m* / Σ |p_m|²` over Tx `m`'s slot.
pub fn zf_channel_estimate(
    y1: &[Complex64],
    y2: &[Complex64],
    pilot1: &[Complex64],
    pilot2: &[Complex64],
    sched: &FrameSchedule,
) -> Result<Matrix2<Complex64>, LinkError> {
    if y1.len() < sched.message().start || y2.len() < sched.message().start {
        return Err(LinkError::DimensionMismatch("received block shorter than the pilot slots".into()));
    }
    if pilot1.len() != sched.pilot_len || pilot2.len() != sched.pilot_len {
        return Err(LinkError::DimensionMismatch("pilot length differs from schedule".into()));
    }
    let mut est = Matrix2::zeros();
    for (m, (pilot, slot)) in [(pilot1, sched.pilot1()), (pilot2, sched.pilot2())].into_iter().enumerate() {
        let energy: f64 = pilot.iter().map(|p| p.norm_sqr()).sum();
        if energy == 0.0 {
            return Err(LinkError::ZeroPilotEnergy(m as u8 + 1));
        }
        for (n, y) in [y1, y2].into_iter().enumerate() {
            let corr: Complex64 = y[slot.clone()].iter().zip(pilot).map(|(y, p)| y * p.conj()).sum();
            est[(n, m)] = corr / energy;
        }
    }
    Ok(est)
}

/// Receiver processing of the message slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equalizer {
    /// Per-receiver scaling by `1/ĥ_{nn}`; cross-stream interference is left in.
    #[default]
    Raw,
    /// `x̂ = ĥ⁻¹·y`.
    ZeroForcing,
}

fn squared_condition(h: &Matrix2<Complex64>) -> f64 {
    let sv = h.svd(false, false).singular_values;
    let mut v = [sv[0], sv[1]];
    v.sort_by(|a, b| b.total_cmp(a));
    condition_from_singular_values(&v)
}

pub fn equalize(
    y1: &[Complex64],
    y2: &[Complex64],
    h_est: &Matrix2<Complex64>,
    mode: Equalizer,
) -> Result<(Vec<Complex64>, Vec<Complex64>), LinkError> {
    if y1.len() != y2.len() {
        return Err(LinkError::DimensionMismatch(format!("received lengths {} and {}", y1.len(), y2.len())));
    }
    match mode {
        Equalizer::Raw => {
            let (g1, g2) = (h_est[(0, 0)], h_est[(1, 1)]);
            if g1.norm_sqr() == 0.0 || g2.norm_sqr() == 0.0 {
                return Err(LinkError::SingularEstimate(f64::INFINITY));
            }
            Ok((y1.iter().map(|y| y / g1).collect(), y2.iter().map(|y| y / g2).collect()))
        }
        Equalizer::ZeroForcing => {
            let cond = squared_condition(h_est);
            if !(cond <= ZF_CONDITION_LIMIT) {
                return Err(LinkError::SingularEstimate(cond));
            }
            let inv = h_est.try_inverse().ok_or(LinkError::SingularEstimate(cond))?;
            let mut x1 = Vec::with_capacity(y1.len());
            let mut x2 = Vec::with_capacity(y1.len());
            for (a, b) in y1.iter().zip(y2) {
                x1.push(inv[(0, 0)] * a + inv[(0, 1)] * b);
                x2.push(inv[(1, 0)] * a + inv[(1, 1)] * b);
            }
            Ok((x1, x2))
        }
    }
}

/// Fraction of differing bits.
pub fn ber(tx: &[u8], rx: &[u8]) -> Result<f64, LinkError> {
    Ok(bit_errors(tx, rx)? as f64 / tx.len().max(1) as f64)
}

fn bit_errors(tx: &[u8], rx: &[u8]) -> Result<usize, LinkError> {
    if tx.len() != rx.len() {
        return Err(LinkError::LengthMismatch(tx.len(), rx.len()));
    }
    Ok(tx.iter().zip(rx).filter(|(a, b)| a != b).count())
}

/// Everything a link sweep needs besides the SNR grid and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub channel: ChannelMatrix,
    pub schedule: FrameSchedule,
    pub equalizer: Equalizer,
}

/// Aggregate of all trials at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkResult {
    pub snr_db: f64,
    pub ber_per_stream: [f64; 2],
    /// Correlation of the trial-averaged channel estimate.
    pub rho_measured: f64,
    /// Squared condition number of the trial-averaged channel estimate.
    pub cond_measured: f64,
    pub h_est: Matrix2<Complex64>,
    pub trials: usize,
    pub bits_per_stream: usize,
}

struct TrialOutcome {
    errors: [usize; 2],
    h_est: Matrix2<Complex64>,
}

fn run_trial(scenario: &LinkScenario, snr_db: f64, base_seed: u64, path: [u64; 2]) -> Result<TrialOutcome, LinkError> {
    let sched = &scenario.schedule;
    let bits_len = 4 * sched.payload_len;
    let m1 = BitStream::random(bits_len, 1, &mut seed::rng(base_seed, &[path[0], path[1], Stream::Data1 as u64]))?;
    let m2 = BitStream::random(bits_len, 2, &mut seed::rng(base_seed, &[path[0], path[1], Stream::Data2 as u64]))?;
    let frame = build_frame(&m1, &m2, sched, pilot_seed(base_seed))?;
    let noise_seed = seed::derive(base_seed, &[path[0], path[1]]);
    let (y1, y2) = apply_channel(&frame.tx1, &frame.tx2, &scenario.channel, snr_db, noise_seed)?;
    let h_est = zf_channel_estimate(&y1, &y2, &frame.pilot1, &frame.pilot2, sched)?;
    let msg = sched.message();
    let (x1, x2) = equalize(&y1[msg.clone()], &y2[msg], &h_est, scenario.equalizer)?;
    let errors = [
        bit_errors(m1.bits(), &qam16_demodulate(&x1))?,
        bit_errors(m2.bits(), &qam16_demodulate(&x2))?,
    ];
    Ok(TrialOutcome { errors, h_est })
}

/// Pilot seed shared by every trial of a run.
pub fn pilot_seed(base_seed: u64) -> u64 {
    seed::derive(base_seed, &[u64::MAX])
}

/// Monte Carlo BER sweep. Trial `i` at grid index `s` draws all of its random
/// numbers from seeds derived from `(base_seed, s, i)`, so trials run in
/// parallel and the result does not depend on scheduling.
pub fn run_link_sim(
    scenario: &LinkScenario,
    snr_grid_db: &[f64],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<LinkResult>, LinkError> {
    if trials == 0 {
        return Err(LinkError::InvalidTrials);
    }
    if scenario.channel.rows() != 2 || scenario.channel.cols() != 2 {
        return Err(LinkError::DimensionMismatch("link simulation needs a 2×2 channel".into()));
    }
    snr_grid_db
        .iter()
        .enumerate()
        .map(|(s, &snr_db)| {
            let outcomes: Vec<TrialOutcome> = (0..trials)
                .into_par_iter()
                .map(|i| run_trial(scenario, snr_db, base_seed, [s as u64, i as u64]))
                .collect::<Result<_, _>>()?;
            let bits = 4 * scenario.schedule.payload_len * trials;
            let mut errors = [0usize; 2];
            let mut h_sum = Matrix2::zeros();
            for o in &outcomes {
                errors[0] += o.errors[0];
                errors[1] += o.errors[1];
                h_sum += o.h_est;
            }
            let h_est = h_sum / Complex64::new(trials as f64, 0.0);
            let h_mat = ChannelMatrix::measured(
                CMatrix::from_row_slice(2, 2, &[h_est[(0, 0)], h_est[(0, 1)], h_est[(1, 0)], h_est[(1, 1)]]),
                scenario.channel.frequency_hz(),
            )?;
            Ok(LinkResult {
                snr_db,
                ber_per_stream: [errors[0] as f64 / bits as f64, errors[1] as f64 / bits as f64],
                rho_measured: correlation_coefficient(&h_mat)?,
                cond_measured: squared_condition(&h_est),
                h_est,
                trials,
                bits_per_stream: bits,
            })
        })
        .collect()
}

/// Single-antenna 16-QAM over AWGN with a perfectly known unit channel.
/// Returns `(bit_errors, bits)`.
pub fn awgn_reference(snr_db: f64, symbols: usize, seed_value: u64) -> Result<(usize, usize), LinkError> {
    let snr = linear_snr(snr_db)?;
    let bits = BitStream::random(4 * symbols, 1, &mut seed::rng(seed_value, &[Stream::Data1 as u64]))?;
    let tx = qam16_modulate(&bits)?.symbols;
    let mut rng = seed::rng(seed_value, &[Stream::Noise as u64]);
    let noise = complex_noise(&mut rng, tx.len(), 1.0 / snr);
    let rx: Vec<Complex64> = tx.iter().zip(noise).map(|(s, w)| s + w).collect();
    Ok((bit_errors(bits.bits(), &qam16_demodulate(&rx))?, bits.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn channel(v: [Complex64; 4]) -> ChannelMatrix {
        ChannelMatrix::measured(CMatrix::from_row_slice(2, 2, &v), 10e9).unwrap()
    }

    fn random_bits(len: usize, id: u8, s: u64) -> BitStream {
        BitStream::random(len, id, &mut seed::rng(s, &[])).unwrap()
    }

    #[test]
    fn frame_layout() {
        let sched = FrameSchedule::new(8, 16).unwrap();
        let f = build_frame(&random_bits(64, 1, 1), &random_bits(64, 2, 2), &sched, 9).unwrap();
        assert_eq!(f.tx1.len(), 2 * 8 + 16);
        assert!(f.tx2[sched.pilot1()].iter().all(|s| s.norm() == 0.0));
        assert!(f.tx1[sched.pilot2()].iter().all(|s| s.norm() == 0.0));
        assert_eq!(&f.tx1[sched.pilot1()], &f.pilot1[..]);
        let again = build_frame(&random_bits(64, 1, 5), &random_bits(64, 2, 6), &sched, 9).unwrap();
        assert_eq!(again.pilot1, f.pilot1);
        assert_eq!(again.pilot2, f.pilot2);
        assert_ne!(f.pilot1, f.pilot2);
    }

    #[test]
    fn payload_overflow() {
        let sched = FrameSchedule::new(4, 4).unwrap();
        let err = build_frame(&random_bits(20, 1, 1), &random_bits(16, 2, 2), &sched, 0);
        assert_eq!(err, Err(LinkError::PayloadOverflow { stream: 1, symbols: 5, payload_len: 4 }));
        assert!(FrameSchedule::new(0, 4).is_err());
        assert!(BitStream::new(vec![0, 2], 1).is_err());
        assert!(BitStream::new(vec![0, 1], 3).is_err());
    }

    #[test]
    fn noiseless_identity_channel() {
        let sched = FrameSchedule::new(8, 32).unwrap();
        let f = build_frame(&random_bits(128, 1, 1), &random_bits(128, 2, 2), &sched, 3).unwrap();
        let h = channel([c(1.0), c(0.0), c(0.0), c(1.0)]);
        let (y1, y2) = apply_channel(&f.tx1, &f.tx2, &h, f64::INFINITY, 0).unwrap();
        assert_eq!(y1, f.tx1);
        assert_eq!(y2, f.tx2);
    }

    #[test]
    fn all_ones_channel_sums_streams() {
        let sched = FrameSchedule::new(4, 8).unwrap();
        let f = build_frame(&random_bits(32, 1, 1), &random_bits(32, 2, 2), &sched, 3).unwrap();
        let h = channel([c(1.0); 4]);
        let (y1, y2) = apply_channel(&f.tx1, &f.tx2, &h, f64::INFINITY, 0).unwrap();
        for t in sched.message() {
            assert_eq!(y1[t], f.tx1[t] + f.tx2[t]);
            assert_eq!(y2[t], y1[t]);
        }
    }

    #[test]
    fn noiseless_estimate_is_exact() {
        let sched = FrameSchedule::new(16, 8).unwrap();
        let f = build_frame(&random_bits(32, 1, 1), &random_bits(32, 2, 2), &sched, 4).unwrap();
        let v = [Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.1), Complex64::new(0.05, 0.9), Complex64::new(1.1, 0.4)];
        let h = channel(v);
        let (y1, y2) = apply_channel(&f.tx1, &f.tx2, &h, f64::INFINITY, 0).unwrap();
        let est = zf_channel_estimate(&y1, &y2, &f.pilot1, &f.pilot2, &sched).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                assert!((est[(n, m)] - h.entry(n, m)).norm() < 1e-12);
            }
        }
        let (x1, x2) = equalize(&y1[sched.message()], &y2[sched.message()], &est, Equalizer::ZeroForcing).unwrap();
        for (a, b) in x1.iter().zip(&f.tx1[sched.message()]) {
            assert!((a - b).norm() < 1e-12);
        }
        for (a, b) in x2.iter().zip(&f.tx2[sched.message()]) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_pilot_energy() {
        let sched = FrameSchedule::new(2, 2).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 6];
        let p = vec![Complex64::new(1.0, 0.0); 2];
        let err = zf_channel_estimate(&z, &z, &[Complex64::new(0.0, 0.0); 2], &p, &sched);
        assert_eq!(err, Err(LinkError::ZeroPilotEnergy(1)));
    }

    #[test]
    fn singular_estimate_rejected_for_zero_forcing() {
        let h = Matrix2::new(c(1.0), c(1.0), c(1.0), c(1.0));
        assert!(matches!(equalize(&[c(1.0)], &[c(1.0)], &h, Equalizer::ZeroForcing), Err(LinkError::SingularEstimate(_))));
        assert!(equalize(&[c(1.0)], &[c(1.0)], &h, Equalizer::Raw).is_ok());
    }

    #[test]
    fn diagonal_channel_separates_in_both_modes() {
        let h = channel([c(0.8), c(0.0), c(0.0), Complex64::new(0.0, 1.3)]);
        let sched = FrameSchedule::new(32, 256).unwrap();
        for eq in [Equalizer::Raw, Equalizer::ZeroForcing] {
            let scenario = LinkScenario { channel: h.clone(), schedule: sched, equalizer: eq };
            let r = run_link_sim(&scenario, &[40.0], 2, 11).unwrap();
            assert_eq!(r[0].ber_per_stream, [0.0, 0.0]);
        }
    }

    #[test]
    fn ber_counts() {
        assert_eq!(ber(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0.0);
        assert_eq!(ber(&[0, 1, 1, 0], &[1, 0, 0, 1]).unwrap(), 1.0);
        let mut a = vec![0u8; 1000];
        let b = a.clone();
        a[17] = 1;
        assert_eq!(ber(&a, &b).unwrap(), 0.001);
        assert_eq!(ber(&[0], &[0, 1]), Err(LinkError::LengthMismatch(1, 2)));
    }

    #[test]
    fn frame_energy_accounting() {
        let sched = FrameSchedule::new(64, 1024).unwrap();
        let mut total = 0.0;
        let frames = 40;
        for i in 0..frames {
            let f = build_frame(&random_bits(4096, 1, 2 * i), &random_bits(4096, 2, 2 * i + 1), &sched, i).unwrap();
            let pilots: f64 = f.pilot1.iter().chain(&f.pilot2).map(|s| s.norm_sqr()).sum();
            let msg: f64 = f.tx1[sched.message()].iter().chain(&f.tx2[sched.message()]).map(|s| s.norm_sqr()).sum();
            assert!((f.energy() - pilots - msg).abs() < 1e-9);
            total += f.energy();
        }
        let expected = (2 * 64 + 2 * 1024) as f64;
        assert!((total / frames as f64 / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn sweep_is_deterministic() {
        let h = channel([c(1.0), Complex64::new(0.3, 0.2), Complex64::new(-0.2, 0.3), c(0.9)]);
        let scenario = LinkScenario { channel: h, schedule: FrameSchedule::new(16, 128).unwrap(), equalizer: Equalizer::Raw };
        let a = run_link_sim(&scenario, &[5.0, 15.0], 4, 77).unwrap();
        let b = run_link_sim(&scenario, &[5.0, 15.0], 4, 77).unwrap();
        assert_eq!(a, b);
        let c2 = run_link_sim(&scenario, &[5.0, 15.0], 4, 78).unwrap();
        assert_ne!(a, c2);
        assert_eq!(run_link_sim(&scenario, &[5.0], 0, 1), Err(LinkError::InvalidTrials));
    }
}
