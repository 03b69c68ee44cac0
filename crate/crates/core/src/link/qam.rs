//! Gray-mapped 16-QAM with unit average symbol energy.

use super::{BitStream, LinkError, SlotKind, SymbolBlock};
use crate::Complex64;

/// `1/sqrt(10)`: scales the ±1, ±3 grid to unit mean energy.
pub const QAM16_SCALE: f64 = 0.316_227_766_016_837_94;

/// Gray 4-PAM level for two bits: 00 → −3, 01 → −1, 11 → +1, 10 → +3.
fn pam_level(b0: u8, b1: u8) -> f64 {
    match (b0, b1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    }
}

/// Nearest Gray 4-PAM decision on the unscaled axis.
fn pam_bits(v: f64) -> (u8, u8) {
    if v < -2.0 {
        (0, 0)
    } else if v < 0.0 {
        (0, 1)
    } else if v < 2.0 {
        (1, 1)
    } else {
        (1, 0)
    }
}

/// Maps one nibble `[b0, b1, b2, b3]`: `b0 b1` on I, `b2 b3` on Q.
pub fn qam16_symbol(nibble: [u8; 4]) -> Complex64 {
    Complex64::new(pam_level(nibble[0], nibble[1]), pam_level(nibble[2], nibble[3])) * QAM16_SCALE
}

pub fn qam16_modulate(bits: &BitStream) -> Result<SymbolBlock, LinkError> {
    Ok(SymbolBlock { symbols: modulate_bits(bits.bits())?, slot_kind: SlotKind::Message })
}

pub(crate) fn modulate_bits(bits: &[u8]) -> Result<Vec<Complex64>, LinkError> {
    if bits.len() % 4 != 0 {
        return Err(LinkError::MisalignedBits(bits.len()));
    }
    Ok(bits.chunks_exact(4).map(|c| qam16_symbol([c[0], c[1], c[2], c[3]])).collect())
}

/// Minimum-distance hard decision. On a square grid the nearest point is
/// found independently per axis.
pub fn qam16_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * 4);
    for s in symbols {
        let (b0, b1) = pam_bits(s.re / QAM16_SCALE);
        let (b2, b3) = pam_bits(s.im / QAM16_SCALE);
        out.extend_from_slice(&[b0, b1, b2, b3]);
    }
    out
}
