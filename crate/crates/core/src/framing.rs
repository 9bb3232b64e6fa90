//! Frame layout: 16-bit preamble ∥ 992-bit payload ∥ 16-bit CRC, 1024 bits.
//!
//! The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection, no
//! final xor) computed bit-serially over the payload, MSB first.

use thiserror::Error;

pub const PREAMBLE_BITS: usize = 16;
pub const PAYLOAD_BITS: usize = 992;
pub const CRC_BITS: usize = 16;
pub const FRAME_BITS: usize = PREAMBLE_BITS + PAYLOAD_BITS + CRC_BITS;

pub const CRC_POLY: u16 = 0x1021;
pub const CRC_INIT: u16 = 0xFFFF;

/// Default sync word; cyclic ±1 autocorrelation peak is 4× the largest sidelobe.
pub const DEFAULT_PREAMBLE: u16 = 0xF0B7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("payload must be {PAYLOAD_BITS} bits, got {0}")]
    BadPayloadLength(usize),
    #[error("frame must be {FRAME_BITS} bits, got {0}")]
    BadFrameLength(usize),
    #[error("preamble mismatch: expected {expected:#06x}, found {found:#06x}")]
    PreambleMismatch { expected: u16, found: u16 },
    #[error("crc failure: computed {computed:#06x}, received {received:#06x}")]
    CrcFailure { computed: u16, received: u16 },
}

pub fn crc16(bits: &[bool]) -> u16 {
    let mut reg = CRC_INIT;
    for &b in bits {
        let feedback = ((reg >> 15) & 1 == 1) ^ b;
        reg <<= 1;
        if feedback {
            reg ^= CRC_POLY;
        }
    }
    reg
}

pub fn word_to_bits(word: u16) -> [bool; 16] {
    std::array::from_fn(|i| (word >> (15 - i)) & 1 == 1)
}

pub fn bits_to_word(bits: &[bool]) -> u16 {
    bits.iter().take(16).fold(0u16, |acc, &b| (acc << 1) | b as u16)
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1 == 1))
        .collect()
}

/// Peak-to-largest-sidelobe ratio of the cyclic ±1 autocorrelation of a
/// 16-bit word (bit 0 ↦ +1, bit 1 ↦ −1). Infinite when all sidelobes vanish.
pub fn cyclic_sidelobe_ratio(word: u16) -> f64 {
    let chips: Vec<i32> = word_to_bits(word).iter().map(|&b| if b { -1 } else { 1 }).collect();
    let n = chips.len();
    let worst = (1..n)
        .map(|k| (0..n).map(|i| chips[i] * chips[(i + k) % n]).sum::<i32>().abs())
        .max()
        .unwrap_or(0);
    if worst == 0 {
        f64::INFINITY
    } else {
        n as f64 / worst as f64
    }
}

/// Exhaustive search over all 16-bit words for the best cyclic sidelobe
/// ratio; ties resolve to the smallest word.
pub fn best_preamble() -> u16 {
    let mut best = 0u16;
    let mut best_ratio = 0.0;
    for w in 0..=u16::MAX {
        let r = cyclic_sidelobe_ratio(w);
        if r > best_ratio {
            best_ratio = r;
            best = w;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub preamble: u16,
    pub payload: Vec<bool>,
    pub crc: u16,
}

impl Frame {
    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = Vec::with_capacity(FRAME_BITS);
        bits.extend_from_slice(&word_to_bits(self.preamble));
        bits.extend_from_slice(&self.payload);
        bits.extend_from_slice(&word_to_bits(self.crc));
        bits
    }
}

pub fn build_frame(payload: &[bool], preamble: u16) -> Result<Frame, FrameError> {
    if payload.len() != PAYLOAD_BITS {
        return Err(FrameError::BadPayloadLength(payload.len()));
    }
    Ok(Frame { preamble, payload: payload.to_vec(), crc: crc16(payload) })
}

pub fn parse_frame(bits: &[bool], preamble: u16) -> Result<Vec<bool>, FrameError> {
    if bits.len() != FRAME_BITS {
        return Err(FrameError::BadFrameLength(bits.len()));
    }
    let found = bits_to_word(&bits[..PREAMBLE_BITS]);
    if found != preamble {
        return Err(FrameError::PreambleMismatch { expected: preamble, found });
    }
    let payload = &bits[PREAMBLE_BITS..PREAMBLE_BITS + PAYLOAD_BITS];
    let received = bits_to_word(&bits[PREAMBLE_BITS + PAYLOAD_BITS..]);
    let computed = crc16(payload);
    if computed != received {
        return Err(FrameError::CrcFailure { computed, received });
    }
    Ok(payload.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_init() {
        assert_eq!(crc16(&[]), 0xFFFF);
    }

    #[test]
    fn default_preamble_meets_sidelobe_bound() {
        assert!(cyclic_sidelobe_ratio(DEFAULT_PREAMBLE) >= 3.0);
        assert_eq!(cyclic_sidelobe_ratio(DEFAULT_PREAMBLE), 4.0);
        // No 16-bit word does better than the default.
        assert_eq!(cyclic_sidelobe_ratio(best_preamble()), 4.0);
    }

    #[test]
    fn wrong_lengths() {
        assert_eq!(build_frame(&[false; 991], DEFAULT_PREAMBLE), Err(FrameError::BadPayloadLength(991)));
        assert_eq!(parse_frame(&[false; 1023], DEFAULT_PREAMBLE), Err(FrameError::BadFrameLength(1023)));
    }

    #[test]
    fn layout() {
        let f = build_frame(&[false; PAYLOAD_BITS], DEFAULT_PREAMBLE).unwrap();
        let bits = f.to_bits();
        assert_eq!(bits.len(), FRAME_BITS);
        assert_eq!(bits_to_word(&bits[..16]), DEFAULT_PREAMBLE);
        assert!(bits[16..1008].iter().all(|b| !b));
        assert_eq!(bits_to_word(&bits[1008..]), f.crc);
    }

    #[test]
    fn preamble_error_is_distinguished() {
        let f = build_frame(&[true; PAYLOAD_BITS], DEFAULT_PREAMBLE).unwrap();
        let mut bits = f.to_bits();
        bits[3] = !bits[3];
        assert!(matches!(parse_frame(&bits, DEFAULT_PREAMBLE), Err(FrameError::PreambleMismatch { .. })));
        bits[3] = !bits[3];
        bits[500] = !bits[500];
        assert!(matches!(parse_frame(&bits, DEFAULT_PREAMBLE), Err(FrameError::CrcFailure { .. })));
    }
}
