use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::PhyError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Ook,
    Bpsk,
    Qpsk,
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Ook | Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Number of loads a tag needs; OOK borrows the inactive state.
    pub fn loads_required(self) -> usize {
        match self {
            Modulation::Ook => 1,
            m => m.order(),
        }
    }

    pub fn is_coherent(self) -> bool {
        !matches!(self, Modulation::Ook)
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Ook => "ook",
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "qam16",
        }
    }

    /// Reference points indexed by the Gray-coded symbol value (bits MSB
    /// first). PSK/QAM points have unit average energy; OOK is `{0, 1}`.
    pub fn unit_constellation<T: Real>(self) -> Vec<Complex<T>> {
        let c = |re: f64, im: f64| Complex::new(T::lit(re), T::lit(im));
        match self {
            Modulation::Ook => vec![c(0.0, 0.0), c(1.0, 0.0)],
            Modulation::Bpsk => vec![c(1.0, 0.0), c(-1.0, 0.0)],
            Modulation::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                (0..4)
                    .map(|i| {
                        let i_bit = (i >> 1) & 1;
                        let q_bit = i & 1;
                        c(a * (1.0 - 2.0 * i_bit as f64), a * (1.0 - 2.0 * q_bit as f64))
                    })
                    .collect()
            }
            Modulation::Qam16 => {
                // Gray levels per axis: 00 → −3, 01 → −1, 11 → +1, 10 → +3.
                let level = |b: usize| match b {
                    0b00 => -3.0,
                    0b01 => -1.0,
                    0b11 => 1.0,
                    _ => 3.0,
                };
                let norm = 10f64.sqrt();
                (0..16)
                    .map(|i| c(level(i >> 2) / norm, level(i & 0b11) / norm))
                    .collect()
            }
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ook" => Some(Modulation::Ook),
            "bpsk" => Some(Modulation::Bpsk),
            "qpsk" => Some(Modulation::Qpsk),
            "qam16" | "16qam" => Some(Modulation::Qam16),
            _ => None,
        }
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Modulation plus its timing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulationScheme {
    pub modulation: Modulation,
    /// Symbols per second.
    pub symbol_rate: f64,
    pub samples_per_symbol: usize,
}

impl ModulationScheme {
    pub fn new(
        modulation: Modulation,
        symbol_rate: f64,
        samples_per_symbol: usize,
    ) -> Result<Self, PhyError> {
        if samples_per_symbol == 0 {
            return Err(PhyError::InvalidScheme("samples_per_symbol must be ≥ 1".into()));
        }
        if !(symbol_rate.is_finite() && symbol_rate > 0.0) {
            return Err(PhyError::InvalidScheme(format!("symbol rate {symbol_rate} must be positive")));
        }
        Ok(Self { modulation, symbol_rate, samples_per_symbol })
    }

    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate * self.samples_per_symbol as f64
    }

    pub fn bit_rate(&self) -> f64 {
        self.symbol_rate * self.modulation.bits_per_symbol() as f64
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }
}

/// Packs `bits` (MSB first) into a symbol index.
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Unpacks the `width` low bits of `index`, MSB first.
pub fn index_to_bits(index: usize, width: usize, out: &mut Vec<bool>) {
    for k in (0..width).rev() {
        out.push((index >> k) & 1 == 1);
    }
}

/// Minimum-distance decision.
pub fn nearest_index<T: Real>(z: Complex<T>, points: &[Complex<T>]) -> usize {
    let mut best = 0;
    let mut best_d = T::infinity();
    for (i, p) in points.iter().enumerate() {
        let d = (z - p).norm_sqr();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}
