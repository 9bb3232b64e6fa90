use num_complex::Complex;

use super::MacError;
use crate::scalar::Real;

/// Orthogonal ±1 chip sequences, one per device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadingSet {
    sequences: Vec<Vec<i8>>,
}

impl SpreadingSet {
    /// Rows of the Sylvester–Hadamard matrix of order `length`. The all-ones
    /// row is skipped unless every row is needed, since a constant chip
    /// pattern is indistinguishable from a static reflection.
    pub fn walsh(length: usize, n_devices: usize) -> Result<Self, MacError> {
        if !length.is_power_of_two() || length < 2 {
            return Err(MacError::InvalidArgument(format!("Walsh length {length} must be a power of two ≥ 2")));
        }
        if n_devices == 0 || n_devices > length {
            return Err(MacError::InvalidArgument(format!(
                "Walsh length {length} supports 1..={length} devices, got {n_devices}"
            )));
        }
        let row = |r: usize| -> Vec<i8> {
            (0..length).map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 }).collect()
        };
        let first = if n_devices < length { 1 } else { 0 };
        Ok(Self { sequences: (first..first + n_devices).map(row).collect() })
    }

    /// Validates a user-supplied set.
    pub fn from_sequences(sequences: Vec<Vec<i8>>) -> Result<Self, MacError> {
        let Some(len) = sequences.first().map(Vec::len) else {
            return Err(MacError::InvalidArgument("empty spreading set".into()));
        };
        for s in &sequences {
            if s.len() != len {
                return Err(MacError::LengthMismatch { expected: len, actual: s.len() });
            }
            if s.iter().any(|&c| c != 1 && c != -1) {
                return Err(MacError::InvalidArgument("chips must be ±1".into()));
            }
        }
        let set = Self { sequences };
        for a in 0..set.len() {
            for b in a + 1..set.len() {
                let dot = set.dot(a, b);
                if dot != 0 {
                    return Err(MacError::NonOrthogonalSet { a, b, dot });
                }
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn chips_per_bit(&self) -> usize {
        self.sequences[0].len()
    }

    pub fn sequence(&self, device: usize) -> &[i8] {
        &self.sequences[device]
    }

    pub fn dot(&self, a: usize, b: usize) -> i64 {
        self.sequences[a].iter().zip(&self.sequences[b]).map(|(&x, &y)| (x as i64) * (y as i64)).sum()
    }
}

/// BPSK-spreads `bits`: bit `b` becomes `(1 − 2b)·sequence`.
pub fn cbma_spread<T: Real>(bits: &[bool], sequence: &[i8]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(bits.len() * sequence.len());
    for &b in bits {
        let s = if b { -T::one() } else { T::one() };
        out.extend(sequence.iter().map(|&c| Complex::new(s * T::lit(c as f64), T::zero())));
    }
    out
}

/// Γ-magnitude weights `min|h|/|h_k|` that equalize received chip energy.
/// Weights never exceed 1 since a passive tag cannot reflect more.
pub fn power_control_weights<T: Real>(gains: &[Complex<T>]) -> Vec<T> {
    let weakest = gains.iter().map(|g| g.norm()).fold(T::infinity(), T::min);
    gains
        .iter()
        .map(|g| if g.norm() > T::zero() { weakest / g.norm() } else { T::one() })
        .collect()
}

/// Sum of per-device chip streams times their gains, with device `k`
/// delayed by `chip_offsets[k]` chips. The result has the length of the
/// longest undelayed stream.
pub fn cbma_superpose<T: Real>(
    streams: &[Vec<Complex<T>>],
    gains: &[Complex<T>],
    chip_offsets: &[usize],
) -> Result<Vec<Complex<T>>, MacError> {
    if gains.len() != streams.len() {
        return Err(MacError::LengthMismatch { expected: streams.len(), actual: gains.len() });
    }
    if chip_offsets.len() != streams.len() {
        return Err(MacError::LengthMismatch { expected: streams.len(), actual: chip_offsets.len() });
    }
    let n = streams.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    for ((s, &g), &off) in streams.iter().zip(gains).zip(chip_offsets) {
        for (i, &c) in s.iter().enumerate() {
            if let Some(o) = out.get_mut(i + off) {
                *o += g * c;
            }
        }
    }
    Ok(out)
}

/// Correlates each bit period with every device's sequence and makes a
/// coherent BPSK decision against that device's gain. `gains[k]` is the
/// complete received gain of device `k`, power-control weight included.
pub fn cbma_despread<T: Real>(
    rx: &[Complex<T>],
    set: &SpreadingSet,
    gains: &[Complex<T>],
) -> Result<Vec<Vec<bool>>, MacError> {
    if gains.len() != set.len() {
        return Err(MacError::LengthMismatch { expected: set.len(), actual: gains.len() });
    }
    let l = set.chips_per_bit();
    if rx.len() % l != 0 {
        return Err(MacError::LengthMismatch { expected: rx.len() / l * l, actual: rx.len() });
    }
    let mut out = Vec::with_capacity(set.len());
    for (k, &g) in gains.iter().enumerate() {
        let seq = set.sequence(k);
        let bits = rx
            .chunks_exact(l)
            .map(|block| {
                let z = block
                    .iter()
                    .zip(seq)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&r, &c)| acc + r * T::lit(c as f64));
                (z * g.conj()).re < T::zero()
            })
            .collect();
        out.push(bits);
    }
    Ok(out)
}
