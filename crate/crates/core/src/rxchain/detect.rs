use num_complex::Complex;

use super::estimate::ChannelEstimate;
use super::RxError;
use crate::phy::{index_to_bits, nearest_index, Modulation};
use crate::scalar::{phasor, Real};

const ZERO_CHANNEL: f64 = 1e-12;

fn equalizer<T: Real>(h: &ChannelEstimate<T>, modulation: Modulation) -> Result<Complex<T>, RxError> {
    if !modulation.is_coherent() {
        return Err(RxError::UnsupportedScheme(modulation));
    }
    if h.h_hat.norm() < T::lit(ZERO_CHANNEL) {
        return Err(RxError::ZeroChannel);
    }
    Ok(Complex::new(T::one(), T::zero()) / h.h_hat)
}

/// Minimum-distance decisions on `symbols / h_hat` with Gray demapping.
pub fn detect_coherent<T: Real>(
    symbols: &[Complex<T>],
    h_hat: &ChannelEstimate<T>,
    modulation: Modulation,
) -> Result<Vec<bool>, RxError> {
    let eq = equalizer(h_hat, modulation)?;
    let points = modulation.unit_constellation::<T>();
    let k = modulation.bits_per_symbol();
    let mut bits = Vec::with_capacity(symbols.len() * k);
    for &s in symbols {
        index_to_bits(nearest_index(s * eq, &points), k, &mut bits);
    }
    Ok(bits)
}

/// Coherent detection with a first-order decision-directed phase tracker.
///
/// The tracker starts from the preamble estimate and after every decision
/// rotates its reference by `−loop_gain·Im(z·d*)/|d|²`. A wide loop follows
/// carrier phase wander at moderate SNR but cycle-slips once decision errors
/// become frequent.
pub fn detect_coherent_tracking<T: Real>(
    symbols: &[Complex<T>],
    h_hat: &ChannelEstimate<T>,
    modulation: Modulation,
    loop_gain: f64,
) -> Result<Vec<bool>, RxError> {
    let eq = equalizer(h_hat, modulation)?;
    let points = modulation.unit_constellation::<T>();
    let k = modulation.bits_per_symbol();
    let gain = T::lit(loop_gain);
    let mut rot = Complex::new(T::one(), T::zero());
    let mut bits = Vec::with_capacity(symbols.len() * k);
    for &s in symbols {
        let z = s * eq * rot;
        let idx = nearest_index(z, &points);
        index_to_bits(idx, k, &mut bits);
        let d = points[idx];
        let err = (z * d.conj()).im / d.norm_sqr();
        rot *= phasor(-gain * err);
        // Keep the rotator on the unit circle.
        rot = rot / rot.norm();
    }
    Ok(bits)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnvelopeThreshold<T> {
    Fixed(T),
    /// Midpoint of the two cluster means found by 2-means on `|symbol|`.
    TwoMeans,
}

/// Midpoint of the 2-means cluster centres of `magnitudes`.
pub fn two_means_threshold<T: Real>(magnitudes: &[T]) -> T {
    if magnitudes.is_empty() {
        return T::zero();
    }
    let (mut lo, mut hi) = magnitudes
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &m| (a.min(m), b.max(m)));
    for _ in 0..100 {
        let t = (lo + hi) / T::lit(2.0);
        let (mut sl, mut nl, mut sh, mut nh) = (T::zero(), 0usize, T::zero(), 0usize);
        for &m in magnitudes {
            if m < t {
                sl += m;
                nl += 1;
            } else {
                sh += m;
                nh += 1;
            }
        }
        if nl == 0 || nh == 0 {
            break;
        }
        let new_lo = sl / T::from_usize(nl).unwrap();
        let new_hi = sh / T::from_usize(nh).unwrap();
        if new_lo == lo && new_hi == hi {
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    (lo + hi) / T::lit(2.0)
}

/// Non-coherent on-off decisions: bit is 1 iff `|symbol| ≥ threshold`.
pub fn detect_envelope<T: Real>(
    symbols: &[Complex<T>],
    threshold: EnvelopeThreshold<T>,
) -> Result<Vec<bool>, RxError> {
    let mags: Vec<T> = symbols.iter().map(|s| s.norm()).collect();
    let t = match threshold {
        EnvelopeThreshold::Fixed(t) if t > T::zero() => t,
        EnvelopeThreshold::Fixed(t) => return Err(RxError::InvalidThreshold(t.as_f64())),
        EnvelopeThreshold::TwoMeans => two_means_threshold(&mags),
    };
    Ok(mags.iter().map(|&m| m >= t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn bpsk_decisions() {
        let h = ChannelEstimate::known(c(1.0, 0.0));
        assert_eq!(detect_coherent(&[c(1.0, 0.0), c(-1.0, 0.0)], &h, Modulation::Bpsk).unwrap(), vec![false, true]);
        // Known π rotation is equalized away.
        let h = ChannelEstimate::known(c(-1.0, 0.0));
        assert_eq!(detect_coherent(&[c(-1.0, 0.0), c(1.0, 0.0)], &h, Modulation::Bpsk).unwrap(), vec![false, true]);
    }

    #[test]
    fn errors() {
        let h = ChannelEstimate::known(c(0.0, 0.0));
        assert_eq!(detect_coherent(&[c(1.0, 0.0)], &h, Modulation::Bpsk), Err(RxError::ZeroChannel));
        let h = ChannelEstimate::known(c(1.0, 0.0));
        assert_eq!(
            detect_coherent(&[c(1.0, 0.0)], &h, Modulation::Ook),
            Err(RxError::UnsupportedScheme(Modulation::Ook))
        );
        assert!(detect_envelope(&[c(1.0, 0.0)], EnvelopeThreshold::Fixed(0.0)).is_err());
    }

    #[test]
    fn qam16_round_trip() {
        let pts = Modulation::Qam16.unit_constellation::<f64>();
        let h = Complex::from_polar(0.3, 1.1);
        let rx: Vec<_> = pts.iter().map(|p| p * h).collect();
        let bits = detect_coherent(&rx, &ChannelEstimate::known(h), Modulation::Qam16).unwrap();
        let mut expected = Vec::new();
        for i in 0..16 {
            index_to_bits(i, 4, &mut expected);
        }
        assert_eq!(bits, expected);
    }

    #[test]
    fn envelope_fixed_and_two_means() {
        assert_eq!(
            detect_envelope(&[c(1.0, 0.0), c(0.01, 0.0)], EnvelopeThreshold::Fixed(0.5)).unwrap(),
            vec![true, false]
        );
        let mags = [0.1, 0.12, 0.09, 0.95, 1.02, 1.0];
        let t = two_means_threshold(&mags);
        assert!(t > 0.3 && t < 0.7, "{t}");
    }

    #[test]
    fn tracker_follows_slow_rotation() {
        let h = ChannelEstimate::known(c(1.0, 0.0));
        let bits: Vec<bool> = (0..400).map(|i| (i * 7) % 3 == 0).collect();
        let rx: Vec<_> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| c(if b { -1.0 } else { 1.0 }, 0.0) * Complex::from_polar(1.0, 0.01 * i as f64))
            .collect();
        // Rotation reaches 4 rad: static detection fails, tracking does not.
        let stat = detect_coherent(&rx, &h, Modulation::Bpsk).unwrap();
        assert_ne!(stat, bits);
        let tracked = detect_coherent_tracking(&rx, &h, Modulation::Bpsk, 0.2).unwrap();
        assert_eq!(tracked, bits);
    }
}
