use super::estimate::{leakage_gain, subtract_scaled};
use super::RxError;
use crate::scalar::{linear_to_db, Real};
use crate::signal::{mean_power, ComplexSamples};

/// Below this noise power the ratio is treated as unbounded.
pub const ZERO_NOISE_FLOOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrEstimate {
    /// `max(0, (P_2 − P_n)/P_n)`, linear.
    pub gamma: f64,
    pub noise_power: f64,
    pub phase2_power: f64,
}

impl SnrEstimate {
    pub fn gamma_db(&self) -> f64 {
        linear_to_db(self.gamma)
    }
}

/// Two-phase SNR estimate.
///
/// During phase 1 the reader sends only carrier and the tag stays silent, so
/// the carrier-cancelled residual is noise (`P_n`). During phase 2 the tag
/// reflects its data, and the residual carries signal plus noise (`P_2`).
/// `carrier_ref` spans both phases back to back.
pub fn estimate_snr_two_phase<T: Real>(
    phase1_rx: &ComplexSamples<T>,
    phase2_rx: &ComplexSamples<T>,
    carrier_ref: &ComplexSamples<T>,
) -> Result<SnrEstimate, RxError> {
    let n1 = phase1_rx.len();
    let n2 = phase2_rx.len();
    if carrier_ref.len() != n1 + n2 {
        return Err(RxError::LengthMismatch { expected: n1 + n2, actual: carrier_ref.len() });
    }
    let (c1, c2) = carrier_ref.as_slice().split_at(n1);
    let p1 = phase1_rx.as_slice();
    let p2 = phase2_rx.as_slice();
    let a1 = leakage_gain(p1, c1)?;
    let a2 = leakage_gain(p2, c2)?;
    let noise_power = mean_power(&subtract_scaled(p1, c1, a1)).as_f64();
    let phase2_power = mean_power(&subtract_scaled(p2, c2, a2)).as_f64();
    if noise_power < ZERO_NOISE_FLOOR {
        return Err(RxError::ZeroNoise);
    }
    let gamma = ((phase2_power - noise_power) / noise_power).max(0.0);
    Ok(SnrEstimate { gamma, noise_power, phase2_power })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex;

    use super::*;

    fn carrier(n: usize) -> ComplexSamples<f64> {
        ComplexSamples::constant(Complex::new(1.0, 0.0), n, 1.0)
    }

    /// Zero-mean sequence with exact mean power `p` (orthogonal to DC).
    fn alternating(n: usize, p: f64) -> Vec<Complex<f64>> {
        (0..n).map(|i| Complex::new(if i % 2 == 0 { p.sqrt() } else { -p.sqrt() }, 0.0)).collect()
    }

    #[test]
    fn formula() {
        let c = carrier(8);
        let p1 = ComplexSamples::new(alternating(4, 1.0), 1.0);
        let p2 = ComplexSamples::new(alternating(4, 11.0), 1.0);
        let est = estimate_snr_two_phase(&p1, &p2, &c).unwrap();
        assert!((est.gamma - 10.0).abs() < 1e-12);
        let same = estimate_snr_two_phase(&p1, &p1.clone(), &c).unwrap();
        assert_eq!(same.gamma, 0.0);
    }

    #[test]
    fn clamps_at_zero() {
        let c = carrier(8);
        let p1 = ComplexSamples::new(alternating(4, 2.0), 1.0);
        let p2 = ComplexSamples::new(alternating(4, 1.0), 1.0);
        assert_eq!(estimate_snr_two_phase(&p1, &p2, &c).unwrap().gamma, 0.0);
    }

    #[test]
    fn zero_noise() {
        let c = carrier(8);
        let p1 = ComplexSamples::new(vec![Complex::new(0.5, 0.0); 4], 1.0);
        let p2 = ComplexSamples::new(alternating(4, 1.0), 1.0);
        assert_eq!(estimate_snr_two_phase(&p1, &p2, &c), Err(RxError::ZeroNoise));
    }
}
