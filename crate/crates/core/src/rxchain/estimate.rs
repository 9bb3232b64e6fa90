use num_complex::Complex;

use super::RxError;
use crate::scalar::Real;
use crate::signal::{inner, mean_power, energy, ComplexSamples};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelEstimate<T> {
    pub h_hat: Complex<T>,
    /// Mean power of `rx − h_hat·known`.
    pub residual_power: T,
}

impl<T: Real> ChannelEstimate<T> {
    pub fn known(h: Complex<T>) -> Self {
        Self { h_hat: h, residual_power: T::zero() }
    }
}

/// Least-squares single-tap gain `⟨rx, ref⟩ / ‖ref‖²`.
pub fn leakage_gain<T: Real>(rx: &[Complex<T>], reference: &[Complex<T>]) -> Result<Complex<T>, RxError> {
    if rx.len() != reference.len() {
        return Err(RxError::LengthMismatch { expected: reference.len(), actual: rx.len() });
    }
    let e = energy(reference);
    if e <= T::zero() {
        return Err(RxError::ZeroReference);
    }
    Ok(inner(rx, reference) / e)
}

/// `rx − gain·reference`.
pub fn subtract_scaled<T: Real>(
    rx: &[Complex<T>],
    reference: &[Complex<T>],
    gain: Complex<T>,
) -> Vec<Complex<T>> {
    rx.iter().zip(reference).map(|(y, s)| y - gain * s).collect()
}

pub fn estimate_channel<T: Real>(
    rx_preamble: &ComplexSamples<T>,
    known_preamble: &ComplexSamples<T>,
) -> Result<ChannelEstimate<T>, RxError> {
    let rx = rx_preamble.as_slice();
    let known = known_preamble.as_slice();
    let h_hat = leakage_gain(rx, known)?;
    let residual = subtract_scaled(rx, known, h_hat);
    Ok(ChannelEstimate { h_hat, residual_power: mean_power(&residual) })
}

/// Removes the least-squares projection of `rx` onto `carrier_ref`.
pub fn cancel_carrier<T: Real>(
    rx: &ComplexSamples<T>,
    carrier_ref: &ComplexSamples<T>,
) -> Result<ComplexSamples<T>, RxError> {
    let alpha = leakage_gain(rx.as_slice(), carrier_ref.as_slice())?;
    Ok(ComplexSamples::new(
        subtract_scaled(rx.as_slice(), carrier_ref.as_slice(), alpha),
        rx.sample_rate(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_channel() {
        let known: Vec<_> = (0..16).map(|i| Complex::new(if i % 3 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let h = Complex::from_polar(0.5, std::f64::consts::FRAC_PI_4);
        let rx: Vec<_> = known.iter().map(|k| k * h).collect();
        let est = estimate_channel(&ComplexSamples::new(rx, 1.0), &ComplexSamples::new(known, 1.0)).unwrap();
        assert!((est.h_hat - h).norm() < 1e-14);
        assert!(est.residual_power < 1e-28);
    }

    #[test]
    fn zero_reference_errors() {
        let z = ComplexSamples::<f64>::zeros(8, 1.0);
        let x = ComplexSamples::constant(Complex::new(1.0, 0.0), 8, 1.0);
        assert_eq!(estimate_channel(&x, &z), Err(RxError::ZeroReference));
        assert_eq!(cancel_carrier(&x, &z), Err(RxError::ZeroReference));
    }

    #[test]
    fn projection_removes_scaled_reference() {
        let c: Vec<_> = (0..32).map(|i| Complex::from_polar(1.0, 0.1 * i as f64)).collect();
        let rx: Vec<_> = c.iter().map(|v| v * 3.0).collect();
        let out = cancel_carrier(&ComplexSamples::new(rx, 1.0), &ComplexSamples::new(c, 1.0)).unwrap();
        assert!(out.iter().all(|v| v.norm() < 1e-12));
    }
}
