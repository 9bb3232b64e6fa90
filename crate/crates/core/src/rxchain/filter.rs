use num_complex::Complex;

use super::RxError;
use crate::scalar::{phasor, Real};
use crate::signal::ComplexSamples;

pub const FIR_TAPS: usize = 64;

/// Integrate-and-dump for rectangular pulses: per-symbol sample mean.
pub fn matched_filter<T: Real>(rx: &[Complex<T>], samples_per_symbol: usize) -> Result<Vec<Complex<T>>, RxError> {
    if samples_per_symbol == 0 || rx.len() % samples_per_symbol != 0 {
        return Err(RxError::LengthMismatch {
            expected: rx.len().div_ceil(samples_per_symbol.max(1)) * samples_per_symbol.max(1),
            actual: rx.len(),
        });
    }
    let n = T::from_usize(samples_per_symbol).unwrap();
    Ok(rx
        .chunks(samples_per_symbol)
        .map(|c| c.iter().fold(Complex::new(T::zero(), T::zero()), |a, &v| a + v) / n)
        .collect())
}

/// Hamming-windowed sinc low-pass with unit DC gain.
pub fn design_lowpass<T: Real>(num_taps: usize, cutoff_hz: f64, sample_rate: f64) -> Vec<T> {
    let fc = cutoff_hz / sample_rate;
    let mid = (num_taps as f64 - 1.0) / 2.0;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|n| {
            let t = n as f64 - mid;
            let sinc = if t == 0.0 {
                2.0 * fc
            } else {
                (2.0 * std::f64::consts::PI * fc * t).sin() / (std::f64::consts::PI * t)
            };
            let w = 0.54
                - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (num_taps as f64 - 1.0)).cos();
            sinc * w
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }
    taps.into_iter().map(T::lit).collect()
}

/// Convolution with the group delay removed; output has the input's length.
pub fn apply_fir<T: Real>(x: &[Complex<T>], taps: &[T]) -> Vec<Complex<T>> {
    let delay = taps.len().saturating_sub(1) / 2;
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &h) in taps.iter().enumerate() {
                let j = i + delay;
                if j >= k && j - k < n {
                    acc += x[j - k] * h;
                }
            }
            acc
        })
        .collect()
}

/// Multiplies by `e^{j2π·freq·n/fs}`.
pub fn mix<T: Real>(x: &[Complex<T>], freq_hz: f64, sample_rate: f64) -> Vec<Complex<T>> {
    let step = 2.0 * std::f64::consts::PI * freq_hz / sample_rate;
    x.iter()
        .enumerate()
        .map(|(n, &v)| v * phasor(T::lit((step * n as f64) % (2.0 * std::f64::consts::PI))))
        .collect()
}

/// Brings a tag signal shifted to `shift_hz` back to baseband and low-pass
/// filters it to `bandwidth_hz`, rejecting interference left at DC.
pub fn freq_shift_filter<T: Real>(
    rx: &ComplexSamples<T>,
    shift_hz: f64,
    bandwidth_hz: f64,
    sample_rate: f64,
) -> Result<ComplexSamples<T>, RxError> {
    if shift_hz == 0.0 || !shift_hz.is_finite() {
        return Err(RxError::InvalidShift("shift must be non-zero".into()));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(RxError::InvalidShift(format!("bandwidth {bandwidth_hz} Hz must be positive")));
    }
    if shift_hz.abs() + bandwidth_hz / 2.0 >= sample_rate / 2.0 {
        return Err(RxError::InvalidShift(format!(
            "|{shift_hz}| + {bandwidth_hz}/2 Hz exceeds the Nyquist limit of {} Hz",
            sample_rate / 2.0
        )));
    }
    let down = mix(rx.as_slice(), -shift_hz, sample_rate);
    let taps = design_lowpass::<T>(FIR_TAPS, bandwidth_hz / 2.0, sample_rate);
    Ok(ComplexSamples::new(apply_fir(&down, &taps), sample_rate))
}
