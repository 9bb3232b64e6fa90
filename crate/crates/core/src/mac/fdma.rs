use num_complex::Complex;

use super::{AccessKind, Assignment, MacError, Schedule};
use crate::phy::GammaWaveform;
use crate::scalar::Real;

/// Gives device `i` the frequency offset `frequencies[i]`.
pub fn fdma_assign(n_devices: usize, frequencies: &[f64]) -> Result<Schedule, MacError> {
    if n_devices == 0 {
        return Err(MacError::InvalidArgument("need at least one device".into()));
    }
    if n_devices > frequencies.len() {
        return Err(MacError::InsufficientFrequencies { devices: n_devices, available: frequencies.len() });
    }
    for (i, f) in frequencies.iter().enumerate() {
        if !f.is_finite() || *f == 0.0 {
            return Err(MacError::InvalidArgument(format!("frequency {i} must be finite and non-zero, got {f}")));
        }
        if frequencies[..i].contains(f) {
            return Err(MacError::InvalidArgument(format!("frequency {f} Hz listed twice")));
        }
    }
    Ok(Schedule {
        kind: AccessKind::Fdma,
        assignments: (0..n_devices).map(|d| Assignment { device: d, index: d, frame: 0 }).collect(),
        frame_length: 1,
        cycle_length: 1,
        frequencies: frequencies[..n_devices].to_vec(),
    })
}

/// Moves a tag's reflection to `±shift_hz` by toggling Γ's sign with a
/// square wave, as a tag does by alternating between two mirrored loads.
/// The fundamental carries `2/π` of the original amplitude per sideband.
pub fn fdma_shift<T: Real>(gamma: &GammaWaveform<T>, shift_hz: f64, sample_rate: f64) -> GammaWaveform<T> {
    let step = shift_hz / sample_rate;
    GammaWaveform(
        gamma
            .as_slice()
            .iter()
            .enumerate()
            .map(|(n, &g)| {
                // Sample the square wave at the half-sample point so it is
                // never evaluated exactly on a zero crossing.
                let phase = ((n as f64 + 0.5) * step).fract();
                let phase = if phase < 0.0 { phase + 1.0 } else { phase };
                if (0.25..0.75).contains(&phase) {
                    -g
                } else {
                    g
                }
            })
            .collect::<Vec<Complex<T>>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injective_assignment() {
        let s = fdma_assign(2, &[100e3, 200e3]).unwrap();
        assert_eq!(s.frequency_of(0), Some(100e3));
        assert_eq!(s.frequency_of(1), Some(200e3));
        assert_eq!(super::super::collisions(&s), 0);
    }

    #[test]
    fn too_few_frequencies() {
        assert_eq!(
            fdma_assign(3, &[100e3, 200e3]),
            Err(MacError::InsufficientFrequencies { devices: 3, available: 2 })
        );
        assert!(fdma_assign(2, &[100e3, 100e3]).is_err());
    }

    #[test]
    fn square_wave_toggles_sign() {
        let g = GammaWaveform::constant(Complex::new(0.5, 0.0), 8);
        // Period of 4 samples.
        let s = fdma_shift(&g, 0.25, 1.0);
        let re: Vec<f64> = s.as_slice().iter().map(|c| c.re).collect();
        assert_eq!(re, vec![0.5, -0.5, -0.5, 0.5, 0.5, -0.5, -0.5, 0.5]);
    }
}
