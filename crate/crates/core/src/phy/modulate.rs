use num_complex::Complex;

use super::constellation::{bits_to_index, index_to_bits, nearest_index, Modulation, ModulationScheme};
use super::impedance::{ImpedanceMap, ReflectionCoefficient};
use super::PhyError;
use crate::scalar::{phasor, Real};
use crate::signal::ComplexSamples;

/// Allowed deviation of a realized Γ point from the ideal scaled constellation.
pub const CONSTELLATION_TOLERANCE: f64 = 1e-6;

/// Incident continuous wave `A_in·e^{j(2πf_in t + θ_in)}`.
///
/// The simulator runs at complex baseband, so the carrier frequency is
/// metadata and the baseband waveform is the constant phasor `A_in·e^{jθ_in}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarrierWave<T> {
    pub amplitude: T,
    pub frequency_hz: f64,
    pub phase: T,
    pub sample_rate: f64,
    pub duration: usize,
}

impl<T: Real> CarrierWave<T> {
    pub fn new(
        amplitude: T,
        frequency_hz: f64,
        phase: T,
        sample_rate: f64,
        duration: usize,
    ) -> Result<Self, PhyError> {
        if !(amplitude >= T::zero()) {
            return Err(PhyError::InvalidCarrier("amplitude must be ≥ 0".into()));
        }
        if !(sample_rate > 0.0) {
            return Err(PhyError::InvalidCarrier("sample rate must be positive".into()));
        }
        if duration == 0 {
            return Err(PhyError::InvalidCarrier("duration must be > 0 samples".into()));
        }
        Ok(Self { amplitude, frequency_hz, phase, sample_rate, duration })
    }

    /// Checks the Nyquist margin against a modulation bandwidth in Hz.
    pub fn check_bandwidth(&self, bandwidth_hz: f64) -> Result<(), PhyError> {
        if self.sample_rate > 2.0 * bandwidth_hz {
            Ok(())
        } else {
            Err(PhyError::InvalidCarrier(format!(
                "sample rate {} Hz does not exceed twice the bandwidth {} Hz",
                self.sample_rate, bandwidth_hz
            )))
        }
    }

    pub fn phasor(&self) -> Complex<T> {
        phasor(self.phase) * self.amplitude
    }

    pub fn baseband(&self) -> ComplexSamples<T> {
        ComplexSamples::constant(self.phasor(), self.duration, self.sample_rate)
    }
}

/// Piecewise-constant reflection coefficient, one value per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaWaveform<T>(pub Vec<Complex<T>>);

impl<T: Real> GammaWaveform<T> {
    pub fn constant(gamma: Complex<T>, len: usize) -> Self {
        Self(vec![gamma; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    /// Applies a real reflection-amplifier gain (`g ≥ 1`), which may push
    /// `|Γ|` past the passive bound.
    pub fn amplified(mut self, gain: T) -> Self {
        for g in &mut self.0 {
            *g *= gain;
        }
        self
    }

    /// Surrounds the waveform with inactive (Γ = 0) samples.
    pub fn padded(self, before: usize, after: usize) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let mut v = Vec::with_capacity(before + self.0.len() + after);
        v.resize(before, zero);
        v.extend(self.0);
        v.resize(v.len() + after, zero);
        Self(v)
    }
}

/// Γ states realizing `scheme` on `map`, indexed by Gray-coded symbol value.
///
/// The realized points must equal the unit constellation up to one common
/// complex scale, so a receiver's channel estimate can absorb the tag's
/// particular Γ geometry.
pub fn constellation_for<T: Real>(
    scheme: &ModulationScheme,
    map: &ImpedanceMap<T>,
) -> Result<Vec<ReflectionCoefficient<T>>, PhyError> {
    let modulation = scheme.modulation;
    let needed = modulation.loads_required();
    if map.num_states() < needed {
        return Err(PhyError::ConstellationUnrealizable {
            modulation,
            reason: format!("needs {needed} loads, map has {}", map.num_states()),
        });
    }
    let states: Vec<ReflectionCoefficient<T>> = match modulation {
        Modulation::Ook => vec![map.state(0)?, map.state(1)?],
        _ => (1..=needed).map(|m| map.state(m)).collect::<Result<_, _>>()?,
    };
    let unit = modulation.unit_constellation::<T>();
    let scale = fit_scale(&states, &unit);
    let tol = T::lit(CONSTELLATION_TOLERANCE);
    if scale.norm() <= tol {
        return Err(PhyError::ConstellationUnrealizable {
            modulation,
            reason: "reflection states collapse to zero".into(),
        });
    }
    let worst = states
        .iter()
        .zip(&unit)
        .fold(T::zero(), |w, (g, u)| w.max((g.0 - scale * u).norm()));
    if worst > tol {
        return Err(PhyError::ConstellationUnrealizable {
            modulation,
            reason: format!("Γ geometry deviates from the {modulation} shape by {worst}"),
        });
    }
    Ok(states)
}

/// Common complex scale `c` with `Γ_k ≈ c·u_k` for the realized constellation.
pub fn constellation_scale<T: Real>(
    scheme: &ModulationScheme,
    map: &ImpedanceMap<T>,
) -> Result<Complex<T>, PhyError> {
    let states = constellation_for(scheme, map)?;
    Ok(fit_scale(&states, &scheme.modulation.unit_constellation::<T>()))
}

/// Least-squares `c` minimizing `Σ|Γ_k − c·u_k|²`.
fn fit_scale<T: Real>(states: &[ReflectionCoefficient<T>], unit: &[Complex<T>]) -> Complex<T> {
    let mut num = Complex::new(T::zero(), T::zero());
    let mut den = T::zero();
    for (g, u) in states.iter().zip(unit) {
        num += g.0 * u.conj();
        den += u.norm_sqr();
    }
    num / den
}

/// Maps bits (MSB first within each symbol) onto the Γ waveform.
pub fn modulate<T: Real>(
    bits: &[bool],
    scheme: &ModulationScheme,
    map: &ImpedanceMap<T>,
) -> Result<GammaWaveform<T>, PhyError> {
    let k = scheme.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(PhyError::LengthMismatch {
            expected: bits.len().div_ceil(k) * k,
            actual: bits.len(),
        });
    }
    let points = constellation_for(scheme, map)?;
    let sps = scheme.samples_per_symbol;
    let mut out = Vec::with_capacity(bits.len() / k * sps);
    for chunk in bits.chunks(k) {
        let g = points[bits_to_index(chunk)].0;
        out.extend(std::iter::repeat_n(g, sps));
    }
    Ok(GammaWaveform(out))
}

/// Noiseless inverse of [`modulate`]: samples each symbol's first sample and
/// decides against the realized Γ points.
pub fn demodulate_noiseless<T: Real>(
    gamma: &GammaWaveform<T>,
    scheme: &ModulationScheme,
    map: &ImpedanceMap<T>,
) -> Result<Vec<bool>, PhyError> {
    let sps = scheme.samples_per_symbol;
    if gamma.len() % sps != 0 {
        return Err(PhyError::LengthMismatch {
            expected: gamma.len().div_ceil(sps) * sps,
            actual: gamma.len(),
        });
    }
    let points: Vec<_> = constellation_for(scheme, map)?.into_iter().map(|g| g.0).collect();
    let mut bits = Vec::with_capacity(gamma.len() / sps * scheme.bits_per_symbol());
    for sym in gamma.0.chunks(sps) {
        index_to_bits(nearest_index(sym[0], &points), scheme.bits_per_symbol(), &mut bits);
    }
    Ok(bits)
}

/// Reflected wave `S_out(t) = Γ(t)·S_in(t)`.
pub fn backscatter<T: Real>(
    incident: &ComplexSamples<T>,
    gamma: &GammaWaveform<T>,
) -> Result<ComplexSamples<T>, PhyError> {
    if incident.len() != gamma.len() {
        return Err(PhyError::LengthMismatch { expected: incident.len(), actual: gamma.len() });
    }
    let out = incident.iter().zip(&gamma.0).map(|(s, g)| s * g).collect();
    Ok(ComplexSamples::new(out, incident.sample_rate()))
}
