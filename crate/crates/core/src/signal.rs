use std::ops::Range;

use num_complex::Complex;

use crate::scalar::Real;

/// A buffer of complex baseband samples taken at `sample_rate` Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSamples<T> {
    samples: Vec<Complex<T>>,
    sample_rate: f64,
}

impl<T: Real> ComplexSamples<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate: f64) -> Self {
        Self { samples, sample_rate }
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Self {
        Self::constant(Complex::new(T::zero(), T::zero()), len, sample_rate)
    }

    pub fn constant(value: Complex<T>, len: usize, sample_rate: f64) -> Self {
        Self::new(vec![value; len], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.samples.iter()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> T {
        energy(&self.samples)
    }

    /// Mean power per sample; zero for an empty buffer.
    pub fn mean_power(&self) -> T {
        mean_power(&self.samples)
    }

    pub fn scaled(&self, gain: Complex<T>) -> Self {
        Self::new(self.samples.iter().map(|&x| x * gain).collect(), self.sample_rate)
    }

    /// Copies out a sub-range as a new buffer at the same rate.
    pub fn slice(&self, range: Range<usize>) -> Self {
        Self::new(self.samples[range].to_vec(), self.sample_rate)
    }

    /// Concatenates `other` after `self`. The sample rates must match.
    pub fn concat(mut self, other: &Self) -> Self {
        debug_assert_eq!(self.sample_rate, other.sample_rate);
        self.samples.extend_from_slice(&other.samples);
        self
    }
}

impl<T> AsRef<[Complex<T>]> for ComplexSamples<T> {
    fn as_ref(&self) -> &[Complex<T>] {
        &self.samples
    }
}

pub(crate) fn energy<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}

pub(crate) fn mean_power<T: Real>(x: &[Complex<T>]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    energy(x) / T::from_usize(x.len()).unwrap()
}

/// `Σ a[i]·conj(b[i])`.
pub(crate) fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x * y.conj())
}
