//! Error counting and analytic references.

use libm::erfc;

/// Gaussian tail `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Coherent BPSK bit error rate `Q(√(2γ))` for linear SNR `γ`.
pub fn bpsk_ber(gamma: f64) -> f64 {
    q_function((2.0 * gamma).sqrt())
}

/// Wilson score interval for `errors` successes in `trials` at normal quantile `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if errors >= trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// 95% two-sided normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ErrorCount {
    pub bits: u64,
    pub errors: u64,
}

impl ErrorCount {
    pub fn new(bits: u64, errors: u64) -> Self {
        Self { bits, errors }
    }

    pub fn compare(sent: &[bool], received: &[bool]) -> Self {
        debug_assert_eq!(sent.len(), received.len());
        let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
        Self { bits: sent.len() as u64, errors: errors as u64 }
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    pub fn wilson95(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.bits, Z95)
    }
}

impl std::ops::Add for ErrorCount {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { bits: self.bits + o.bits, errors: self.errors + o.errors }
    }
}

impl std::ops::AddAssign for ErrorCount {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl std::iter::Sum for ErrorCount {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        let q1 = q_function(1.0);
        assert!((q1 - 0.158_655_253_931_457_05).abs() < 1e-12, "{q1:e}");
        let b8 = bpsk_ber(10f64.powf(0.8));
        assert!((b8 - 1.909e-4).abs() < 5e-7, "{b8}");
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(10, 1000, Z95);
        assert!(lo < 0.01 && hi > 0.01);
        assert_eq!(wilson_interval(0, 100, Z95).0, 0.0);
    }
}
