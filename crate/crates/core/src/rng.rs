//! Seeded random streams.
//!
//! Every Monte-Carlo trial draws from its own stream derived from the master
//! seed and a trial index, so trials can run in any order or in parallel and
//! still produce identical results.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

pub type SimRng = ChaCha8Rng;

/// Independent stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed; used to nest streams (trial → component).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Circularly-symmetric complex Gaussian with `E|z|² = power`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, power: T) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let scale = (power / T::lit(2.0)).sqrt();
    Complex::new(T::lit(re) * scale, T::lit(im) * scale)
}

/// Adds circularly-symmetric Gaussian noise of `power` per sample in place.
pub fn add_awgn<T: Real, R: Rng + ?Sized>(x: &mut [Complex<T>], power: T, rng: &mut R) {
    if power <= T::zero() {
        return;
    }
    for v in x.iter_mut() {
        *v += complex_gaussian(rng, power);
    }
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream(7, 3).random()).collect();
        assert_eq!(a, b);
        let mut s3 = stream(7, 3);
        let mut s4 = stream(7, 4);
        assert_ne!(s3.random::<u64>(), s4.random::<u64>());
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
    }

    #[test]
    fn gaussian_power_matches() {
        let mut rng = stream(1, 0);
        let n = 200_000;
        let p: f64 = (0..n)
            .map(|_| complex_gaussian::<f64, _>(&mut rng, 2.5).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((p - 2.5).abs() < 0.03, "{p}");
    }
}
