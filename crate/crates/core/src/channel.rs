//! Dyadic backscatter channel, direct-path interference and receiver noise.
//!
//! The reader sees `y = h_d·s(t−τ_d) + h_f·h_b·Γ(t−τ)·s(t−τ) + n`, with the
//! reflected path gain being the product of the forward (source → tag) and
//! backscatter (tag → receiver) gains. Powers are in milliwatts, so a carrier of
//! `P` mW has baseband amplitude `√P`.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phy::GammaWaveform;
use crate::rng::{self, complex_gaussian};
use crate::scalar::{dbm_to_mw, from_db, phasor, Real};
use crate::signal::ComplexSamples;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at 290 K.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("distance must be positive, got {0} m")]
    InvalidDistance(f64),
    #[error("invalid link budget: {0}")]
    InvalidBudget(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fading {
    /// Unit magnitude with the deterministic propagation phase `−2πd/λ`.
    #[default]
    None,
    /// Unit-mean-power complex Gaussian per hop.
    Rayleigh,
}

/// Where the carrier source sits relative to the receiver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Geometry {
    /// Shared antenna through a circulator; the direct path is circulator
    /// leakage at `−isolation` dB.
    #[default]
    Monostatic,
    /// Separate source and receiver; `distance_m` is source → tag.
    Bistatic { source_receiver_m: f64, device_receiver_m: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub device_antenna_gain_dbi: f64,
    pub carrier_frequency_hz: f64,
    pub distance_m: f64,
    pub path_loss_exponent: f64,
    /// `f64::INFINITY` removes circulator leakage entirely.
    pub circulator_isolation_db: f64,
    pub circulator_insertion_loss_db: f64,
    pub noise_figure_db: f64,
    /// Receiver sample rate; sets the noise bandwidth and delay quantization.
    pub sample_rate_hz: f64,
    pub geometry: Geometry,
}

impl Default for LinkBudget {
    /// Demonstration-system parameters: 20 dBm at 925 MHz, 5 dBi reader
    /// antenna, 2 dBi tag antenna, 20 dB / 0.4 dB circulator. Path-loss
    /// exponent 2.2 and a 10 dB noise figure are modeling assumptions.
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            tx_antenna_gain_dbi: 5.0,
            rx_antenna_gain_dbi: 5.0,
            device_antenna_gain_dbi: 2.0,
            carrier_frequency_hz: 925e6,
            distance_m: 1.0,
            path_loss_exponent: 2.2,
            circulator_isolation_db: 20.0,
            circulator_insertion_loss_db: 0.4,
            noise_figure_db: 10.0,
            sample_rate_hz: 8e6,
            geometry: Geometry::Monostatic,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |msg: String| Err(ChannelError::InvalidBudget(msg));
        if !(self.distance_m > 0.0) {
            return Err(ChannelError::InvalidDistance(self.distance_m));
        }
        if !(self.path_loss_exponent >= 2.0) {
            return bad(format!("path-loss exponent {} < 2", self.path_loss_exponent));
        }
        if !(self.carrier_frequency_hz > 0.0) {
            return bad("carrier frequency must be positive".into());
        }
        if !(self.sample_rate_hz > 0.0) {
            return bad("sample rate must be positive".into());
        }
        if self.circulator_isolation_db.is_nan() || self.circulator_isolation_db < 0.0 {
            return bad("circulator isolation must be ≥ 0 dB".into());
        }
        if let Geometry::Bistatic { source_receiver_m, device_receiver_m } = self.geometry {
            if !(source_receiver_m > 0.0 && device_receiver_m > 0.0) {
                return bad("bistatic distances must be positive".into());
            }
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    pub fn tx_power_mw(&self) -> f64 {
        dbm_to_mw(self.tx_power_dbm)
    }

    /// Baseband amplitude of the transmitted carrier.
    pub fn carrier_amplitude(&self) -> f64 {
        self.tx_power_mw().sqrt()
    }

    /// Receiver noise per complex sample in mW: `kT·F·f_s`.
    pub fn noise_power_mw(&self) -> f64 {
        dbm_to_mw(THERMAL_NOISE_DBM_HZ + self.noise_figure_db + 10.0 * self.sample_rate_hz.log10())
    }

    /// Incident power at the tag antenna output, in dBm.
    pub fn incident_power_dbm(&self) -> Result<f64, ChannelError> {
        let g = path_gain(self, self.distance_m)?;
        let il = match self.geometry {
            Geometry::Monostatic => self.circulator_insertion_loss_db,
            Geometry::Bistatic { .. } => 0.0,
        };
        Ok(self.tx_power_dbm + self.tx_antenna_gain_dbi + self.device_antenna_gain_dbi
            + 10.0 * g.log10()
            - il)
    }
}

/// Free-space loss at distance `d` in dB: `20·log10(4πd/λ)`.
pub fn friis_loss_db(carrier_frequency_hz: f64, distance_m: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m * carrier_frequency_hz / SPEED_OF_LIGHT).log10()
}

/// Log-distance power gain with a 1 m free-space reference.
pub fn path_gain(budget: &LinkBudget, distance_m: f64) -> Result<f64, ChannelError> {
    if !(distance_m > 0.0) {
        return Err(ChannelError::InvalidDistance(distance_m));
    }
    let loss_db = friis_loss_db(budget.carrier_frequency_hz, 1.0)
        + 10.0 * budget.path_loss_exponent * distance_m.log10();
    Ok(from_db(-loss_db))
}

/// One block-fading draw of every complex gain on the link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkRealization<T> {
    pub h_forward: Complex<T>,
    pub h_back: Complex<T>,
    pub h_direct: Complex<T>,
    /// Noise power per complex sample.
    pub noise_power: T,
    /// Reflected-path delay in samples.
    pub carrier_delay: usize,
    pub direct_delay: usize,
}

impl<T: Real> LinkRealization<T> {
    /// Ideal unit link without direct path or noise.
    pub fn unit() -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self {
            h_forward: one,
            h_back: one,
            h_direct: Complex::new(T::zero(), T::zero()),
            noise_power: T::zero(),
            carrier_delay: 0,
            direct_delay: 0,
        }
    }

    /// Cascaded gain `h_f·h_b` of the reflected path.
    pub fn dyadic(&self) -> Complex<T> {
        self.h_forward * self.h_back
    }
}

fn hop_gain<T: Real, R: Rng + ?Sized>(
    fading: Fading,
    power_gain: f64,
    distance_m: f64,
    wavelength_m: f64,
    rng: &mut R,
) -> Complex<T> {
    let amp = T::lit(power_gain.sqrt());
    match fading {
        Fading::None => {
            let phase = -2.0 * std::f64::consts::PI * (distance_m / wavelength_m).fract();
            phasor(T::lit(phase)) * amp
        }
        Fading::Rayleigh => complex_gaussian::<T, _>(rng, T::one()) * amp,
    }
}

fn delay_samples(distance_m: f64, sample_rate_hz: f64) -> usize {
    (distance_m / SPEED_OF_LIGHT * sample_rate_hz).round() as usize
}

/// Draws a link realization; deterministic in `seed`.
pub fn realize_link<T: Real>(
    budget: &LinkBudget,
    fading: Fading,
    seed: u64,
) -> Result<LinkRealization<T>, ChannelError> {
    budget.validate()?;
    let mut rng = rng::stream(seed, 0);
    let lambda = budget.wavelength_m();
    let gt = from_db(budget.tx_antenna_gain_dbi);
    let gr = from_db(budget.rx_antenna_gain_dbi);
    let gd = from_db(budget.device_antenna_gain_dbi);
    let fs = budget.sample_rate_hz;
    let noise_power = T::lit(budget.noise_power_mw());

    match budget.geometry {
        Geometry::Monostatic => {
            let d = budget.distance_m;
            let il = from_db(-budget.circulator_insertion_loss_db);
            let pg = path_gain(budget, d)?;
            let h_forward = hop_gain(fading, pg * gt * gd * il, d, lambda, &mut rng);
            let h_back = hop_gain(fading, pg * gd * gr * il, d, lambda, &mut rng);
            let leak = from_db(-budget.circulator_isolation_db);
            Ok(LinkRealization {
                h_forward,
                h_back,
                h_direct: Complex::new(T::lit(leak.sqrt()), T::zero()),
                noise_power,
                carrier_delay: delay_samples(2.0 * d, fs),
                direct_delay: 0,
            })
        }
        Geometry::Bistatic { source_receiver_m, device_receiver_m } => {
            let df = budget.distance_m;
            let h_forward =
                hop_gain(fading, path_gain(budget, df)? * gt * gd, df, lambda, &mut rng);
            let h_back = hop_gain(
                fading,
                path_gain(budget, device_receiver_m)? * gd * gr,
                device_receiver_m,
                lambda,
                &mut rng,
            );
            let h_direct = hop_gain(
                fading,
                path_gain(budget, source_receiver_m)? * gt * gr,
                source_receiver_m,
                lambda,
                &mut rng,
            );
            Ok(LinkRealization {
                h_forward,
                h_back,
                h_direct,
                noise_power,
                carrier_delay: delay_samples(df + device_receiver_m, fs),
                direct_delay: delay_samples(source_receiver_m, fs),
            })
        }
    }
}

/// Non-ideal effects layered on top of the block-fading link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Impairments {
    /// Standard deviation of the per-sample Wiener phase increment on the
    /// reflected path, in radians.
    pub phase_noise_std: f64,
}

/// Received signal at the reader; noise drawn from stream `seed`.
pub fn compose_received<T: Real>(
    carrier: &ComplexSamples<T>,
    gamma: &GammaWaveform<T>,
    link: &LinkRealization<T>,
    seed: u64,
) -> Result<ComplexSamples<T>, ChannelError> {
    let mut rng = rng::stream(seed, 0);
    compose_received_with(carrier, gamma, link, &Impairments::default(), &mut rng)
}

pub fn compose_received_with<T: Real, R: Rng + ?Sized>(
    carrier: &ComplexSamples<T>,
    gamma: &GammaWaveform<T>,
    link: &LinkRealization<T>,
    impairments: &Impairments,
    rng: &mut R,
) -> Result<ComplexSamples<T>, ChannelError> {
    let n = carrier.len();
    if gamma.len() != n {
        return Err(ChannelError::LengthMismatch { expected: n, actual: gamma.len() });
    }
    if link.carrier_delay >= n.max(1) || link.direct_delay >= n.max(1) {
        return Err(ChannelError::LengthMismatch {
            expected: link.carrier_delay.max(link.direct_delay) + 1,
            actual: n,
        });
    }
    let s = carrier.as_slice();
    let g = gamma.as_slice();
    let h_r = link.dyadic();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; n];
    let mut phase = 0.0f64;
    for (i, y) in out.iter_mut().enumerate() {
        let mut v = zero;
        if i >= link.direct_delay {
            v += link.h_direct * s[i - link.direct_delay];
        }
        if i >= link.carrier_delay {
            let j = i - link.carrier_delay;
            let mut r = h_r * g[j] * s[j];
            if impairments.phase_noise_std > 0.0 {
                let step: f64 = rng.sample(StandardNormal);
                phase += impairments.phase_noise_std * step;
                r *= phasor(T::lit(phase));
            }
            v += r;
        }
        *y = v;
    }
    rng::add_awgn(&mut out, link.noise_power, rng);
    Ok(ComplexSamples::new(out, carrier.sample_rate()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_loss_at_one_metre() {
        let b = LinkBudget { path_loss_exponent: 2.0, ..Default::default() };
        let g = 10.0 * path_gain(&b, 1.0).unwrap().log10();
        let oracle = -20.0 * (4.0 * std::f64::consts::PI * 925e6 / 299_792_458.0f64).log10();
        assert!((g - oracle).abs() < 1e-9);
        assert!((g + 31.8).abs() < 0.05, "{g}");
        let g10 = 10.0 * path_gain(&b, 10.0).unwrap().log10();
        assert!((g - g10 - 20.0).abs() < 1e-9);
        let g20 = 10.0 * path_gain(&b, 20.0).unwrap().log10();
        assert!((g10 - g20 - 6.0206).abs() < 1e-3);
        assert!(path_gain(&b, 0.0).is_err());
    }

    #[test]
    fn infinite_isolation_removes_leakage() {
        let b = LinkBudget { circulator_isolation_db: f64::INFINITY, ..Default::default() };
        let l = realize_link::<f64>(&b, Fading::None, 3).unwrap();
        assert_eq!(l.h_direct, Complex::new(0.0, 0.0));
    }

    #[test]
    fn deterministic_realizations() {
        let b = LinkBudget::default();
        for fading in [Fading::None, Fading::Rayleigh] {
            let a = realize_link::<f64>(&b, fading, 11).unwrap();
            let c = realize_link::<f64>(&b, fading, 11).unwrap();
            assert_eq!(a, c);
        }
    }

    #[test]
    fn compose_identities() {
        let carrier = ComplexSamples::constant(Complex::new(0.3, -0.2), 16, 1e6);
        let link = LinkRealization::<f64>::unit();
        let y = compose_received(&carrier, &GammaWaveform::constant(Complex::new(1.0, 0.0), 16), &link, 0)
            .unwrap();
        assert_eq!(y, carrier);

        let link = LinkRealization { h_direct: Complex::new(0.1, 0.05), ..LinkRealization::unit() };
        let y = compose_received(&carrier, &GammaWaveform::constant(Complex::new(0.0, 0.0), 16), &link, 0)
            .unwrap();
        for (a, b) in y.iter().zip(carrier.iter()) {
            assert!((a - b * Complex::new(0.1, 0.05)).norm() < 1e-15);
        }
        assert!(compose_received(&carrier, &GammaWaveform::constant(Complex::new(0.0, 0.0), 15), &link, 0)
            .is_err());
    }

    #[test]
    fn bistatic_direct_path_uses_propagation() {
        let b = LinkBudget {
            geometry: Geometry::Bistatic { source_receiver_m: 10.0, device_receiver_m: 2.0 },
            distance_m: 9.0,
            ..Default::default()
        };
        let l = realize_link::<f64>(&b, Fading::None, 0).unwrap();
        let expected = path_gain(&b, 10.0).unwrap() * from_db(10.0);
        assert!((l.h_direct.norm_sqr() - expected).abs() / expected < 1e-9);
    }
}
