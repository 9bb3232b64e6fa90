//! One-frame link simulation: tag modulation, channel, reader receive chain.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::channel::{compose_received_with, ChannelError, Impairments, LinkRealization};
use crate::framing::{build_frame, Frame, FrameError, DEFAULT_PREAMBLE, FRAME_BITS, PAYLOAD_BITS, PREAMBLE_BITS};
use crate::phy::{constellation_scale, modulate, GammaWaveform, ImpedanceMap, Modulation, ModulationScheme, PhyError};
use crate::rng::random_bits;
use crate::rxchain::{receive_burst, CsiMode, EnvelopeThreshold, ReceiverConfig, RxError, SnrEstimate, TimingMode};
use crate::scalar::Real;
use crate::signal::ComplexSamples;
use crate::stats::ErrorCount;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Rx(#[from] RxError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Burst timing around the tag's response, in samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BurstLayout {
    /// Carrier-only window before the tag may respond.
    pub phase1_samples: usize,
    /// Tag response latency is uniform in `0..=max_response_delay`.
    pub max_response_delay: usize,
    pub tail_samples: usize,
}

impl Default for BurstLayout {
    fn default() -> Self {
        Self { phase1_samples: 4096, max_response_delay: 256, tail_samples: 64 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkSetup<T> {
    pub scheme: ModulationScheme,
    pub map: ImpedanceMap<T>,
    pub preamble: u16,
    pub layout: BurstLayout,
    /// Reflection amplifier gain (category-B tags); 1 for passive tags.
    pub amplifier_gain: T,
    pub impairments: Impairments,
}

impl<T: Real> LinkSetup<T> {
    pub fn new(scheme: ModulationScheme) -> Self {
        Self {
            scheme,
            map: ImpedanceMap::default_for(scheme.modulation),
            preamble: DEFAULT_PREAMBLE,
            layout: BurstLayout::default(),
            amplifier_gain: T::one(),
            impairments: Impairments::default(),
        }
    }

    pub fn frame_samples(&self) -> usize {
        FRAME_BITS / self.scheme.bits_per_symbol() * self.scheme.samples_per_symbol
    }

    pub fn burst_samples(&self) -> usize {
        self.layout.phase1_samples + self.layout.max_response_delay + self.frame_samples() + self.layout.tail_samples
    }

    /// Gain seen by unit-constellation symbols at the receiver, for a carrier
    /// phasor `carrier`: `h_f·h_b·c·g·carrier`.
    pub fn effective_gain(&self, link: &LinkRealization<T>, carrier: Complex<T>) -> Result<Complex<T>, PhyError> {
        let c = constellation_scale(&self.scheme, &self.map)?;
        Ok(link.dyadic() * c * self.amplifier_gain * carrier)
    }

    /// Mean reflected power per sample at the receiver.
    pub fn reflected_power(&self, link: &LinkRealization<T>, carrier: Complex<T>) -> Result<T, PhyError> {
        let unit = self.scheme.modulation.unit_constellation::<T>();
        let mean = unit.iter().fold(T::zero(), |a, u| a + u.norm_sqr()) / T::from_usize(unit.len()).unwrap();
        Ok(self.effective_gain(link, carrier)?.norm_sqr() * mean)
    }

    /// Noise power per sample giving symbol SNR `snr_db` after the matched
    /// filter (`E_s/N_0 = P_s·sps/P_n`).
    pub fn noise_for_symbol_snr(&self, link: &LinkRealization<T>, carrier: Complex<T>, snr_db: f64) -> Result<T, PhyError> {
        let ps = self.reflected_power(link, carrier)?.as_f64();
        Ok(T::lit(ps * self.scheme.samples_per_symbol as f64 / 10f64.powf(snr_db / 10.0)))
    }

    /// Builds the carrier and Γ waveform of one burst carrying `payload`.
    pub fn transmission<R: Rng + ?Sized>(
        &self,
        payload: &[bool],
        carrier: Complex<T>,
        rng: &mut R,
    ) -> Result<Transmission<T>, LinkError> {
        let frame = build_frame(payload, self.preamble)?;
        let delay = if self.layout.max_response_delay > 0 {
            rng.random_range(0..=self.layout.max_response_delay)
        } else {
            0
        };
        let frame_offset = self.layout.phase1_samples + delay;
        let gamma = modulate(&frame.to_bits(), &self.scheme, &self.map)?
            .amplified(self.amplifier_gain)
            .padded(frame_offset, self.layout.max_response_delay - delay + self.layout.tail_samples);
        let carrier = ComplexSamples::constant(carrier, gamma.len(), self.scheme.sample_rate());
        Ok(Transmission { carrier, gamma, frame, frame_offset })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transmission<T> {
    pub carrier: ComplexSamples<T>,
    pub gamma: GammaWaveform<T>,
    pub frame: Frame,
    /// Sample index of the first preamble sample.
    pub frame_offset: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Timing {
    Genie,
    Correlator { threshold: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Csi {
    Perfect,
    Estimated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RxOptions {
    pub timing: Timing,
    pub csi: Csi,
    pub phase_tracking_gain: Option<f64>,
}

impl Default for RxOptions {
    fn default() -> Self {
        Self { timing: Timing::Correlator { threshold: 0.6 }, csi: Csi::Estimated, phase_tracking_gain: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameOutcome {
    /// Errors over payload and CRC bits.
    pub errors: ErrorCount,
    pub synced: bool,
    /// Frame parsed with a valid CRC.
    pub crc_ok: bool,
    /// Parsed payload equals the transmitted payload.
    pub delivered: bool,
    pub snr: Option<SnrEstimate>,
}

/// Sends one random-payload frame over `link` and runs the receiver.
///
/// A frame the receiver cannot synchronize to counts as all-zero decisions.
pub fn simulate_frame<T: Real, R: Rng + ?Sized>(
    setup: &LinkSetup<T>,
    link: &LinkRealization<T>,
    carrier: Complex<T>,
    opts: &RxOptions,
    rng: &mut R,
) -> Result<FrameOutcome, LinkError> {
    let payload = random_bits(rng, PAYLOAD_BITS);
    let tx = setup.transmission(&payload, carrier, rng)?;
    let rx = compose_received_with(&tx.carrier, &tx.gamma, link, &setup.impairments, rng)?;
    let sent = tx.frame.to_bits();
    let sent_data = &sent[PREAMBLE_BITS..];

    let csi = match opts.csi {
        Csi::Estimated => CsiMode::Estimated,
        Csi::Perfect => CsiMode::Perfect(setup.effective_gain(link, carrier)?),
    };
    let timing = match opts.timing {
        Timing::Genie => TimingMode::Genie { offset: tx.frame_offset + link.carrier_delay },
        Timing::Correlator { threshold } => TimingMode::Correlator {
            threshold,
            search_start: setup.layout.phase1_samples,
            search_span: setup.layout.max_response_delay + link.carrier_delay,
        },
    };
    let cfg = ReceiverConfig {
        scheme: setup.scheme,
        preamble: setup.preamble,
        phase1_samples: setup.layout.phase1_samples,
        timing,
        csi,
        phase_tracking_gain: opts.phase_tracking_gain,
        envelope: EnvelopeThreshold::TwoMeans,
    };
    match receive_burst(&rx, &tx.carrier, &cfg) {
        Ok(rec) => {
            let delivered = rec.payload.as_ref().map(|p| p == &payload).unwrap_or(false);
            Ok(FrameOutcome {
                errors: ErrorCount::compare(sent_data, rec.data_bits()),
                synced: true,
                crc_ok: rec.payload.is_ok(),
                delivered,
                snr: rec.snr,
            })
        }
        Err(RxError::NoSync { .. }) => Ok(FrameOutcome {
            errors: ErrorCount::compare(sent_data, &vec![false; sent_data.len()]),
            synced: false,
            crc_ok: false,
            delivered: false,
            snr: None,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Whether `modulation` is detected coherently by the reader.
pub fn uses_channel_estimate(modulation: Modulation) -> bool {
    modulation.is_coherent()
}
