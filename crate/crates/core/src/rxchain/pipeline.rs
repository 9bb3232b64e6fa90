use num_complex::Complex;

use super::detect::{detect_coherent, detect_coherent_tracking, detect_envelope, EnvelopeThreshold};
use super::estimate::{estimate_channel, leakage_gain, subtract_scaled, ChannelEstimate};
use super::filter::matched_filter;
use super::snr::{estimate_snr_two_phase, SnrEstimate};
use super::sync::{frame_sync_within, SyncResult};
use super::RxError;
use crate::framing::{parse_frame, word_to_bits, FrameError, FRAME_BITS, PREAMBLE_BITS};
use crate::phy::{bits_to_index, ModulationScheme};
use crate::scalar::Real;
use crate::signal::ComplexSamples;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimingMode {
    /// Frame start known to the receiver.
    Genie { offset: usize },
    /// Search offsets `search_start..=search_start + search_span`.
    Correlator { threshold: f64, search_start: usize, search_span: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CsiMode<T> {
    /// Least-squares estimate from the preamble.
    Estimated,
    /// Exact gain applied to unit-constellation symbols.
    Perfect(Complex<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverConfig<T> {
    pub scheme: ModulationScheme,
    pub preamble: u16,
    /// Carrier-only samples at the start of the burst (tag silent).
    pub phase1_samples: usize,
    pub timing: TimingMode,
    pub csi: CsiMode<T>,
    /// Decision-directed phase tracking loop gain; `None` keeps the preamble
    /// estimate fixed for the whole frame.
    pub phase_tracking_gain: Option<f64>,
    pub envelope: EnvelopeThreshold<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reception<T> {
    /// Detected bits of the whole frame, preamble included.
    pub frame_bits: Vec<bool>,
    pub sync: SyncResult,
    pub channel: ChannelEstimate<T>,
    /// Two-phase estimate; `gamma` is infinite when phase 1 is noiseless.
    pub snr: Option<SnrEstimate>,
    pub payload: Result<Vec<bool>, FrameError>,
}

impl<T> Reception<T> {
    /// Payload and CRC bits, i.e. everything after the preamble.
    pub fn data_bits(&self) -> &[bool] {
        &self.frame_bits[PREAMBLE_BITS..]
    }
}

/// Known preamble as unit-constellation samples at the scheme's rate.
pub fn preamble_waveform<T: Real>(preamble: u16, scheme: &ModulationScheme) -> Vec<Complex<T>> {
    let bits = word_to_bits(preamble);
    let points = scheme.modulation.unit_constellation::<T>();
    bits.chunks(scheme.bits_per_symbol())
        .flat_map(|c| std::iter::repeat_n(points[bits_to_index(c)], scheme.samples_per_symbol))
        .collect()
}

/// Runs the reader's receive chain over one burst: carrier cancellation with
/// the leakage gain measured in phase 1, preamble sync, channel estimation,
/// matched filtering, detection and CRC check.
pub fn receive_burst<T: Real>(
    rx: &ComplexSamples<T>,
    carrier_ref: &ComplexSamples<T>,
    cfg: &ReceiverConfig<T>,
) -> Result<Reception<T>, RxError> {
    if rx.len() != carrier_ref.len() {
        return Err(RxError::LengthMismatch { expected: carrier_ref.len(), actual: rx.len() });
    }
    let y = rx.as_slice();
    let c = carrier_ref.as_slice();
    let l1 = cfg.phase1_samples.min(y.len());
    let alpha = if l1 > 0 { leakage_gain(&y[..l1], &c[..l1])? } else { leakage_gain(y, c)? };
    let residual = subtract_scaled(y, c, alpha);

    let scheme = &cfg.scheme;
    let sps = scheme.samples_per_symbol;
    let pre: Vec<Complex<T>> = preamble_waveform(cfg.preamble, scheme);
    let frame_len = FRAME_BITS / scheme.bits_per_symbol() * sps;

    let sync = match cfg.timing {
        TimingMode::Genie { offset } => SyncResult { offset, peak_metric: 1.0 },
        TimingMode::Correlator { threshold, search_start, search_span } => {
            let span = search_span.min(residual.len().saturating_sub(frame_len + search_start));
            frame_sync_within(&residual, &pre, threshold, search_start, span)?
        }
    };
    let off = sync.offset;
    if off + frame_len > residual.len() {
        return Err(RxError::LengthMismatch { expected: off + frame_len, actual: residual.len() });
    }

    let snr = if l1 > 0 && off >= l1 {
        let p1 = ComplexSamples::new(y[..l1].to_vec(), rx.sample_rate());
        let p2 = ComplexSamples::new(y[off..off + frame_len].to_vec(), rx.sample_rate());
        let mut cref = c[..l1].to_vec();
        cref.extend_from_slice(&c[off..off + frame_len]);
        match estimate_snr_two_phase(&p1, &p2, &ComplexSamples::new(cref, rx.sample_rate())) {
            Ok(e) => Some(e),
            Err(RxError::ZeroNoise) => Some(SnrEstimate {
                gamma: f64::INFINITY,
                noise_power: 0.0,
                phase2_power: 0.0,
            }),
            Err(_) => None,
        }
    } else {
        None
    };

    let frame = &residual[off..off + frame_len];
    let channel = match cfg.csi {
        CsiMode::Estimated => estimate_channel(
            &ComplexSamples::new(frame[..pre.len()].to_vec(), rx.sample_rate()),
            &ComplexSamples::new(pre.clone(), rx.sample_rate()),
        )?,
        CsiMode::Perfect(h) => ChannelEstimate::known(h),
    };

    let symbols = matched_filter(frame, sps)?;
    let frame_bits = if scheme.modulation.is_coherent() {
        match cfg.phase_tracking_gain {
            Some(g) if g > 0.0 => detect_coherent_tracking(&symbols, &channel, scheme.modulation, g)?,
            _ => detect_coherent(&symbols, &channel, scheme.modulation)?,
        }
    } else {
        detect_envelope(&symbols, cfg.envelope)?
    };
    let payload = parse_frame(&frame_bits, cfg.preamble);
    Ok(Reception { frame_bits, sync, channel, snr, payload })
}
