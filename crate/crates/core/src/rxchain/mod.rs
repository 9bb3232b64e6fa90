//! Reader receive chain: carrier (self-interference) cancellation, preamble
//! synchronization, channel estimation, matched filtering, detection, SIC
//! against direct-path interference, frequency-shift filtering and two-phase
//! SNR estimation.

mod detect;
mod estimate;
mod filter;
mod pipeline;
mod sic;
mod snr;
mod sync;

pub use detect::{
    detect_coherent, detect_coherent_tracking, detect_envelope, two_means_threshold,
    EnvelopeThreshold,
};
pub use estimate::{cancel_carrier, estimate_channel, leakage_gain, subtract_scaled, ChannelEstimate};
pub use filter::{
    apply_fir, design_lowpass, freq_shift_filter, matched_filter, mix, FIR_TAPS,
};
pub use pipeline::{
    preamble_waveform, receive_burst, CsiMode, Reception, ReceiverConfig, TimingMode,
};
pub use sic::{decode_without_cancellation, sic_decode, BackscatterFormat, SicCsi, SicOutput};
pub use snr::{estimate_snr_two_phase, SnrEstimate, ZERO_NOISE_FLOOR};
pub use sync::{frame_sync, frame_sync_within, SyncResult};

use thiserror::Error;

use crate::framing::FrameError;
use crate::phy::{Modulation, PhyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RxError {
    #[error("no preamble found: peak metric {peak} below threshold {threshold}")]
    NoSync { peak: f64, threshold: f64 },
    #[error("reference signal has zero energy")]
    ZeroReference,
    #[error("channel estimate magnitude below 1e-12")]
    ZeroChannel,
    #[error("noise power below detection floor; SNR is unbounded")]
    ZeroNoise,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{0:?} is not supported by this detector")]
    UnsupportedScheme(Modulation),
    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),
    #[error("invalid frequency shift: {0}")]
    InvalidShift(String),
    #[error("missing channel state: {0}")]
    MissingCsi(&'static str),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}
