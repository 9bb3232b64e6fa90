//! Multiple access for multi-device scenes: time slots, frequency offsets,
//! orthogonal spreading and power-domain superposition.

mod cbma;
mod fdma;
mod noma;
mod tdma;

pub use cbma::{cbma_despread, cbma_spread, cbma_superpose, power_control_weights, SpreadingSet};
pub use fdma::{fdma_assign, fdma_shift};
pub use noma::{map_symbols, noma_assign, noma_sic_decode, NomaPairing, DEFAULT_MIN_POWER_GAP_DB};
pub use tdma::{collisions, tdma_schedule};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rxchain::RxError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{devices} devices need distinct frequencies but only {available} are available")]
    InsufficientFrequencies { devices: usize, available: usize },
    #[error("spreading sequences {a} and {b} are not orthogonal (dot product {dot})")]
    NonOrthogonalSet { a: usize, b: usize, dot: i64 },
    #[error("adjacent effective powers differ by {gap_db:.2} dB, below the {min_gap_db} dB minimum")]
    InsufficientPowerGap { gap_db: f64, min_gap_db: f64 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Rx(#[from] RxError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessKind {
    Tdma,
    Fdma,
}

/// One device's resource: a slot (TDMA) or a frequency index (FDMA).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub device: usize,
    pub index: usize,
    /// Frame within the cycle in which the device is served (always 0 for FDMA).
    pub frame: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: AccessKind,
    pub assignments: Vec<Assignment>,
    /// Slots per frame (TDMA) or 1 (FDMA).
    pub frame_length: usize,
    /// Frames needed to serve every device once.
    pub cycle_length: usize,
    /// Frequency offsets in Hz; empty for TDMA.
    pub frequencies: Vec<f64>,
}

impl Schedule {
    pub fn num_devices(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignment(&self, device: usize) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.device == device)
    }

    /// Devices served in `frame` (modulo the cycle), in slot order.
    pub fn served_in(&self, frame: usize) -> Vec<Assignment> {
        let f = frame % self.cycle_length.max(1);
        let mut v: Vec<_> = self.assignments.iter().copied().filter(|a| a.frame == f).collect();
        v.sort_by_key(|a| (a.index, a.device));
        v
    }

    pub fn frequency_of(&self, device: usize) -> Option<f64> {
        match self.kind {
            AccessKind::Fdma => self.assignment(device).map(|a| self.frequencies[a.index]),
            AccessKind::Tdma => None,
        }
    }
}
