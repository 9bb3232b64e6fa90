//! Backscatter physical layer.
//!
//! A tag conveys data by switching its antenna between load impedances. Each
//! load `Z_m` produces a reflection coefficient `Γ = (Z_m − Z_a*)/(Z_m + Z_a)`
//! against the antenna impedance `Z_a`; the inactive state reflects nothing.
//! The reflected wave is the incident wave multiplied by `Γ(t)`.

mod constellation;
mod impedance;
mod modulate;

pub use constellation::{
    bits_to_index, index_to_bits, nearest_index, Modulation, ModulationScheme,
};
pub use impedance::{
    load_for_reflection, reflection_coefficient, Impedance, ImpedanceMap, ReflectionCoefficient,
    DEGENERATE_EPS,
};
pub use modulate::{
    backscatter, constellation_for, constellation_scale, demodulate_noiseless, modulate, CarrierWave, GammaWaveform,
    CONSTELLATION_TOLERANCE,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhyError {
    #[error("load and antenna impedances sum to (near) zero")]
    DegenerateImpedance,
    #[error("antenna resistance must be positive, got {0}")]
    InvalidAntenna(f64),
    #[error("invalid impedance map: {0}")]
    InvalidImpedanceMap(String),
    #[error("impedance map cannot realize {modulation:?}: {reason}")]
    ConstellationUnrealizable {
        modulation: Modulation,
        reason: String,
    },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),
    #[error("invalid modulation scheme: {0}")]
    InvalidScheme(String),
}
