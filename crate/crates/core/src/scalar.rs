//! Scalar abstraction shared by every signal-processing routine.
//!
//! Sample arithmetic is generic over [`Real`] so the same pipeline runs in
//! `f32` (fast sweeps) or `f64` (oracle comparisons). Physical metadata such
//! as frequencies, powers in dBm and distances stays in `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point types usable as the sample scalar.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{j·phase}`.
#[inline]
pub fn phasor<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

pub(crate) fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub(crate) fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a power in dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    from_db(dbm)
}

/// Converts a power in milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    to_db(mw)
}

/// Linear power ratio from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    from_db(db)
}

/// Decibels from a linear power ratio.
pub fn linear_to_db(x: f64) -> f64 {
    to_db(x)
}
