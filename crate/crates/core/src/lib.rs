//! Ambient-IoT backscatter link simulation primitives.
//!
//! Sample arithmetic is generic over [`Real`]; the aliases below fix the
//! scalar for the common cases.

pub mod channel;
pub mod framing;
pub mod link;
pub mod mac;
pub mod phy;
pub mod rng;
pub mod rxchain;
pub mod scalar;
pub mod signal;
pub mod stats;

pub use num_complex::Complex;
pub use scalar::Real;
pub use signal::ComplexSamples;

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;
pub type Samples = ComplexSamples<f64>;
pub type Samples32 = ComplexSamples<f32>;
pub type Gamma = phy::ReflectionCoefficient<f64>;
pub type Link = channel::LinkRealization<f64>;
pub type Link32 = channel::LinkRealization<f32>;
