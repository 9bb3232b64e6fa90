use num_complex::Complex;

use super::RxError;
use crate::phy::{index_to_bits, nearest_index, Modulation};
use crate::scalar::Real;

const CSI_EPS: f64 = 1e-12;

/// Channel knowledge available to the canceller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SicCsi<T> {
    /// Source → receiver gain.
    pub h_direct: Option<Complex<T>>,
    /// Cascaded source → tag → receiver gain, including the tag's Γ scale, so
    /// that the reflected term is `h_backscatter·u·s` for unit point `u`.
    pub h_backscatter: Option<Complex<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BackscatterFormat {
    pub modulation: Modulation,
    /// Source samples per backscatter symbol.
    pub samples_per_symbol: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SicOutput<T> {
    pub source_symbols: Vec<Complex<T>>,
    pub backscatter_bits: Vec<bool>,
}

fn unpack<T: Real>(csi: &SicCsi<T>) -> Result<(Complex<T>, Complex<T>), RxError> {
    let hd = csi.h_direct.ok_or(RxError::MissingCsi("direct-path gain"))?;
    let hb = csi.h_backscatter.ok_or(RxError::MissingCsi("backscatter gain"))?;
    Ok((hd, hb))
}

fn check_len(len: usize, sps: usize) -> Result<(), RxError> {
    if sps == 0 || len % sps != 0 {
        return Err(RxError::LengthMismatch { expected: len.div_ceil(sps.max(1)) * sps.max(1), actual: len });
    }
    Ok(())
}

/// Source decisions treating the reflection as noise. Falls back to the
/// reflected path when there is no direct path to decide through.
fn detect_source<T: Real>(rx: &[Complex<T>], points: &[Complex<T>], hd: Complex<T>, hb: Complex<T>) -> Vec<Complex<T>> {
    let h = if hd.norm() >= T::lit(CSI_EPS) { hd } else { hb };
    let inv = Complex::new(T::one(), T::zero()) / h;
    rx.iter().map(|&y| points[nearest_index(y * inv, points)]).collect()
}

/// Correlates each backscatter symbol against the known reflected waveform.
fn detect_backscatter<T: Real>(
    signal: &[Complex<T>],
    source: &[Complex<T>],
    hb: Complex<T>,
    format: &BackscatterFormat,
) -> (Vec<bool>, Vec<usize>) {
    let unit = format.modulation.unit_constellation::<T>();
    let k = format.modulation.bits_per_symbol();
    let mut bits = Vec::with_capacity(signal.len() / format.samples_per_symbol * k);
    let mut indices = Vec::with_capacity(signal.len() / format.samples_per_symbol);
    for (r, s) in signal
        .chunks(format.samples_per_symbol)
        .zip(source.chunks(format.samples_per_symbol))
    {
        let mut num = Complex::new(T::zero(), T::zero());
        let mut den = T::zero();
        for (&y, &x) in r.iter().zip(s) {
            let w = hb * x;
            num += y * w.conj();
            den += w.norm_sqr();
        }
        let z = if den > T::zero() { num / den } else { num };
        let idx = nearest_index(z, &unit);
        index_to_bits(idx, k, &mut bits);
        indices.push(idx);
    }
    (bits, indices)
}

/// Baseline receiver: decides the source, then decodes the tag directly from
/// `rx` without removing the direct-path term.
pub fn decode_without_cancellation<T: Real>(
    rx: &[Complex<T>],
    source_constellation: &[Complex<T>],
    csi: &SicCsi<T>,
    format: &BackscatterFormat,
) -> Result<SicOutput<T>, RxError> {
    let (hd, hb) = unpack(csi)?;
    check_len(rx.len(), format.samples_per_symbol)?;
    let source = detect_source(rx, source_constellation, hd, hb);
    let (bits, _) = detect_backscatter(rx, &source, hb, format);
    Ok(SicOutput { source_symbols: source, backscatter_bits: bits })
}

/// Successive interference cancellation of the direct path.
///
/// 1. decide the source symbols with the tag's reflection treated as noise;
/// 2. subtract `h_direct·ŝ`;
/// 3. decode the tag from the residual;
/// 4. re-decide the source through `h_direct + h_backscatter·Γ̂`.
///
/// `refinement_passes = 1` performs that sequence once. More passes repeat
/// steps 2–4 using the refined source decisions.
pub fn sic_decode<T: Real>(
    rx: &[Complex<T>],
    source_constellation: &[Complex<T>],
    csi: &SicCsi<T>,
    format: &BackscatterFormat,
    refinement_passes: usize,
) -> Result<SicOutput<T>, RxError> {
    let (hd, hb) = unpack(csi)?;
    check_len(rx.len(), format.samples_per_symbol)?;
    let unit = format.modulation.unit_constellation::<T>();
    let mut source = detect_source(rx, source_constellation, hd, hb);
    let mut bits = Vec::new();
    for _ in 0..refinement_passes.max(1) {
        let residual: Vec<_> = rx.iter().zip(&source).map(|(&y, &s)| y - hd * s).collect();
        let (b, indices) = detect_backscatter(&residual, &source, hb, format);
        bits = b;
        if refinement_passes == 0 {
            break;
        }
        source = rx
            .chunks(format.samples_per_symbol)
            .zip(&indices)
            .flat_map(|(chunk, &idx)| {
                let h = hd + hb * unit[idx];
                let inv = if h.norm() >= T::lit(CSI_EPS) {
                    Complex::new(T::one(), T::zero()) / h
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                chunk
                    .iter()
                    .map(move |&y| source_constellation[nearest_index(y * inv, source_constellation)])
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(SicOutput { source_symbols: source, backscatter_bits: bits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(hd: Complex<f64>) -> (Vec<Complex<f64>>, Vec<Complex<f64>>, Vec<bool>, SicCsi<f64>, BackscatterFormat) {
        let qpsk = Modulation::Qpsk.unit_constellation::<f64>();
        let fmt = BackscatterFormat { modulation: Modulation::Bpsk, samples_per_symbol: 4 };
        let hb = Complex::new(0.05, 0.07);
        let bits: Vec<bool> = (0..32).map(|i| (i * 5) % 7 < 3).collect();
        let src: Vec<_> = (0..bits.len() * 4).map(|i| qpsk[(i * 3 + i / 5) % 4]).collect();
        let rx = src
            .iter()
            .enumerate()
            .map(|(n, &s)| {
                let u = if bits[n / 4] { -1.0 } else { 1.0 };
                hd * s + hb * u * s
            })
            .collect();
        (rx, src, bits, SicCsi { h_direct: Some(hd), h_backscatter: Some(hb) }, fmt)
    }

    #[test]
    fn noiseless_exact_recovery() {
        let qpsk = Modulation::Qpsk.unit_constellation::<f64>();
        // h_direct = h_backscatter·(−2.5 + j): the uncancelled direct term
        // pushes every correlation past the BPSK decision boundary.
        let (rx, src, bits, csi, fmt) = scene(Complex::new(-0.195, -0.125));
        let out = sic_decode(&rx, &qpsk, &csi, &fmt, 1).unwrap();
        assert_eq!(out.backscatter_bits, bits);
        assert_eq!(out.source_symbols, src);
        // Without cancellation the direct path swamps the decision.
        let base = decode_without_cancellation(&rx, &qpsk, &csi, &fmt).unwrap();
        assert_ne!(base.backscatter_bits, bits);
    }

    #[test]
    fn no_direct_path_matches_plain_detection() {
        let qpsk = Modulation::Qpsk.unit_constellation::<f64>();
        let (rx, _, _, csi, fmt) = scene(Complex::new(0.0, 0.0));
        let sic = sic_decode(&rx, &qpsk, &csi, &fmt, 1).unwrap();
        let plain = decode_without_cancellation(&rx, &qpsk, &csi, &fmt).unwrap();
        assert_eq!(sic.backscatter_bits, plain.backscatter_bits);
    }

    #[test]
    fn missing_csi() {
        let qpsk = Modulation::Qpsk.unit_constellation::<f64>();
        let (rx, _, _, mut csi, fmt) = scene(Complex::new(0.6, 0.0));
        csi.h_direct = None;
        assert!(matches!(sic_decode(&rx, &qpsk, &csi, &fmt, 1), Err(RxError::MissingCsi(_))));
    }
}
