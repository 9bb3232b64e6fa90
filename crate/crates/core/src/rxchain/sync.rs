use num_complex::Complex;

use super::RxError;
use crate::scalar::Real;
use crate::signal::ComplexSamples;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyncResult {
    pub offset: usize,
    /// Normalized correlation magnitude in `[0, 1]`.
    pub peak_metric: f64,
}

/// Locates `preamble` in `rx` by normalized cross-correlation over every
/// admissible offset.
pub fn frame_sync<T: Real>(
    rx: &ComplexSamples<T>,
    preamble: &ComplexSamples<T>,
    threshold: f64,
) -> Result<SyncResult, RxError> {
    let max_offset = rx.len().saturating_sub(preamble.len());
    frame_sync_within(rx.as_slice(), preamble.as_slice(), threshold, 0, max_offset)
}

/// Offsets searched are `start..=start + span`, clipped to the buffer.
///
/// The metric is `|Σ r[k+i]·p*[i]| / (‖p‖·‖r[k..k+L]‖)`; zero-energy windows
/// score zero.
pub fn frame_sync_within<T: Real>(
    rx: &[Complex<T>],
    preamble: &[Complex<T>],
    threshold: f64,
    start: usize,
    span: usize,
) -> Result<SyncResult, RxError> {
    let l = preamble.len();
    if l == 0 {
        return Err(RxError::ZeroReference);
    }
    if rx.len() < l + start {
        return Err(RxError::LengthMismatch { expected: l + start, actual: rx.len() });
    }
    let p_norm = preamble.iter().map(|p| p.norm_sqr().as_f64()).sum::<f64>().sqrt();
    if p_norm == 0.0 {
        return Err(RxError::ZeroReference);
    }
    let last = (start + span).min(rx.len() - l);

    let mut window: f64 = rx[start..start + l].iter().map(|v| v.norm_sqr().as_f64()).sum();
    let mut best = SyncResult { offset: start, peak_metric: 0.0 };
    for k in start..=last {
        if k > start {
            window += rx[k + l - 1].norm_sqr().as_f64() - rx[k - 1].norm_sqr().as_f64();
            // Sliding sums drift; re-anchor periodically.
            if (k - start) % 4096 == 0 {
                window = rx[k..k + l].iter().map(|v| v.norm_sqr().as_f64()).sum();
            }
        }
        if window <= 1e-300 {
            continue;
        }
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (r, p) in rx[k..k + l].iter().zip(preamble) {
            let (rr, ri, pr, pi) = (r.re.as_f64(), r.im.as_f64(), p.re.as_f64(), p.im.as_f64());
            re += rr * pr + ri * pi;
            im += ri * pr - rr * pi;
        }
        let metric = ((re * re + im * im).sqrt() / (p_norm * window.max(0.0).sqrt())).min(1.0);
        if metric > best.peak_metric {
            best = SyncResult { offset: k, peak_metric: metric };
        }
    }
    if best.peak_metric < threshold {
        return Err(RxError::NoSync { peak: best.peak_metric, threshold });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpsk_preamble(sps: usize) -> Vec<Complex<f64>> {
        crate::framing::word_to_bits(crate::framing::DEFAULT_PREAMBLE)
            .iter()
            .flat_map(|&b| std::iter::repeat_n(Complex::new(if b { -1.0 } else { 1.0 }, 0.0), sps))
            .collect()
    }

    #[test]
    fn noiseless_offset_37() {
        let p = bpsk_preamble(1);
        let mut rx = vec![Complex::new(0.0, 0.0); 100];
        for (i, v) in p.iter().enumerate() {
            rx[37 + i] = v * Complex::new(0.0, 2.0);
        }
        let r = frame_sync(&ComplexSamples::new(rx, 1.0), &ComplexSamples::new(p, 1.0), 0.6).unwrap();
        assert_eq!(r.offset, 37);
        assert!((r.peak_metric - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_reference() {
        let rx = vec![Complex::new(1.0, 0.0); 10];
        let p = vec![Complex::new(0.0, 0.0); 4];
        assert_eq!(frame_sync_within(&rx, &p, 0.5, 0, 6), Err(RxError::ZeroReference));
    }
}
