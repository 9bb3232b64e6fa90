use num_complex::Complex;

use super::MacError;
use crate::phy::{bits_to_index, index_to_bits, nearest_index, Modulation};
use crate::scalar::Real;

/// Minimum separation between adjacent effective powers, in dB.
pub const DEFAULT_MIN_POWER_GAP_DB: f64 = 6.0;

/// Devices in decoding order, strongest effective power first.
#[derive(Clone, Debug, PartialEq)]
pub struct NomaPairing<T> {
    pub order: Vec<usize>,
    /// Effective received gain `h·Γ` of each device in `order`.
    pub gains: Vec<Complex<T>>,
    /// Reflection magnitude assigned to each device in `order`.
    pub reflection: Vec<T>,
    pub min_gap_db: f64,
}

impl<T: Real> NomaPairing<T> {
    /// Orders devices whose effective gains are already fixed.
    pub fn from_effective(devices: &[(usize, Complex<T>)], min_gap_db: f64) -> Result<Self, MacError> {
        let refl = vec![T::one(); devices.len()];
        build(devices, &refl, min_gap_db)
    }

    pub fn powers_db(&self) -> Vec<f64> {
        self.gains.iter().map(|g| 10.0 * g.norm_sqr().as_f64().log10()).collect()
    }
}

/// Hands the largest reflection magnitude to the strongest link, the next
/// to the next, and so on, then checks the resulting power gaps.
/// `devices` pairs an id with its link gain `h_f·h_b`.
pub fn noma_assign<T: Real>(
    devices: &[(usize, Complex<T>)],
    gamma_levels: &[T],
    min_gap_db: f64,
) -> Result<NomaPairing<T>, MacError> {
    if gamma_levels.len() < devices.len() {
        return Err(MacError::InvalidArgument(format!(
            "{} devices but only {} reflection levels",
            devices.len(),
            gamma_levels.len()
        )));
    }
    if gamma_levels.iter().any(|g| !(*g > T::zero() && *g <= T::one())) {
        return Err(MacError::InvalidArgument("reflection levels must lie in (0, 1]".into()));
    }
    let mut by_link: Vec<(usize, Complex<T>)> = devices.to_vec();
    sort_strongest_first(&mut by_link);
    let mut levels = gamma_levels.to_vec();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let scaled: Vec<(usize, Complex<T>)> =
        by_link.iter().zip(&levels).map(|(&(id, h), &g)| (id, h * g)).collect();
    build(&scaled, &levels[..devices.len()], min_gap_db)
}

fn sort_strongest_first<T: Real>(v: &mut [(usize, Complex<T>)]) {
    v.sort_by(|a, b| b.1.norm_sqr().partial_cmp(&a.1.norm_sqr()).unwrap().then(a.0.cmp(&b.0)));
}

fn build<T: Real>(devices: &[(usize, Complex<T>)], reflection: &[T], min_gap_db: f64) -> Result<NomaPairing<T>, MacError> {
    if devices.is_empty() {
        return Err(MacError::InvalidArgument("need at least one device".into()));
    }
    if !(min_gap_db >= 0.0) {
        return Err(MacError::InvalidArgument(format!("minimum gap {min_gap_db} dB must be non-negative")));
    }
    let mut idx: Vec<usize> = (0..devices.len()).collect();
    idx.sort_by(|&a, &b| {
        devices[b].1.norm_sqr().partial_cmp(&devices[a].1.norm_sqr()).unwrap().then(devices[a].0.cmp(&devices[b].0))
    });
    let pairing = NomaPairing {
        order: idx.iter().map(|&i| devices[i].0).collect(),
        gains: idx.iter().map(|&i| devices[i].1).collect(),
        reflection: idx.iter().map(|&i| reflection[i]).collect(),
        min_gap_db,
    };
    let p = pairing.powers_db();
    for w in p.windows(2) {
        let gap = w[0] - w[1];
        if !(gap >= min_gap_db) || (gap == 0.0) {
            return Err(MacError::InsufficientPowerGap { gap_db: gap, min_gap_db });
        }
    }
    Ok(pairing)
}

/// Power-domain successive cancellation: detect the strongest device,
/// subtract its reconstructed contribution, continue with the next.
/// Returns `(device id, bits)` sorted by id.
pub fn noma_sic_decode<T: Real>(
    rx: &[Complex<T>],
    pairing: &NomaPairing<T>,
    modulation: Modulation,
) -> Result<Vec<(usize, Vec<bool>)>, MacError> {
    if !modulation.is_coherent() {
        return Err(MacError::Rx(crate::rxchain::RxError::UnsupportedScheme(modulation)));
    }
    let points = modulation.unit_constellation::<T>();
    let k = modulation.bits_per_symbol();
    let mut residual = rx.to_vec();
    let mut out = Vec::with_capacity(pairing.order.len());
    for (&id, &g) in pairing.order.iter().zip(&pairing.gains) {
        if g.norm() == T::zero() {
            return Err(MacError::Rx(crate::rxchain::RxError::ZeroChannel));
        }
        let eq = Complex::new(T::one(), T::zero()) / g;
        let mut bits = Vec::with_capacity(residual.len() * k);
        for r in residual.iter_mut() {
            let idx = nearest_index(*r * eq, &points);
            index_to_bits(idx, k, &mut bits);
            *r -= g * points[idx];
        }
        out.push((id, bits));
    }
    out.sort_by_key(|(id, _)| *id);
    Ok(out)
}

/// Unit-constellation symbols for `bits`.
pub fn map_symbols<T: Real>(bits: &[bool], modulation: Modulation) -> Vec<Complex<T>> {
    let points = modulation.unit_constellation::<T>();
    bits.chunks(modulation.bits_per_symbol()).map(|c| points[bits_to_index(c)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn equal_powers_rejected() {
        let r = NomaPairing::from_effective(&[(0, c(1.0)), (1, Complex::new(0.0, 1.0))], 6.0);
        assert!(matches!(r, Err(MacError::InsufficientPowerGap { .. })));
        // Even a zero minimum gap cannot order equal powers.
        let r = NomaPairing::from_effective(&[(0, c(1.0)), (1, c(1.0))], 0.0);
        assert!(matches!(r, Err(MacError::InsufficientPowerGap { .. })));
    }

    #[test]
    fn assign_pairs_strong_link_with_large_gamma() {
        let p = noma_assign(&[(7, c(0.5)), (3, c(1.0))], &[0.25, 1.0], 6.0).unwrap();
        assert_eq!(p.order, vec![3, 7]);
        assert_eq!(p.reflection, vec![1.0, 0.25]);
        assert!((p.powers_db()[0] - p.powers_db()[1] - 18.06).abs() < 0.01);
    }

    #[test]
    fn noiseless_two_device_decode() {
        let a = vec![true, false, true, true, false, false];
        let b = vec![false, false, true, false, true, true];
        let ga = c(1.0);
        let gb = Complex::new(0.0, 0.3);
        let sa = map_symbols::<f64>(&a, Modulation::Bpsk);
        let sb = map_symbols::<f64>(&b, Modulation::Bpsk);
        let rx: Vec<_> = sa.iter().zip(&sb).map(|(x, y)| ga * x + gb * y).collect();
        let p = NomaPairing::from_effective(&[(1, gb), (0, ga)], 6.0).unwrap();
        let out = noma_sic_decode(&rx, &p, Modulation::Bpsk).unwrap();
        assert_eq!(out, vec![(0, a), (1, b)]);
    }

    #[test]
    fn single_device_is_plain_detection() {
        let bits = vec![true, false, false, true, true, false, true, true];
        let g = Complex::new(0.2, -0.1);
        let rx: Vec<_> = map_symbols::<f64>(&bits, Modulation::Qpsk).iter().map(|s| g * s).collect();
        let p = NomaPairing::from_effective(&[(4, g)], 6.0).unwrap();
        let out = noma_sic_decode(&rx, &p, Modulation::Qpsk).unwrap();
        let plain = crate::rxchain::detect_coherent(&rx, &crate::rxchain::ChannelEstimate::known(g), Modulation::Qpsk).unwrap();
        assert_eq!(out, vec![(4, plain.clone())]);
        assert_eq!(plain, bits);
    }
}
