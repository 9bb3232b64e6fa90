//! Multi-device access comparison: per-device BER for each access scheme.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use aiot_core::mac::{
    cbma_despread, cbma_spread, cbma_superpose, collisions, fdma_assign, fdma_shift, map_symbols, noma_sic_decode,
    power_control_weights, tdma_schedule, MacError, NomaPairing, SpreadingSet,
};
use aiot_core::phy::{GammaWaveform, Modulation};
use aiot_core::rng::{add_awgn, random_bits, stream, sub_seed};
use aiot_core::rxchain::{detect_coherent, freq_shift_filter, matched_filter, ChannelEstimate};
use aiot_core::scalar::phasor;
use aiot_core::signal::ComplexSamples;
use aiot_core::stats::ErrorCount;

use super::Table;
use crate::config::{AccessScheme, MacConfig, ScenarioConfig};
use crate::error::CliError;

pub const HEADER: &str = "scheme,snr_db,device,gain_db,bits,errors,ber,ci_low,ci_high";

/// Bits per independently seeded block.
const BLOCK_BITS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct MacRow {
    pub scheme: AccessScheme,
    pub snr_db: f64,
    pub device: usize,
    pub gain_db: f64,
    pub count: ErrorCount,
}

fn mac_err(e: MacError) -> CliError {
    match e {
        MacError::InsufficientFrequencies { .. } | MacError::InsufficientPowerGap { .. } | MacError::InvalidArgument(_) => {
            CliError::Config(e.to_string())
        }
        other => CliError::runtime(other),
    }
}

/// Complex gains with configured magnitudes and per-block random phases.
fn gains<R: Rng + ?Sized>(mac: &MacConfig, rng: &mut R) -> Vec<Complex<f64>> {
    mac.device_gains_db
        .iter()
        .map(|db| phasor(rng.random::<f64>() * std::f64::consts::TAU) * 10f64.powf(db / 20.0))
        .collect()
}

/// Transmitted and decided bits of every device for one block.
type Block = (Vec<Vec<bool>>, Vec<Vec<bool>>);

fn tdma_block<R: Rng + ?Sized>(mac: &MacConfig, noise: f64, g: &[Complex<f64>], rng: &mut R) -> Result<Block, CliError> {
    let schedule = tdma_schedule(g.len(), mac.tdma_slots).map_err(mac_err)?;
    if collisions(&schedule) != 0 {
        return Err(CliError::runtime("round-robin schedule produced a collision"));
    }
    let mut sent = Vec::new();
    let mut got = Vec::new();
    // Each device owns its slot, so it is received alone.
    for &gain in g {
        let bits = random_bits(rng, BLOCK_BITS);
        let mut rx: Vec<_> = map_symbols::<f64>(&bits, Modulation::Bpsk).iter().map(|s| gain * s).collect();
        add_awgn(&mut rx, noise, rng);
        got.push(detect_coherent(&rx, &ChannelEstimate::known(gain), Modulation::Bpsk).map_err(CliError::runtime)?);
        sent.push(bits);
    }
    Ok((sent, got))
}

fn cbma_block<R: Rng + ?Sized>(mac: &MacConfig, noise: f64, g: &[Complex<f64>], rng: &mut R) -> Result<Block, CliError> {
    let set = SpreadingSet::walsh(mac.spreading_length, g.len()).map_err(mac_err)?;
    let weights = if mac.power_control { power_control_weights(g) } else { vec![1.0; g.len()] };
    let eff: Vec<_> = g.iter().zip(&weights).map(|(h, w)| h * w).collect();
    let sent: Vec<Vec<bool>> = (0..g.len()).map(|_| random_bits(rng, BLOCK_BITS)).collect();
    let streams: Vec<_> = sent.iter().enumerate().map(|(k, b)| cbma_spread::<f64>(b, set.sequence(k))).collect();
    let offsets = if mac.chip_offsets.is_empty() { vec![0; g.len()] } else { mac.chip_offsets.clone() };
    let mut rx = cbma_superpose(&streams, &eff, &offsets).map_err(mac_err)?;
    // Per-chip noise so that a unit-gain device sees the configured bit SNR.
    add_awgn(&mut rx, noise * mac.spreading_length as f64, rng);
    let got = cbma_despread(&rx, &set, &eff).map_err(mac_err)?;
    Ok((sent, got))
}

fn noma_block<R: Rng + ?Sized>(mac: &MacConfig, noise: f64, g: &[Complex<f64>], rng: &mut R) -> Result<Block, CliError> {
    let devices: Vec<_> = g.iter().copied().enumerate().collect();
    let pairing = NomaPairing::from_effective(&devices, mac.min_power_gap_db).map_err(mac_err)?;
    let sent: Vec<Vec<bool>> = (0..g.len()).map(|_| random_bits(rng, BLOCK_BITS)).collect();
    let mut rx = vec![Complex::new(0.0, 0.0); BLOCK_BITS];
    for (bits, &gain) in sent.iter().zip(g) {
        for (r, s) in rx.iter_mut().zip(map_symbols::<f64>(bits, Modulation::Bpsk)) {
            *r += gain * s;
        }
    }
    add_awgn(&mut rx, noise, rng);
    let got = noma_sic_decode(&rx, &pairing, Modulation::Bpsk).map_err(mac_err)?;
    Ok((sent, got.into_iter().map(|(_, b)| b).collect()))
}

fn fdma_block<R: Rng + ?Sized>(mac: &MacConfig, noise: f64, g: &[Complex<f64>], rng: &mut R) -> Result<Block, CliError> {
    let schedule = fdma_assign(g.len(), &mac.fdma_offsets_hz).map_err(mac_err)?;
    let fs = mac.fdma_sample_rate_hz;
    let sps = mac.fdma_samples_per_symbol;
    let bw = 2.0 * fs / sps as f64;
    let sent: Vec<Vec<bool>> = (0..g.len()).map(|_| random_bits(rng, BLOCK_BITS)).collect();
    let mut rx = vec![Complex::new(0.0, 0.0); BLOCK_BITS * sps];
    for (k, (bits, &gain)) in sent.iter().zip(g).enumerate() {
        let base: Vec<_> = map_symbols::<f64>(bits, Modulation::Bpsk)
            .iter()
            .flat_map(|&s| std::iter::repeat_n(s, sps))
            .collect();
        let shifted = fdma_shift(&GammaWaveform(base), schedule.frequency_of(k).expect("assigned"), fs);
        for (r, s) in rx.iter_mut().zip(shifted.as_slice()) {
            *r += gain * s;
        }
    }
    add_awgn(&mut rx, noise * sps as f64, rng);
    let rx = ComplexSamples::new(rx, fs);
    let mut got = Vec::with_capacity(g.len());
    for (k, &gain) in g.iter().enumerate() {
        let f = schedule.frequency_of(k).expect("assigned");
        let y = freq_shift_filter(&rx, f, bw, fs).map_err(CliError::runtime)?;
        let z = matched_filter(y.as_slice(), sps).map_err(CliError::runtime)?;
        // The square wave's fundamental carries 2/π of the amplitude per sideband.
        let h = ChannelEstimate::known(gain * std::f64::consts::FRAC_2_PI);
        got.push(detect_coherent(&z, &h, Modulation::Bpsk).map_err(CliError::runtime)?);
    }
    Ok((sent, got))
}

fn scheme_index(s: AccessScheme) -> u64 {
    match s {
        AccessScheme::Tdma => 0,
        AccessScheme::Fdma => 1,
        AccessScheme::Cbma => 2,
        AccessScheme::Noma => 3,
    }
}

/// Per-device error counts of `scheme` at bit SNR `snr_db` of a 0 dB device.
pub fn evaluate(cfg: &ScenarioConfig, scheme: AccessScheme, snr_db: f64) -> Result<Vec<ErrorCount>, CliError> {
    let mac = &cfg.mac;
    let noise = 10f64.powf(-snr_db / 10.0);
    let blocks = mac.bits_per_device.div_ceil(BLOCK_BITS);
    let seed = sub_seed(cfg.seed, scheme_index(scheme));
    let per_block: Vec<Vec<ErrorCount>> = (0..blocks as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b);
            let g = gains(mac, &mut rng);
            let (sent, got) = match scheme {
                AccessScheme::Tdma => tdma_block(mac, noise, &g, &mut rng),
                AccessScheme::Fdma => fdma_block(mac, noise, &g, &mut rng),
                AccessScheme::Cbma => cbma_block(mac, noise, &g, &mut rng),
                AccessScheme::Noma => noma_block(mac, noise, &g, &mut rng),
            }?;
            Ok(sent.iter().zip(&got).map(|(s, r)| ErrorCount::compare(s, r)).collect())
        })
        .collect::<Result<_, CliError>>()?;
    let mut total = vec![ErrorCount::default(); mac.device_gains_db.len()];
    for blk in per_block {
        for (t, c) in total.iter_mut().zip(blk) {
            *t += c;
        }
    }
    Ok(total)
}

pub fn run(cfg: &ScenarioConfig) -> Result<Vec<MacRow>, CliError> {
    let mut rows = Vec::new();
    for &scheme in &cfg.mac.schemes {
        for &snr_db in &cfg.mac.snr_db {
            for (device, count) in evaluate(cfg, scheme, snr_db)?.into_iter().enumerate() {
                rows.push(MacRow { scheme, snr_db, device, gain_db: cfg.mac.device_gains_db[device], count });
            }
        }
    }
    Ok(rows)
}

pub fn table(rows: &[MacRow]) -> Table {
    Table {
        header: HEADER,
        rows: rows
            .iter()
            .map(|r| {
                let (lo, hi) = r.count.wilson95();
                format!(
                    "{},{:.3},{},{:.3},{},{},{:.6e},{:.6e},{:.6e}",
                    r.scheme.name(),
                    r.snr_db,
                    r.device,
                    r.gain_db,
                    r.count.bits,
                    r.count.errors,
                    r.count.ber(),
                    lo,
                    hi
                )
            })
            .collect(),
    }
}
