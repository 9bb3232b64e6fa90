//! Accuracy of the two-phase SNR estimator against a known per-sample SNR.

use num_complex::Complex;
use rayon::prelude::*;

use aiot_core::channel::{compose_received_with, realize_link};
use aiot_core::link::LinkSetup;
use aiot_core::phy::{modulate, ImpedanceMap};
use aiot_core::rng::{random_bits, stream, sub_seed};
use aiot_core::rxchain::estimate_snr_two_phase;
use aiot_core::signal::ComplexSamples;

use super::Table;
use crate::config::ScenarioConfig;
use crate::error::CliError;

pub const HEADER: &str = "snr_db,trials,mean_estimate_db,min_estimate_db,max_estimate_db,max_abs_error_db";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub trials: usize,
    /// Mean on the linear scale, in dB.
    pub mean_db: f64,
    pub min_db: f64,
    pub max_db: f64,
    pub max_abs_error_db: f64,
}

/// Estimated per-sample SNR (linear) for each trial at true `snr_db`.
pub fn estimates(cfg: &ScenarioConfig, snr_db: f64) -> Result<Vec<f64>, CliError> {
    let sps = cfg.phy.samples_per_symbol;
    let scheme = cfg.phy.scheme(cfg.phy.modulation, sps)?;
    let budget = cfg.channel.budget(scheme.sample_rate());
    let n = cfg.snr.phase_samples.div_ceil(sps) * sps;
    let map = ImpedanceMap::<f64>::default_for(cfg.phy.modulation);
    let setup = LinkSetup::<f64>::new(scheme);
    let carrier = Complex::new(budget.carrier_amplitude(), 0.0);
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut link = realize_link::<f64>(&budget, cfg.channel.fading, sub_seed(cfg.seed, t)).map_err(CliError::runtime)?;
            let ps = setup.reflected_power(&link, carrier).map_err(CliError::runtime)?;
            link.noise_power = ps / 10f64.powf(snr_db / 10.0);
            let mut rng = stream(cfg.seed, t);
            let bits = random_bits(&mut rng, n / sps * scheme.bits_per_symbol());
            let gamma = modulate(&bits, &scheme, &map).map_err(CliError::runtime)?.padded(n, 0);
            let tx = ComplexSamples::constant(carrier, 2 * n, scheme.sample_rate());
            let rx = compose_received_with(&tx, &gamma, &link, &cfg.channel.impairments(), &mut rng)
                .map_err(CliError::runtime)?;
            let est = estimate_snr_two_phase(&rx.slice(0..n), &rx.slice(n..2 * n), &tx).map_err(CliError::runtime)?;
            Ok(est.gamma)
        })
        .collect()
}

pub fn run(cfg: &ScenarioConfig) -> Result<Vec<SnrPoint>, CliError> {
    cfg.snr
        .snr_db
        .iter()
        .map(|&snr_db| {
            let est = estimates(cfg, snr_db)?;
            let db: Vec<f64> = est.iter().map(|g| 10.0 * g.log10()).collect();
            let mean = est.iter().sum::<f64>() / est.len() as f64;
            Ok(SnrPoint {
                snr_db,
                trials: est.len(),
                mean_db: 10.0 * mean.log10(),
                min_db: db.iter().copied().fold(f64::INFINITY, f64::min),
                max_db: db.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                max_abs_error_db: db.iter().map(|d| (d - snr_db).abs()).fold(0.0, f64::max),
            })
        })
        .collect()
}

pub fn table(points: &[SnrPoint]) -> Table {
    let rows = points
        .iter()
        .map(|p| {
            format!(
                "{:.3},{},{:.4},{:.4},{:.4},{:.4}",
                p.snr_db, p.trials, p.mean_db, p.min_db, p.max_db, p.max_abs_error_db
            )
        })
        .collect();
    Table { header: HEADER, rows }
}
