//! BER versus SNR, modulation and symbol rate over the simulated link.

use num_complex::Complex;
use rayon::prelude::*;

use aiot_core::channel::{realize_link, Fading, LinkRealization};
use aiot_core::link::{simulate_frame, FrameOutcome, LinkSetup};
use aiot_core::phy::{Modulation, ModulationScheme};
use aiot_core::rng::{stream, sub_seed};
use aiot_core::stats::ErrorCount;

use super::Table;
use crate::config::{ScenarioConfig, SnrReference};
use crate::error::CliError;

pub const HEADER: &str = "snr_db,scheme,rate_bps,bits,errors,ber,ci_low,ci_high";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub modulation: Modulation,
    pub samples_per_symbol: usize,
    pub rate_bps: f64,
    pub count: ErrorCount,
}

pub fn schemes(cfg: &ScenarioConfig) -> Vec<Modulation> {
    if cfg.sweep.schemes.is_empty() {
        vec![cfg.phy.modulation]
    } else {
        cfg.sweep.schemes.clone()
    }
}

pub fn rates(cfg: &ScenarioConfig) -> Vec<usize> {
    if cfg.sweep.samples_per_symbol.is_empty() {
        vec![cfg.phy.samples_per_symbol]
    } else {
        cfg.sweep.samples_per_symbol.clone()
    }
}

fn snr_points(cfg: &ScenarioConfig) -> Vec<f64> {
    if cfg.sweep.snr_reference == SnrReference::Budget {
        vec![f64::NAN]
    } else {
        cfg.sweep.snr_db.clone()
    }
}

/// Link setup and realization of trial `trial`, noise set per the sweep's
/// SNR reference. Trial seeds do not depend on scheme, rate or SNR.
pub fn trial_link(
    cfg: &ScenarioConfig,
    scheme: ModulationScheme,
    snr_db: f64,
    trial: u64,
) -> Result<(LinkSetup<f64>, LinkRealization<f64>, Complex<f64>), CliError> {
    let budget = cfg.channel.budget(scheme.sample_rate());
    let mut setup = LinkSetup::<f64>::new(scheme);
    setup.preamble = cfg.phy.preamble;
    setup.layout = cfg.rx.layout();
    setup.impairments = cfg.channel.impairments();
    let carrier = Complex::new(budget.carrier_amplitude(), 0.0);
    let mut link = realize_link::<f64>(&budget, cfg.channel.fading, sub_seed(cfg.seed, trial)).map_err(CliError::runtime)?;
    // Noise is referenced to the mean (unfaded) link power.
    let mean = realize_link::<f64>(&budget, Fading::None, 0).map_err(CliError::runtime)?;
    link.noise_power = match cfg.sweep.snr_reference {
        SnrReference::Budget => link.noise_power,
        SnrReference::Symbol => setup.noise_for_symbol_snr(&mean, carrier, snr_db).map_err(CliError::runtime)?,
        SnrReference::Sample => {
            setup.reflected_power(&mean, carrier).map_err(CliError::runtime)? / 10f64.powf(snr_db / 10.0)
        }
    };
    Ok((setup, link, carrier))
}

/// Per-trial outcomes of one sweep point, in trial order.
pub fn point_outcomes(
    cfg: &ScenarioConfig,
    modulation: Modulation,
    samples_per_symbol: usize,
    snr_db: f64,
) -> Result<Vec<FrameOutcome>, CliError> {
    let scheme = cfg.phy.scheme(modulation, samples_per_symbol)?;
    let opts = cfg.rx.options(modulation);
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let (setup, link, carrier) = trial_link(cfg, scheme, snr_db, t)?;
            let mut rng = stream(cfg.seed, t);
            simulate_frame(&setup, &link, carrier, &opts, &mut rng).map_err(CliError::runtime)
        })
        .collect()
}

pub fn run(cfg: &ScenarioConfig) -> Result<Vec<BerPoint>, CliError> {
    let mut points = Vec::new();
    for modulation in schemes(cfg) {
        for sps in rates(cfg) {
            for snr_db in snr_points(cfg) {
                let scheme = cfg.phy.scheme(modulation, sps)?;
                let count = point_outcomes(cfg, modulation, sps, snr_db)?.iter().map(|o| o.errors).sum();
                points.push(BerPoint {
                    snr_db,
                    modulation,
                    samples_per_symbol: sps,
                    rate_bps: scheme.bit_rate(),
                    count,
                });
            }
        }
    }
    Ok(points)
}

pub fn table(points: &[BerPoint]) -> Table {
    let rows = points
        .iter()
        .map(|p| {
            let (lo, hi) = p.count.wilson95();
            let snr = if p.snr_db.is_nan() { String::new() } else { format!("{:.3}", p.snr_db) };
            format!(
                "{snr},{},{:.0},{},{},{:.6e},{:.6e},{:.6e}",
                p.modulation.name(),
                p.rate_bps,
                p.count.bits,
                p.count.errors,
                p.count.ber(),
                lo,
                hi
            )
        })
        .collect();
    Table { header: HEADER, rows }
}
