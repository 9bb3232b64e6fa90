//! Experiment runner: scenario files in, CSV tables out.

pub mod config;
pub mod error;
pub mod experiments;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use aiot_core::framing::{CRC_INIT, CRC_POLY, FRAME_BITS, PAYLOAD_BITS};

pub use config::{Experiment, ScenarioConfig};
pub use error::CliError;

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: String,
}

/// Runs the configured experiment and renders its CSV.
pub fn execute(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    use experiments::{ber, mac, snr, topology};
    let (csv, summary) = match cfg.experiment {
        Experiment::BerSweep => {
            let points = ber::run(cfg)?;
            let bits: u64 = points.iter().map(|p| p.count.bits).sum();
            (ber::table(&points).to_csv(), format!("ber-sweep: {} points, {bits} bits", points.len()))
        }
        Experiment::SnrSweep => {
            let points = snr::run(cfg)?;
            let worst = points.iter().map(|p| (p.mean_db - p.snr_db).abs()).fold(0.0, f64::max);
            (
                snr::table(&points).to_csv(),
                format!("snr-sweep: {} points, worst mean error {worst:.3} dB", points.len()),
            )
        }
        Experiment::MacCompare => {
            let rows = mac::run(cfg)?;
            (mac::table(&rows).to_csv(), format!("mac-compare: {} rows", rows.len()))
        }
        Experiment::TopologyRun => topology::run(cfg)?,
    };
    Ok(RunOutput { csv, summary })
}

/// Loads `config`, applies `seed`/`out` overrides, runs, writes the CSV. The
/// output file is written only after the experiment succeeds. Returns the
/// path written, if any, and the summary.
pub fn run_file(
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    env: &[(String, String)],
) -> Result<(Option<PathBuf>, RunOutput), CliError> {
    let mut cfg = ScenarioConfig::load(config, env)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let target = out.or_else(|| cfg.output.clone());
    let result = execute(&cfg)?;
    if let Some(path) = &target {
        std::fs::write(path, &result.csv)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok((target, result))
}

fn fmt_value(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => format!("[{}]", a.iter().map(fmt_value).collect::<Vec<_>>().join(", ")),
        toml::Value::Table(t) => {
            format!("{{{}}}", t.iter().map(|(k, v)| format!("{k}={}", fmt_value(v))).collect::<Vec<_>>().join(", "))
        }
        toml::Value::Datetime(d) => d.to_string(),
    }
}

fn flatten(prefix: &str, t: &toml::Table, out: &mut String) {
    for (k, v) in t {
        if let toml::Value::Table(sub) = v {
            flatten(&format!("{prefix}{k}."), sub, out);
        } else {
            let _ = writeln!(out, "{prefix}{k}={}", fmt_value(v));
        }
    }
}

/// Every resolved parameter as `key=value` lines grouped by section, then
/// the fixed protocol constants.
pub fn describe(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let value = toml::Table::try_from(cfg).map_err(CliError::runtime)?;
    let mut out = String::new();
    for (k, v) in &value {
        if !v.is_table() {
            let _ = writeln!(out, "{k}={}", fmt_value(v));
        }
    }
    for (k, v) in &value {
        if let toml::Value::Table(t) = v {
            let _ = writeln!(out, "[{k}]");
            flatten("", t, &mut out);
        }
    }
    let scheme = cfg.phy.scheme(cfg.phy.modulation, cfg.phy.samples_per_symbol)?;
    let budget = cfg.channel.budget(scheme.sample_rate());
    let _ = writeln!(out, "[derived]");
    let _ = writeln!(out, "preamble=0x{:04X}", cfg.phy.preamble);
    let _ = writeln!(out, "crc_polynomial=0x{CRC_POLY:04X}");
    let _ = writeln!(out, "crc_init=0x{CRC_INIT:04X}");
    let _ = writeln!(out, "frame_bits={FRAME_BITS}");
    let _ = writeln!(out, "payload_bits={PAYLOAD_BITS}");
    let _ = writeln!(out, "symbol_rate_hz={}", scheme.symbol_rate);
    let _ = writeln!(out, "bit_rate_bps={}", scheme.bit_rate());
    let _ = writeln!(out, "wavelength_m={:.6}", budget.wavelength_m());
    let _ = writeln!(out, "noise_power_dbm={:.3}", 10.0 * budget.noise_power_mw().log10());
    let _ = writeln!(out, "incident_power_dbm={:.3}", budget.incident_power_dbm().map_err(CliError::runtime)?);
    Ok(out)
}
