//! Scenario files: TOML with strict keys, `AIOT_` environment overrides and
//! documented parameter ranges.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use aiot_core::channel::{Fading, Geometry, Impairments, LinkBudget};
use aiot_core::framing::DEFAULT_PREAMBLE;
use aiot_core::link::{BurstLayout, Csi, RxOptions, Timing};
use aiot_core::mac::DEFAULT_MIN_POWER_GAP_DB;
use aiot_core::phy::{Modulation, ModulationScheme};
use aiot_netsim::{CarrierSource, DeviceCategory, Harvester, NodeRole, SweepMetric, TopologyKind};

use crate::error::CliError;

pub const ENV_PREFIX: &str = "AIOT_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BerSweep,
    SnrSweep,
    MacCompare,
    TopologyRun,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::BerSweep => "ber-sweep",
            Self::SnrSweep => "snr-sweep",
            Self::MacCompare => "mac-compare",
            Self::TopologyRun => "topology-run",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Frames per sweep point, estimator trials, or inventory rounds.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub phy: PhyConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub rx: RxConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub snr: SnrConfig,
    #[serde(default)]
    pub mac: MacConfig,
    #[serde(default)]
    pub netsim: NetsimConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_trials() -> usize {
    100
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhyConfig {
    pub modulation: Modulation,
    pub sample_rate_hz: f64,
    pub samples_per_symbol: usize,
    pub preamble: u16,
}

impl Default for PhyConfig {
    fn default() -> Self {
        Self { modulation: Modulation::Bpsk, sample_rate_hz: 8e6, samples_per_symbol: 8, preamble: DEFAULT_PREAMBLE }
    }
}

impl PhyConfig {
    pub fn scheme(&self, modulation: Modulation, sps: usize) -> Result<ModulationScheme, CliError> {
        ModulationScheme::new(modulation, self.sample_rate_hz / sps as f64, sps)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub tx_power_dbm: f64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub device_antenna_gain_dbi: f64,
    pub carrier_frequency_hz: f64,
    pub distance_m: f64,
    pub path_loss_exponent: f64,
    pub circulator_isolation_db: f64,
    pub circulator_insertion_loss_db: f64,
    pub noise_figure_db: f64,
    pub fading: Fading,
    /// Per-sample Wiener phase step on the reflected path, rad.
    pub phase_noise_std: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let b = LinkBudget::default();
        Self {
            tx_power_dbm: b.tx_power_dbm,
            tx_antenna_gain_dbi: b.tx_antenna_gain_dbi,
            rx_antenna_gain_dbi: b.rx_antenna_gain_dbi,
            device_antenna_gain_dbi: b.device_antenna_gain_dbi,
            carrier_frequency_hz: b.carrier_frequency_hz,
            distance_m: b.distance_m,
            path_loss_exponent: b.path_loss_exponent,
            circulator_isolation_db: b.circulator_isolation_db,
            circulator_insertion_loss_db: b.circulator_insertion_loss_db,
            noise_figure_db: b.noise_figure_db,
            fading: Fading::None,
            phase_noise_std: 0.0,
        }
    }
}

impl ChannelConfig {
    pub fn budget(&self, sample_rate_hz: f64) -> LinkBudget {
        LinkBudget {
            tx_power_dbm: self.tx_power_dbm,
            tx_antenna_gain_dbi: self.tx_antenna_gain_dbi,
            rx_antenna_gain_dbi: self.rx_antenna_gain_dbi,
            device_antenna_gain_dbi: self.device_antenna_gain_dbi,
            carrier_frequency_hz: self.carrier_frequency_hz,
            distance_m: self.distance_m,
            path_loss_exponent: self.path_loss_exponent,
            circulator_isolation_db: self.circulator_isolation_db,
            circulator_insertion_loss_db: self.circulator_insertion_loss_db,
            noise_figure_db: self.noise_figure_db,
            sample_rate_hz,
            geometry: Geometry::Monostatic,
        }
    }

    pub fn impairments(&self) -> Impairments {
        Impairments { phase_noise_std: self.phase_noise_std }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimingKind {
    Genie,
    Correlator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsiKind {
    Estimated,
    Perfect,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RxConfig {
    pub timing: TimingKind,
    pub sync_threshold: f64,
    pub csi: CsiKind,
    /// Decision-directed phase tracker loop gain; 0 disables it.
    pub phase_tracking_gain: f64,
    pub phase1_samples: usize,
    pub max_response_delay: usize,
    pub tail_samples: usize,
}

impl Default for RxConfig {
    fn default() -> Self {
        let l = BurstLayout::default();
        Self {
            timing: TimingKind::Correlator,
            sync_threshold: 0.6,
            csi: CsiKind::Estimated,
            phase_tracking_gain: 0.0,
            phase1_samples: l.phase1_samples,
            max_response_delay: l.max_response_delay,
            tail_samples: l.tail_samples,
        }
    }
}

impl RxConfig {
    pub fn options(&self, modulation: Modulation) -> RxOptions {
        RxOptions {
            timing: match self.timing {
                TimingKind::Genie => Timing::Genie,
                TimingKind::Correlator => Timing::Correlator { threshold: self.sync_threshold },
            },
            csi: match self.csi {
                CsiKind::Estimated => Csi::Estimated,
                CsiKind::Perfect => Csi::Perfect,
            },
            phase_tracking_gain: if self.phase_tracking_gain > 0.0 && modulation.is_coherent() {
                Some(self.phase_tracking_gain)
            } else {
                None
            },
        }
    }

    pub fn layout(&self) -> BurstLayout {
        BurstLayout {
            phase1_samples: self.phase1_samples,
            max_response_delay: self.max_response_delay,
            tail_samples: self.tail_samples,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrReference {
    /// `snr_db` is E_s/N_0 after the matched filter at every rate.
    Symbol,
    /// `snr_db` is the per-sample SNR; noise density stays fixed across rates.
    Sample,
    /// Noise follows the link budget; `snr_db` is ignored.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    /// Defaults to `phy.modulation`.
    pub schemes: Vec<Modulation>,
    /// Defaults to `phy.samples_per_symbol`; the sample rate stays fixed.
    pub samples_per_symbol: Vec<usize>,
    pub snr_reference: SnrReference,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { snr_db: vec![0.0, 4.0, 8.0], schemes: Vec::new(), samples_per_symbol: Vec::new(), snr_reference: SnrReference::Symbol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnrConfig {
    /// True per-sample SNR points.
    pub snr_db: Vec<f64>,
    pub phase_samples: usize,
}

impl Default for SnrConfig {
    fn default() -> Self {
        Self { snr_db: vec![0.0, 6.0, 12.0], phase_samples: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessScheme {
    Tdma,
    Fdma,
    Cbma,
    Noma,
}

impl AccessScheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tdma => "tdma",
            Self::Fdma => "fdma",
            Self::Cbma => "cbma",
            Self::Noma => "noma",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacConfig {
    pub schemes: Vec<AccessScheme>,
    /// Effective received power of each device relative to the reference, dB.
    pub device_gains_db: Vec<f64>,
    /// Bit SNR of a 0 dB device.
    pub snr_db: Vec<f64>,
    pub bits_per_device: usize,
    pub tdma_slots: usize,
    pub spreading_length: usize,
    pub chip_offsets: Vec<usize>,
    pub power_control: bool,
    pub min_power_gap_db: f64,
    pub fdma_offsets_hz: Vec<f64>,
    pub fdma_sample_rate_hz: f64,
    pub fdma_samples_per_symbol: usize,
}

impl Default for MacConfig {
    fn default() -> Self {
        Self {
            schemes: vec![AccessScheme::Tdma, AccessScheme::Fdma, AccessScheme::Cbma, AccessScheme::Noma],
            device_gains_db: vec![0.0, -10.0],
            snr_db: vec![15.0],
            bits_per_device: 10_000,
            tdma_slots: 2,
            spreading_length: 4,
            chip_offsets: Vec::new(),
            power_control: false,
            min_power_gap_db: DEFAULT_MIN_POWER_GAP_DB,
            fdma_offsets_hz: vec![100e3, 200e3],
            fdma_sample_rate_hz: 1e6,
            fdma_samples_per_symbol: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub name: String,
    pub role: NodeRole,
    pub position: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antenna_gain_dbi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub position: [f64; 2],
    #[serde(default = "default_category")]
    pub category: DeviceCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_store_uj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage_capacity_uj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation_energy_uj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_discharge_uw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_power_uw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplifier_gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_tx_power_dbm: Option<f64>,
}

fn default_category() -> DeviceCategory {
    DeviceCategory::B
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetsimConfig {
    pub topology: TopologyKind,
    /// Empty: a default node layout for the topology.
    pub nodes: Vec<NodeConfig>,
    /// Empty: one category-B device 1 m from the reader.
    pub devices: Vec<DeviceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub downlink_node: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uplink_node: Option<String>,
    pub carrier_source: CarrierSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_cap_dbm: Option<f64>,
    pub relay_hop_gain_db: f64,
    pub slots: usize,
    pub query_s: f64,
    pub max_charge_s: f64,
    pub harvester: Harvester,
    /// Non-empty: run a range sweep of device 0 instead of an inventory log.
    pub sweep_distances_m: Vec<f64>,
    pub sweep_metric: SweepMetric,
}

impl Default for NetsimConfig {
    fn default() -> Self {
        Self {
            topology: TopologyKind::Direct,
            nodes: Vec::new(),
            devices: Vec::new(),
            downlink_node: None,
            uplink_node: None,
            carrier_source: CarrierSource::Downlink,
            power_cap_dbm: None,
            relay_hop_gain_db: 0.0,
            slots: 0,
            query_s: 1e-3,
            max_charge_s: 10.0,
            harvester: Harvester::default(),
            sweep_distances_m: Vec::new(),
            sweep_metric: SweepMetric::SuccessRate,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    if v.is_nan() || v < lo || v > hi {
        return Err(cfg_err(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Parses `text`, applies overrides, validates.
    pub fn from_toml_str(text: &str, env: &[(String, String)]) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        apply_overrides(&mut table, env)?;
        let cfg: Self = table.try_into().map_err(|e: toml::de::Error| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, env: &[(String, String)]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, env)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 || self.trials > 10_000_000 {
            return Err(cfg_err(format!("trials = {} outside [1, 10000000]", self.trials)));
        }
        let p = &self.phy;
        in_range("phy.sample_rate_hz", p.sample_rate_hz, 1e3, 1e9)?;
        let mut sps = vec![p.samples_per_symbol];
        sps.extend(&self.sweep.samples_per_symbol);
        for s in sps {
            if !(1..=4096).contains(&s) {
                return Err(cfg_err(format!("samples_per_symbol = {s} outside [1, 4096]")));
            }
        }
        let c = &self.channel;
        in_range("channel.tx_power_dbm", c.tx_power_dbm, -50.0, 60.0)?;
        for (n, v) in [
            ("channel.tx_antenna_gain_dbi", c.tx_antenna_gain_dbi),
            ("channel.rx_antenna_gain_dbi", c.rx_antenna_gain_dbi),
            ("channel.device_antenna_gain_dbi", c.device_antenna_gain_dbi),
        ] {
            in_range(n, v, -20.0, 40.0)?;
        }
        in_range("channel.carrier_frequency_hz", c.carrier_frequency_hz, 1e6, 1e11)?;
        in_range("channel.distance_m", c.distance_m, 1e-3, 1e5)?;
        in_range("channel.path_loss_exponent", c.path_loss_exponent, 2.0, 6.0)?;
        in_range("channel.circulator_isolation_db", c.circulator_isolation_db, 0.0, f64::INFINITY)?;
        in_range("channel.circulator_insertion_loss_db", c.circulator_insertion_loss_db, 0.0, 20.0)?;
        in_range("channel.noise_figure_db", c.noise_figure_db, 0.0, 30.0)?;
        in_range("channel.phase_noise_std", c.phase_noise_std, 0.0, 1.0)?;
        let r = &self.rx;
        in_range("rx.sync_threshold", r.sync_threshold, 0.0, 1.0)?;
        in_range("rx.phase_tracking_gain", r.phase_tracking_gain, 0.0, 1.0)?;
        if r.phase1_samples < 16 || r.phase1_samples > 1 << 22 {
            return Err(cfg_err(format!("rx.phase1_samples = {} outside [16, 4194304]", r.phase1_samples)));
        }
        if r.max_response_delay > 1 << 20 || r.tail_samples > 1 << 20 {
            return Err(cfg_err("rx.max_response_delay and rx.tail_samples must be ≤ 1048576"));
        }
        for &s in &self.sweep.snr_db {
            in_range("sweep.snr_db", s, -30.0, 60.0)?;
        }
        for &s in &self.snr.snr_db {
            in_range("snr.snr_db", s, -30.0, 60.0)?;
        }
        if self.snr.phase_samples < 16 || self.snr.phase_samples > 1 << 24 {
            return Err(cfg_err("snr.phase_samples outside [16, 16777216]"));
        }
        self.validate_mac()?;
        self.validate_netsim()?;
        match self.experiment {
            Experiment::BerSweep if self.sweep.snr_db.is_empty() && self.sweep.snr_reference != SnrReference::Budget => {
                Err(cfg_err("sweep.snr_db is empty"))
            }
            Experiment::SnrSweep if self.snr.snr_db.is_empty() => Err(cfg_err("snr.snr_db is empty")),
            Experiment::MacCompare if self.mac.schemes.is_empty() || self.mac.snr_db.is_empty() => {
                Err(cfg_err("mac.schemes and mac.snr_db must be non-empty"))
            }
            _ => Ok(()),
        }
    }

    fn validate_mac(&self) -> Result<(), CliError> {
        let m = &self.mac;
        let n = m.device_gains_db.len();
        if n == 0 || n > 32 {
            return Err(cfg_err("mac.device_gains_db needs 1 to 32 entries"));
        }
        for &g in &m.device_gains_db {
            in_range("mac.device_gains_db", g, -60.0, 0.0)?;
        }
        for &s in &m.snr_db {
            in_range("mac.snr_db", s, -30.0, 60.0)?;
        }
        if m.bits_per_device == 0 || m.bits_per_device > 10_000_000 {
            return Err(cfg_err("mac.bits_per_device outside [1, 10000000]"));
        }
        if m.tdma_slots == 0 {
            return Err(cfg_err("mac.tdma_slots must be ≥ 1"));
        }
        if ![4, 8, 16, 32].contains(&m.spreading_length) {
            return Err(cfg_err(format!("mac.spreading_length = {} not in {{4, 8, 16, 32}}", m.spreading_length)));
        }
        if !m.chip_offsets.is_empty() && m.chip_offsets.len() != n {
            return Err(cfg_err("mac.chip_offsets must be empty or have one entry per device"));
        }
        if m.chip_offsets.iter().any(|&o| o >= m.spreading_length) {
            return Err(cfg_err("mac.chip_offsets must be shorter than one spreading sequence"));
        }
        in_range("mac.min_power_gap_db", m.min_power_gap_db, 0.0, 60.0)?;
        in_range("mac.fdma_sample_rate_hz", m.fdma_sample_rate_hz, 1e3, 1e9)?;
        if m.fdma_samples_per_symbol < 2 {
            return Err(cfg_err("mac.fdma_samples_per_symbol must be ≥ 2"));
        }
        for &f in &m.fdma_offsets_hz {
            if !(f.abs() > 0.0 && f.abs() < m.fdma_sample_rate_hz / 2.0) {
                return Err(cfg_err(format!("mac.fdma_offsets_hz entry {f} must lie inside (0, fs/2)")));
            }
        }
        Ok(())
    }

    fn validate_netsim(&self) -> Result<(), CliError> {
        let s = &self.netsim;
        in_range("netsim.query_s", s.query_s, 0.0, 3600.0)?;
        in_range("netsim.max_charge_s", s.max_charge_s, 0.0, 86400.0)?;
        in_range("netsim.harvester.sensitivity_dbm", s.harvester.sensitivity_dbm, -60.0, 30.0)?;
        in_range("netsim.harvester.efficiency", s.harvester.efficiency, 0.0, 1.0)?;
        in_range("netsim.relay_hop_gain_db", s.relay_hop_gain_db, -60.0, 60.0)?;
        if let Some(cap) = s.power_cap_dbm {
            in_range("netsim.power_cap_dbm", cap, -50.0, 60.0)?;
        }
        for &d in &s.sweep_distances_m {
            in_range("netsim.sweep_distances_m", d, 1e-3, 1e5)?;
        }
        if s.devices.len() > 1024 {
            return Err(cfg_err("netsim.devices holds at most 1024 devices"));
        }
        Ok(())
    }
}

/// Applies `AIOT_KEY=value` (top level) and `AIOT_SECTION__KEY=value`
/// overrides. Values parse as TOML literals, falling back to strings.
pub fn apply_overrides(table: &mut toml::Table, env: &[(String, String)]) -> Result<(), CliError> {
    let mut vars: Vec<&(String, String)> = env.iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(|s| s.to_ascii_lowercase()).collect();
        if path.iter().any(String::is_empty) {
            return Err(cfg_err(format!("malformed override variable {key}")));
        }
        let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.clone()),
        };
        let mut t = &mut *table;
        for part in &path[..path.len() - 1] {
            let entry = t.entry(part.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            t = entry
                .as_table_mut()
                .ok_or_else(|| cfg_err(format!("{key}: '{part}' is not a section")))?;
        }
        t.insert(path[path.len() - 1].clone(), value);
    }
    Ok(())
}

/// `AIOT_*` variables of the process environment.
pub fn process_env() -> Vec<(String, String)> {
    std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
        ScenarioConfig::from_toml_str(text, &[])
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse("experiment = \"ber-sweep\"").unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.channel.carrier_frequency_hz, 925e6);
        assert_eq!(c.phy.preamble, DEFAULT_PREAMBLE);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(parse("experiment = \"ber-sweep\"\ncolour = 3"), Err(CliError::Config(_))));
        assert!(matches!(parse("experiment = \"ber-sweep\"\n[phy]\nmodulaton = \"ook\""), Err(CliError::Config(_))));
        assert!(matches!(parse("experiment = \"fft\""), Err(CliError::Config(_))));
    }

    #[test]
    fn ranges_enforced() {
        assert!(parse("experiment = \"ber-sweep\"\n[channel]\npath_loss_exponent = 1.5").is_err());
        assert!(parse("experiment = \"ber-sweep\"\ntrials = 0").is_err());
        assert!(parse("experiment = \"mac-compare\"\n[mac]\nspreading_length = 6").is_err());
    }

    #[test]
    fn env_overrides() {
        let env = vec![
            ("AIOT_SEED".to_string(), "42".to_string()),
            ("AIOT_PHY__MODULATION".to_string(), "qpsk".to_string()),
            ("AIOT_SWEEP__SNR_DB".to_string(), "[1.5, 2]".to_string()),
        ];
        let c = ScenarioConfig::from_toml_str("experiment = \"ber-sweep\"\nseed = 3", &env).unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.phy.modulation, Modulation::Qpsk);
        assert_eq!(c.sweep.snr_db, vec![1.5, 2.0]);
        let bad = vec![("AIOT_PHY__NOPE".to_string(), "1".to_string())];
        assert!(ScenarioConfig::from_toml_str("experiment = \"ber-sweep\"", &bad).is_err());
    }
}
