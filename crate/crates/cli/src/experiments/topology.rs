//! Inventory rounds or range sweeps over a configured topology.

use aiot_core::mac::tdma_schedule;
use aiot_netsim::{
    range_sweep, run_inventory, sweep_csv, Device, DeviceState, Node, NodeRole, RadioParams, RoundConfig,
    TopologyKind, TopologyScene,
};

use crate::config::{DeviceConfig, NodeConfig, ScenarioConfig};
use crate::error::CliError;

fn default_nodes(kind: TopologyKind) -> Vec<NodeConfig> {
    let n = |name: &str, role, x| NodeConfig {
        name: name.into(),
        role,
        position: [x, 0.0],
        tx_power_dbm: None,
        antenna_gain_dbi: None,
    };
    match kind {
        TopologyKind::Direct => vec![n("bs", NodeRole::Bs, 0.0)],
        TopologyKind::Relayed => vec![n("bs", NodeRole::Bs, -20.0), n("relay", NodeRole::Intermediate, 0.0)],
        TopologyKind::Assisted => vec![n("bs", NodeRole::Bs, 0.0), n("helper", NodeRole::Assisting, 2.0)],
        TopologyKind::UserTerminal => vec![n("ue", NodeRole::Ue, 0.0)],
    }
}

fn device_state(d: &DeviceConfig) -> DeviceState {
    let mut s = DeviceState::for_category(d.category);
    let set = |field: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *field = v;
        }
    };
    set(&mut s.energy_store, d.energy_store_uj);
    set(&mut s.storage_capacity, d.storage_capacity_uj);
    set(&mut s.activation_energy, d.activation_energy_uj);
    set(&mut s.self_discharge, d.self_discharge_uw);
    set(&mut s.operating_power, d.operating_power_uw);
    set(&mut s.amplifier_gain, d.amplifier_gain);
    if d.active_tx_power_dbm.is_some() {
        s.active_tx_power_dbm = d.active_tx_power_dbm;
    }
    s
}

/// Resolves the scene described by `cfg.netsim` and `cfg.channel`.
pub fn scene(cfg: &ScenarioConfig) -> Result<TopologyScene, CliError> {
    let ns = &cfg.netsim;
    let ch = &cfg.channel;
    let nodes = if ns.nodes.is_empty() { default_nodes(ns.topology) } else { ns.nodes.clone() };
    let nodes: Vec<Node> = nodes
        .into_iter()
        .map(|n| Node {
            name: n.name,
            role: n.role,
            position: n.position,
            tx_power_dbm: n.tx_power_dbm.unwrap_or(ch.tx_power_dbm),
            antenna_gain_dbi: n.antenna_gain_dbi.unwrap_or(ch.tx_antenna_gain_dbi),
        })
        .collect();
    let reader = match ns.topology {
        TopologyKind::Relayed => nodes.iter().find(|n| n.role == NodeRole::Intermediate),
        _ => nodes.first(),
    }
    .map(|n| n.position)
    .unwrap_or([0.0, 0.0]);
    let devices = if ns.devices.is_empty() {
        vec![Device { id: 0, position: [reader[0] + ch.distance_m, reader[1]], state: DeviceState::category_b() }]
    } else {
        ns.devices
            .iter()
            .enumerate()
            .map(|(id, d)| Device { id, position: d.position, state: device_state(d) })
            .collect()
    };
    let scene = TopologyScene {
        kind: ns.topology,
        nodes,
        devices,
        downlink_node: ns.downlink_node.clone(),
        uplink_node: ns.uplink_node.clone(),
        carrier_source: ns.carrier_source.clone(),
        power_cap_dbm: ns.power_cap_dbm,
        relay_hop_gain_db: ns.relay_hop_gain_db,
        radio: RadioParams {
            carrier_frequency_hz: ch.carrier_frequency_hz,
            path_loss_exponent: ch.path_loss_exponent,
            device_antenna_gain_dbi: ch.device_antenna_gain_dbi,
            circulator_isolation_db: ch.circulator_isolation_db,
            circulator_insertion_loss_db: ch.circulator_insertion_loss_db,
            noise_figure_db: ch.noise_figure_db,
            fading: ch.fading,
        },
    };
    scene.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(scene)
}

pub fn round_config(cfg: &ScenarioConfig) -> Result<RoundConfig, CliError> {
    Ok(RoundConfig {
        scheme: cfg.phy.scheme(cfg.phy.modulation, cfg.phy.samples_per_symbol)?,
        rx: cfg.rx.options(cfg.phy.modulation),
        harvester: cfg.netsim.harvester,
        impairments: cfg.channel.impairments(),
        query_s: cfg.netsim.query_s,
        max_charge_s: cfg.netsim.max_charge_s,
    })
}

/// CSV text and a one-line summary.
pub fn run(cfg: &ScenarioConfig) -> Result<(String, String), CliError> {
    let scene = scene(cfg)?;
    let rc = round_config(cfg)?;
    if !cfg.netsim.sweep_distances_m.is_empty() {
        let rows = range_sweep(&scene, &cfg.netsim.sweep_distances_m, cfg.netsim.sweep_metric, &rc, cfg.trials, cfg.seed)
            .map_err(CliError::runtime)?;
        let summary = format!("range sweep over {} distances, {} trials each", rows.len(), cfg.trials);
        return Ok((sweep_csv(&rows), summary));
    }
    let slots = if cfg.netsim.slots == 0 { scene.devices.len() } else { cfg.netsim.slots };
    let schedule = tdma_schedule(scene.devices.len(), slots).map_err(|e| CliError::Config(e.to_string()))?;
    let log = run_inventory(&scene, &schedule, &rc, cfg.seed, cfg.trials).map_err(CliError::runtime)?;
    let summary = format!(
        "topology {}: {} of {} responses delivered ({:.1}%)",
        scene.kind.number(),
        log.successes(),
        log.records.len(),
        100.0 * log.success_rate()
    );
    Ok((log.to_csv(), summary))
}
