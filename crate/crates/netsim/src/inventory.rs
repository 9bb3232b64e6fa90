//! Query/response inventory rounds driven by an event queue.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use aiot_core::channel::{realize_link, Geometry, Impairments, LinkBudget};
use aiot_core::framing::FRAME_BITS;
use aiot_core::link::{simulate_frame, FrameOutcome, LinkSetup, RxOptions};
use aiot_core::mac::{AccessKind, Schedule};
use aiot_core::phy::{Modulation, ModulationScheme};
use aiot_core::rng::{stream, sub_seed};
use aiot_core::scalar::dbm_to_mw;
use aiot_core::channel::{friis_loss_db, THERMAL_NOISE_DBM_HZ};

use crate::energy::{charge_delay, ChargeDelay, DeviceCategory, DeviceState, Harvester};
use crate::events::EventQueue;
use crate::topology::{distance, Route, TopologyScene};
use crate::NetsimError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundConfig {
    pub scheme: ModulationScheme,
    pub rx: RxOptions,
    pub harvester: Harvester,
    pub impairments: Impairments,
    /// Reader query duration, s.
    pub query_s: f64,
    /// Longest a slot waits for a device to charge, s.
    pub max_charge_s: f64,
}

impl Default for RoundConfig {
    fn default() -> Self {
        Self {
            scheme: ModulationScheme::new(Modulation::Bpsk, 1e6, 8).expect("valid default scheme"),
            rx: RxOptions::default(),
            harvester: Harvester::default(),
            impairments: Impairments::default(),
            query_s: 1e-3,
            max_charge_s: 10.0,
        }
    }
}

impl RoundConfig {
    pub fn airtime_s(&self) -> f64 {
        FRAME_BITS as f64 / self.scheme.bit_rate()
    }

    pub fn slot_s(&self) -> f64 {
        self.query_s + self.max_charge_s + self.airtime_s()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub device: usize,
    pub category: DeviceCategory,
    pub frame: usize,
    pub slot: usize,
    pub downlink: String,
    pub uplink: String,
    pub relay: Option<String>,
    pub incident_dbm: f64,
    pub harvest_uw: f64,
    #[serde(skip)]
    pub charge_delay: Option<ChargeDelay>,
    pub success: bool,
    pub end_to_end_delay_s: Option<f64>,
    /// Per-symbol SNR estimated by the device-link receiver.
    pub ua_snr_db: Option<f64>,
    /// Budget SNR of the forwarding hop.
    pub uu_snr_db: Option<f64>,
    /// Store after the round, μJ.
    pub energy_uj: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InventoryLog {
    pub records: Vec<RoundRecord>,
}

pub const LOG_HEADER: &str = "round,device,category,frame,slot,downlink,uplink,relay,incident_dbm,harvest_uw,charge_delay_s,success,end_to_end_delay_s,ua_snr_db,uu_snr_db,energy_uj";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl InventoryLog {
    pub fn success_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.success).count() as f64 / self.records.len() as f64
    }

    pub fn successes(&self) -> usize {
        self.records.iter().filter(|r| r.success).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(LOG_HEADER);
        s.push('\n');
        for r in &self.records {
            let cd = match r.charge_delay {
                Some(c) => c.to_string(),
                None => String::new(),
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.6},{:.6},{},{},{},{},{},{:.6}\n",
                r.round,
                r.device,
                r.category,
                r.frame,
                r.slot,
                r.downlink,
                r.uplink,
                r.relay.as_deref().unwrap_or(""),
                r.incident_dbm,
                r.harvest_uw,
                cd,
                r.success,
                opt(r.end_to_end_delay_s),
                opt(r.ua_snr_db),
                opt(r.uu_snr_db),
                r.energy_uj,
            ));
        }
        s
    }
}

/// Link budget of the backscatter link of device index `d`.
pub fn device_budget(scene: &TopologyScene, route: &Route, d: usize, sample_rate_hz: f64) -> LinkBudget {
    let dev = scene.devices[d].position;
    let rx = &scene.nodes[route.uplink];
    let src = &route.carrier;
    let d_src_rx = distance(src.position, rx.position);
    let geometry = if d_src_rx == 0.0 {
        Geometry::Monostatic
    } else {
        Geometry::Bistatic { source_receiver_m: d_src_rx, device_receiver_m: distance(dev, rx.position) }
    };
    let r = &scene.radio;
    LinkBudget {
        tx_power_dbm: src.tx_power_dbm,
        tx_antenna_gain_dbi: src.antenna_gain_dbi,
        rx_antenna_gain_dbi: rx.antenna_gain_dbi,
        device_antenna_gain_dbi: r.device_antenna_gain_dbi,
        carrier_frequency_hz: r.carrier_frequency_hz,
        distance_m: distance(src.position, dev),
        path_loss_exponent: r.path_loss_exponent,
        circulator_isolation_db: r.circulator_isolation_db,
        circulator_insertion_loss_db: r.circulator_insertion_loss_db,
        noise_figure_db: r.noise_figure_db,
        sample_rate_hz,
        geometry,
    }
}

/// One PHY-level frame exchange for device index `d` in forced state `state`.
pub fn attempt_frame(
    scene: &TopologyScene,
    route: &Route,
    d: usize,
    state: &DeviceState,
    cfg: &RoundConfig,
    seed: u64,
) -> Result<FrameOutcome, NetsimError> {
    let budget = device_budget(scene, route, d, cfg.scheme.sample_rate());
    let mut link = realize_link::<f64>(&budget, scene.radio.fading, seed)?;
    let carrier = Complex::new(budget.carrier_amplitude(), 0.0);
    let mut setup = LinkSetup::<f64>::new(cfg.scheme);
    setup.amplifier_gain = state.reflection_gain();
    setup.impairments = cfg.impairments;
    if let (DeviceCategory::C, Some(p)) = (state.category, state.active_tx_power_dbm) {
        // An active device emits its own signal: replace carrier × forward
        // hop by the device's transmit amplitude, keeping the hop phase.
        let phase = if link.h_forward.norm() > 0.0 { link.h_forward / link.h_forward.norm() } else { Complex::new(1.0, 0.0) };
        link.h_forward = phase * (dbm_to_mw(p).sqrt() / carrier.re);
    }
    let mut rng = stream(seed, 1);
    Ok(simulate_frame(&setup, &link, carrier, &cfg.rx, &mut rng)?)
}

fn uu_snr_db(scene: &TopologyScene, from: usize, to: usize, sample_rate_hz: f64) -> f64 {
    let a = &scene.nodes[from];
    let b = &scene.nodes[to];
    let d = distance(a.position, b.position).max(1.0);
    let pl = friis_loss_db(scene.radio.carrier_frequency_hz, 1.0) + 10.0 * scene.radio.path_loss_exponent * d.log10();
    let noise = THERMAL_NOISE_DBM_HZ + scene.radio.noise_figure_db + 10.0 * sample_rate_hz.log10();
    scene.effective_tx_power(from) + a.antenna_gain_dbi + b.antenna_gain_dbi - pl + scene.relay_hop_gain_db - noise
}

#[derive(Debug)]
enum Event {
    Query(usize),
    Ready(usize),
    Timeout(usize),
    Received(usize),
    Forwarded(usize),
}

struct Pending {
    record: RoundRecord,
    start: f64,
    charge_s: f64,
}

/// Stateful run over consecutive rounds; device stores persist between rounds.
#[derive(Clone, Debug)]
pub struct Inventory {
    scene: TopologyScene,
    schedule: Schedule,
    cfg: RoundConfig,
    states: Vec<DeviceState>,
    routes: Vec<Route>,
}

impl Inventory {
    pub fn new(scene: TopologyScene, schedule: Schedule, cfg: RoundConfig) -> Result<Self, NetsimError> {
        scene.validate()?;
        if schedule.num_devices() != scene.devices.len() {
            return Err(NetsimError::InvalidScene(format!(
                "schedule covers {} devices, scene has {}",
                schedule.num_devices(),
                scene.devices.len()
            )));
        }
        if cfg.query_s < 0.0 || !(cfg.max_charge_s >= 0.0) {
            return Err(NetsimError::InvalidScene("query and charge windows must be non-negative".into()));
        }
        let routes = (0..scene.devices.len()).map(|d| scene.route(d)).collect::<Result<_, _>>()?;
        let states = scene.devices.iter().map(|d| d.state).collect();
        Ok(Self { scene, schedule, cfg, states, routes })
    }

    pub fn states(&self) -> &[DeviceState] {
        &self.states
    }

    /// Runs round `round`; one record per device in completion order.
    pub fn run_round(&mut self, round: usize, seed: u64) -> Result<InventoryLog, NetsimError> {
        let round_seed = sub_seed(seed, round as u64);
        let slot_s = self.cfg.slot_s();
        let frames = self.schedule.cycle_length.max(1);
        let frame_s = slot_s * (self.schedule.frame_length.max(1) + 1) as f64;
        let round_start = round as f64 * frame_s * frames as f64;
        let mut queue = EventQueue::new();
        let mut pending: Vec<Option<Pending>> = (0..self.scene.devices.len()).map(|_| None).collect();
        let mut log = InventoryLog::default();

        for frame in 0..frames {
            for a in self.schedule.served_in(frame) {
                let slot = match self.schedule.kind {
                    AccessKind::Tdma => a.index,
                    AccessKind::Fdma => 0,
                };
                let d = self.scene.devices.iter().position(|x| x.id == a.device).ok_or_else(|| {
                    NetsimError::InvalidScene(format!("schedule names unknown device {}", a.device))
                })?;
                let t0 = round_start + frame as f64 * frame_s + slot as f64 * slot_s;
                let route = &self.routes[d];
                let record = RoundRecord {
                    round,
                    device: a.device,
                    category: self.states[d].category,
                    frame,
                    slot,
                    downlink: self.scene.nodes[route.downlink].name.clone(),
                    uplink: self.scene.nodes[route.uplink].name.clone(),
                    relay: route.relay_to.map(|i| self.scene.nodes[i].name.clone()),
                    incident_dbm: 0.0,
                    harvest_uw: 0.0,
                    charge_delay: None,
                    success: false,
                    end_to_end_delay_s: None,
                    ua_snr_db: None,
                    uu_snr_db: None,
                    energy_uj: 0.0,
                };
                pending[d] = Some(Pending { record, start: t0, charge_s: 0.0 });
                queue.schedule(t0, Event::Query(d));
            }
        }

        while let Some((now, ev)) = queue.pop() {
            match ev {
                Event::Query(d) => {
                    let route = &self.routes[d];
                    let budget = device_budget(&self.scene, route, d, self.cfg.scheme.sample_rate());
                    let incident = budget.incident_power_dbm()?;
                    let harvest = self.cfg.harvester.harvested_power(incident);
                    let cd = charge_delay(&self.states[d], harvest);
                    let p = pending[d].as_mut().expect("queried device is pending");
                    p.record.incident_dbm = incident;
                    p.record.harvest_uw = harvest;
                    p.record.charge_delay = Some(cd);
                    match cd {
                        ChargeDelay::Seconds(s) if s <= self.cfg.max_charge_s => {
                            p.charge_s = s;
                            queue.schedule(now + self.cfg.query_s + s, Event::Ready(d));
                        }
                        _ => {
                            p.charge_s = self.cfg.max_charge_s;
                            queue.schedule(now + self.cfg.query_s + self.cfg.max_charge_s, Event::Timeout(d));
                        }
                    }
                }
                Event::Timeout(d) => {
                    let mut p = pending[d].take().expect("timed-out device is pending");
                    if self.states[d].category != DeviceCategory::A {
                        self.states[d].charge_for(p.record.harvest_uw, p.charge_s);
                    }
                    p.record.energy_uj = self.states[d].energy_store;
                    log.records.push(p.record);
                }
                Event::Ready(d) => {
                    let p = pending[d].as_mut().expect("ready device is pending");
                    if self.states[d].category != DeviceCategory::A {
                        self.states[d].charge_for(p.record.harvest_uw, p.charge_s);
                        if !self.states[d].debit() {
                            // Floating-point shortfall after charging exactly to the threshold.
                            self.states[d].energy_store = self.states[d].activation_energy;
                            self.states[d].debit();
                        }
                    }
                    let id = self.scene.devices[d].id as u64;
                    let outcome = attempt_frame(
                        &self.scene,
                        &self.routes[d],
                        d,
                        &self.states[d],
                        &self.cfg,
                        sub_seed(round_seed, id),
                    )?;
                    let sps = self.cfg.scheme.samples_per_symbol as f64;
                    p.record.ua_snr_db = outcome.snr.map(|s| 10.0 * (s.gamma * sps).log10());
                    p.record.success = outcome.synced && outcome.crc_ok && outcome.delivered;
                    queue.schedule(now + self.cfg.airtime_s(), Event::Received(d));
                }
                Event::Received(d) => {
                    let route = self.routes[d].clone();
                    let p = pending[d].as_mut().expect("received device is pending");
                    if let (Some(bs), true) = (route.relay_to, p.record.success) {
                        p.record.uu_snr_db = Some(uu_snr_db(&self.scene, route.uplink, bs, self.cfg.scheme.sample_rate()));
                        queue.schedule(now + slot_s, Event::Forwarded(d));
                    } else {
                        let mut p = pending[d].take().expect("received device is pending");
                        if p.record.success {
                            p.record.end_to_end_delay_s = Some(now - p.start);
                        }
                        p.record.energy_uj = self.states[d].energy_store;
                        log.records.push(p.record);
                    }
                }
                Event::Forwarded(d) => {
                    let mut p = pending[d].take().expect("forwarded device is pending");
                    p.record.end_to_end_delay_s = Some(now - p.start);
                    p.record.energy_uj = self.states[d].energy_store;
                    log.records.push(p.record);
                }
            }
        }
        Ok(log)
    }

    pub fn run(&mut self, rounds: usize, seed: u64) -> Result<InventoryLog, NetsimError> {
        let mut log = InventoryLog::default();
        for r in 0..rounds {
            log.records.extend(self.run_round(r, seed)?.records);
        }
        Ok(log)
    }
}

/// A single round from the scene's configured device states.
pub fn run_inventory_round(
    scene: &TopologyScene,
    schedule: &Schedule,
    cfg: &RoundConfig,
    seed: u64,
) -> Result<InventoryLog, NetsimError> {
    Inventory::new(scene.clone(), schedule.clone(), *cfg)?.run_round(0, seed)
}

/// `rounds` consecutive rounds with energy carried between them.
pub fn run_inventory(
    scene: &TopologyScene,
    schedule: &Schedule,
    cfg: &RoundConfig,
    seed: u64,
    rounds: usize,
) -> Result<InventoryLog, NetsimError> {
    Inventory::new(scene.clone(), schedule.clone(), *cfg)?.run(rounds, seed)
}
