//! Network topologies and per-device routing.

use serde::{Deserialize, Serialize};

use aiot_core::channel::{Fading, LinkBudget};

use crate::energy::DeviceState;
use crate::NetsimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TopologyKind {
    /// Base station reads the device directly.
    Direct,
    /// An intermediate node reads the device and forwards to the base station.
    Relayed,
    /// Downlink and uplink terminate at different nodes.
    Assisted,
    /// A user terminal reads the device without base-station involvement.
    UserTerminal,
}

impl TopologyKind {
    pub fn number(self) -> u8 {
        match self {
            Self::Direct => 1,
            Self::Relayed => 2,
            Self::Assisted => 3,
            Self::UserTerminal => 4,
        }
    }
}

impl TryFrom<u8> for TopologyKind {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Self::Direct),
            2 => Ok(Self::Relayed),
            3 => Ok(Self::Assisted),
            4 => Ok(Self::UserTerminal),
            _ => Err(format!("topology kind must be 1, 2, 3 or 4, got {v}")),
        }
    }
}

impl From<TopologyKind> for u8 {
    fn from(k: TopologyKind) -> u8 {
        k.number()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Bs,
    Intermediate,
    Assisting,
    Ue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub name: String,
    pub role: NodeRole,
    /// Metres, planar.
    pub position: [f64; 2],
    #[serde(default = "default_tx_power")]
    pub tx_power_dbm: f64,
    #[serde(default = "default_node_gain")]
    pub antenna_gain_dbi: f64,
}

fn default_tx_power() -> f64 {
    20.0
}

fn default_node_gain() -> f64 {
    5.0
}

impl Node {
    pub fn new(name: &str, role: NodeRole, position: [f64; 2]) -> Self {
        Self {
            name: name.to_string(),
            role,
            position,
            tx_power_dbm: default_tx_power(),
            antenna_gain_dbi: default_node_gain(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub id: usize,
    pub position: [f64; 2],
    pub state: DeviceState,
}

/// Who illuminates the device in a topology-3 scene.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CarrierSource {
    /// The node sending the query.
    #[default]
    Downlink,
    Node { name: String },
    /// A fixed emitter outside the topology.
    External { position: [f64; 2], tx_power_dbm: f64, antenna_gain_dbi: f64 },
}

/// Propagation and receiver parameters shared by every link in the scene.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    pub carrier_frequency_hz: f64,
    pub path_loss_exponent: f64,
    pub device_antenna_gain_dbi: f64,
    pub circulator_isolation_db: f64,
    pub circulator_insertion_loss_db: f64,
    pub noise_figure_db: f64,
    pub fading: Fading,
}

impl Default for RadioParams {
    fn default() -> Self {
        let b = LinkBudget::default();
        Self {
            carrier_frequency_hz: b.carrier_frequency_hz,
            path_loss_exponent: b.path_loss_exponent,
            device_antenna_gain_dbi: b.device_antenna_gain_dbi,
            circulator_isolation_db: b.circulator_isolation_db,
            circulator_insertion_loss_db: b.circulator_insertion_loss_db,
            noise_figure_db: b.noise_figure_db,
            fading: Fading::None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    /// Node ↔ node.
    Uu,
    /// Node ↔ device.
    Ua,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkLabel {
    pub from: String,
    pub to: String,
    pub kind: LinkKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyScene {
    pub kind: TopologyKind,
    pub nodes: Vec<Node>,
    pub devices: Vec<Device>,
    /// Topology 3: node sending the query (defaults to the base station).
    #[serde(default)]
    pub downlink_node: Option<String>,
    /// Topology 3: node receiving the response (defaults to the assisting node).
    #[serde(default)]
    pub uplink_node: Option<String>,
    #[serde(default)]
    pub carrier_source: CarrierSource,
    /// Transmit power cap in dBm; required for topology 4.
    #[serde(default)]
    pub power_cap_dbm: Option<f64>,
    /// Gain of the node ↔ base-station hop relative to free propagation, dB.
    #[serde(default)]
    pub relay_hop_gain_db: f64,
    #[serde(default)]
    pub radio: RadioParams,
}

/// The illuminating emitter of one device's link.
#[derive(Clone, Debug, PartialEq)]
pub struct Emitter {
    pub name: String,
    pub position: [f64; 2],
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
}

/// How one device's query and response travel.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    /// Node sending the query.
    pub downlink: usize,
    /// Node demodulating the backscatter.
    pub uplink: usize,
    pub carrier: Emitter,
    /// Base station the uplink node forwards to (topology 2).
    pub relay_to: Option<usize>,
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl TopologyScene {
    /// A topology-1 scene: one base station at the origin, devices on the x axis.
    pub fn direct(device_distances: &[f64], state: DeviceState) -> Self {
        Self::single_reader(TopologyKind::Direct, Node::new("bs", NodeRole::Bs, [0.0, 0.0]), device_distances, state, None)
    }

    /// A topology-4 scene: one user terminal at the origin with transmit cap `cap_dbm`.
    pub fn user_terminal(device_distances: &[f64], state: DeviceState, cap_dbm: f64) -> Self {
        Self::single_reader(
            TopologyKind::UserTerminal,
            Node::new("ue", NodeRole::Ue, [0.0, 0.0]),
            device_distances,
            state,
            Some(cap_dbm),
        )
    }

    fn single_reader(
        kind: TopologyKind,
        reader: Node,
        device_distances: &[f64],
        state: DeviceState,
        power_cap_dbm: Option<f64>,
    ) -> Self {
        Self {
            kind,
            nodes: vec![reader],
            devices: device_distances
                .iter()
                .enumerate()
                .map(|(id, &d)| Device { id, position: [d, 0.0], state })
                .collect(),
            downlink_node: None,
            uplink_node: None,
            carrier_source: CarrierSource::Downlink,
            power_cap_dbm,
            relay_hop_gain_db: 0.0,
            radio: RadioParams::default(),
        }
    }

    fn node_index(&self, name: &str) -> Result<usize, NetsimError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| NetsimError::InvalidScene(format!("unknown node '{name}'")))
    }

    fn of_role(&self, role: NodeRole) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].role == role).collect()
    }

    /// Transmit power of node `i` after the regulatory cap.
    pub fn effective_tx_power(&self, i: usize) -> f64 {
        let p = self.nodes[i].tx_power_dbm;
        match self.power_cap_dbm {
            Some(cap) => p.min(cap),
            None => p,
        }
    }

    pub fn validate(&self) -> Result<(), NetsimError> {
        let bad = |m: String| Err(NetsimError::InvalidScene(m));
        if self.devices.is_empty() {
            return bad("scene has no devices".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if self.nodes[..i].iter().any(|m| m.name == n.name) {
                return bad(format!("node name '{}' is not unique", n.name));
            }
            if !n.position.iter().all(|c| c.is_finite()) || !n.tx_power_dbm.is_finite() {
                return bad(format!("node '{}' has a non-finite parameter", n.name));
            }
        }
        for (i, d) in self.devices.iter().enumerate() {
            if self.devices[..i].iter().any(|e| e.id == d.id) {
                return bad(format!("device id {} is not unique", d.id));
            }
            d.state.validate().map_err(|e| NetsimError::InvalidScene(format!("device {}: {e}", d.id)))?;
            for n in &self.nodes {
                if !(distance(n.position, d.position) > 0.0) {
                    return bad(format!("device {} sits on node '{}'", d.id, n.name));
                }
            }
        }
        if let Some(cap) = self.power_cap_dbm {
            if !cap.is_finite() {
                return bad("power cap must be finite".into());
            }
        }
        let bs = self.of_role(NodeRole::Bs);
        let count = |r| self.of_role(r).len();
        match self.kind {
            TopologyKind::Direct => {
                if bs.len() != 1 || self.nodes.len() != 1 {
                    return bad("topology 1 needs exactly one base station and no other nodes".into());
                }
            }
            TopologyKind::Relayed => {
                if bs.len() != 1 || count(NodeRole::Intermediate) == 0 {
                    return bad("topology 2 needs one base station and at least one intermediate node".into());
                }
            }
            TopologyKind::Assisted => {
                if bs.len() != 1 || count(NodeRole::Assisting) == 0 {
                    return bad("topology 3 needs one base station and at least one assisting node".into());
                }
                let (dl, ul) = self.assisted_ends()?;
                if dl == ul {
                    return bad("topology 3 downlink and uplink must terminate at different nodes".into());
                }
                let roles = [self.nodes[dl].role, self.nodes[ul].role];
                if !(roles.contains(&NodeRole::Bs) && roles.contains(&NodeRole::Assisting)) {
                    return bad("topology 3 links one base station with one assisting node".into());
                }
                if let CarrierSource::Node { name } = &self.carrier_source {
                    self.node_index(name)?;
                }
            }
            TopologyKind::UserTerminal => {
                if !bs.is_empty() {
                    return bad("topology 4 has no base station".into());
                }
                if count(NodeRole::Ue) != 1 || self.nodes.len() != 1 {
                    return bad("topology 4 needs exactly one user terminal".into());
                }
                if self.power_cap_dbm.is_none() {
                    return bad("topology 4 needs a transmit power cap".into());
                }
            }
        }
        if self.kind != TopologyKind::Assisted
            && (self.downlink_node.is_some() || self.uplink_node.is_some() || self.carrier_source != CarrierSource::Downlink)
        {
            return bad("downlink/uplink/carrier-source overrides apply to topology 3 only".into());
        }
        Ok(())
    }

    fn assisted_ends(&self) -> Result<(usize, usize), NetsimError> {
        let dl = match &self.downlink_node {
            Some(n) => self.node_index(n)?,
            None => self.of_role(NodeRole::Bs)[0],
        };
        let ul = match &self.uplink_node {
            Some(n) => self.node_index(n)?,
            None => self.of_role(NodeRole::Assisting)[0],
        };
        Ok((dl, ul))
    }

    fn emitter_of(&self, i: usize) -> Emitter {
        let n = &self.nodes[i];
        Emitter {
            name: n.name.clone(),
            position: n.position,
            tx_power_dbm: self.effective_tx_power(i),
            antenna_gain_dbi: n.antenna_gain_dbi,
        }
    }

    fn nearest(&self, candidates: &[usize], p: [f64; 2]) -> usize {
        let mut best = candidates[0];
        for &c in &candidates[1..] {
            if distance(self.nodes[c].position, p) < distance(self.nodes[best].position, p) {
                best = c;
            }
        }
        best
    }

    /// Routing of device index `d` (position in `devices`).
    pub fn route(&self, d: usize) -> Result<Route, NetsimError> {
        let pos = self.devices[d].position;
        match self.kind {
            TopologyKind::Direct | TopologyKind::UserTerminal => {
                Ok(Route { downlink: 0, uplink: 0, carrier: self.emitter_of(0), relay_to: None })
            }
            TopologyKind::Relayed => {
                let relay = self.nearest(&self.of_role(NodeRole::Intermediate), pos);
                Ok(Route {
                    downlink: relay,
                    uplink: relay,
                    carrier: self.emitter_of(relay),
                    relay_to: Some(self.of_role(NodeRole::Bs)[0]),
                })
            }
            TopologyKind::Assisted => {
                let (dl, ul) = self.assisted_ends()?;
                let carrier = match &self.carrier_source {
                    CarrierSource::Downlink => self.emitter_of(dl),
                    CarrierSource::Node { name } => self.emitter_of(self.node_index(name)?),
                    CarrierSource::External { position, tx_power_dbm, antenna_gain_dbi } => Emitter {
                        name: "external".into(),
                        position: *position,
                        tx_power_dbm: match self.power_cap_dbm {
                            Some(c) => tx_power_dbm.min(c),
                            None => *tx_power_dbm,
                        },
                        antenna_gain_dbi: *antenna_gain_dbi,
                    },
                };
                Ok(Route { downlink: dl, uplink: ul, carrier, relay_to: None })
            }
        }
    }

    pub fn links(&self) -> Result<Vec<LinkLabel>, NetsimError> {
        let mut out = Vec::new();
        for (i, d) in self.devices.iter().enumerate() {
            let r = self.route(i)?;
            let dev = format!("device{}", d.id);
            out.push(LinkLabel { from: self.nodes[r.downlink].name.clone(), to: dev.clone(), kind: LinkKind::Ua });
            out.push(LinkLabel { from: dev, to: self.nodes[r.uplink].name.clone(), kind: LinkKind::Ua });
            if let Some(bs) = r.relay_to {
                out.push(LinkLabel {
                    from: self.nodes[r.uplink].name.clone(),
                    to: self.nodes[bs].name.clone(),
                    kind: LinkKind::Uu,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assisted() -> TopologyScene {
        TopologyScene {
            kind: TopologyKind::Assisted,
            nodes: vec![Node::new("bs", NodeRole::Bs, [0.0, 0.0]), Node::new("helper", NodeRole::Assisting, [4.0, 0.0])],
            devices: vec![Device { id: 0, position: [2.0, 1.0], state: DeviceState::category_b() }],
            downlink_node: None,
            uplink_node: None,
            carrier_source: CarrierSource::Downlink,
            power_cap_dbm: None,
            relay_hop_gain_db: 0.0,
            radio: RadioParams::default(),
        }
    }

    #[test]
    fn assisted_routes_split() {
        let s = assisted();
        s.validate().unwrap();
        let r = s.route(0).unwrap();
        assert_ne!(r.downlink, r.uplink);
        let mut rev = s.clone();
        rev.downlink_node = Some("helper".into());
        rev.uplink_node = Some("bs".into());
        rev.validate().unwrap();
        assert_eq!(rev.route(0).unwrap().uplink, 0);
        let mut same = s.clone();
        same.uplink_node = Some("bs".into());
        assert!(same.validate().is_err());
    }

    #[test]
    fn topology_rules() {
        let mut d = TopologyScene::direct(&[1.0], DeviceState::category_b());
        d.validate().unwrap();
        d.nodes.push(Node::new("relay", NodeRole::Intermediate, [1.0, 1.0]));
        assert!(d.validate().is_err());
        let mut ue = TopologyScene::user_terminal(&[1.0], DeviceState::category_b(), 10.0);
        ue.validate().unwrap();
        assert_eq!(ue.effective_tx_power(0), 10.0);
        ue.power_cap_dbm = None;
        assert!(ue.validate().is_err());
    }

    #[test]
    fn relayed_traffic_passes_intermediate() {
        let mut s = TopologyScene::direct(&[3.0], DeviceState::category_b());
        s.kind = TopologyKind::Relayed;
        s.nodes.push(Node::new("relay", NodeRole::Intermediate, [2.0, 0.0]));
        s.validate().unwrap();
        let links = s.links().unwrap();
        assert_eq!(links.len(), 3);
        assert_eq!(links[2].kind, LinkKind::Uu);
        assert!(links.iter().filter(|l| l.kind == LinkKind::Ua).all(|l| l.from == "relay" || l.to == "relay"));
    }

    #[test]
    fn kind_numbers_round_trip() {
        for k in 1..=4u8 {
            assert_eq!(u8::from(TopologyKind::try_from(k).unwrap()), k);
        }
        assert!(TopologyKind::try_from(5).is_err());
    }
}
