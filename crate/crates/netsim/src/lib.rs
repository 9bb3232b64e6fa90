//! Discrete-event simulation of ambient-IoT inventory: harvesting devices of
//! categories A/B/C, the four reader topologies and query/response rounds.

pub mod energy;
pub mod events;
pub mod inventory;
pub mod sweep;
pub mod topology;

pub use energy::{charge_delay, harvested_power, ChargeDelay, DeviceCategory, DeviceState, Harvester};
pub use events::EventQueue;
pub use inventory::{
    run_inventory, run_inventory_round, Inventory, InventoryLog, RoundConfig, RoundRecord, LOG_HEADER,
};
pub use sweep::{range_sweep, sweep_csv, SweepMetric, SweepRow, SWEEP_HEADER};
pub use topology::{
    CarrierSource, Device, LinkKind, LinkLabel, Node, NodeRole, RadioParams, Route, TopologyKind, TopologyScene,
};

use thiserror::Error;

use aiot_core::channel::ChannelError;
use aiot_core::link::LinkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetsimError {
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Link(#[from] LinkError),
}
