//! Harvester and energy-store model of the three device categories.

use serde::{Deserialize, Serialize};

use aiot_core::scalar::dbm_to_mw;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeviceCategory {
    /// No storage, pure backscatter; works only while the incident power
    /// covers its consumption.
    A,
    /// Stores energy, backscatters through a reflection amplifier.
    B,
    /// Stores energy in a leaky capacitor and transmits actively.
    C,
}

impl std::fmt::Display for DeviceCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
        };
        f.write_str(s)
    }
}

/// Threshold-then-linear RF-to-DC conversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Harvester {
    pub sensitivity_dbm: f64,
    pub efficiency: f64,
}

impl Default for Harvester {
    fn default() -> Self {
        Self { sensitivity_dbm: -20.0, efficiency: 0.3 }
    }
}

impl Harvester {
    /// DC power in μW for `incident_dbm` at the device antenna.
    pub fn harvested_power(&self, incident_dbm: f64) -> f64 {
        if incident_dbm < self.sensitivity_dbm {
            0.0
        } else {
            self.efficiency * dbm_to_mw(incident_dbm) * 1000.0
        }
    }
}

/// DC power in μW harvested by the default harvester.
pub fn harvested_power(incident_dbm: f64) -> f64 {
    Harvester::default().harvested_power(incident_dbm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceState {
    pub category: DeviceCategory,
    /// μJ.
    pub energy_store: f64,
    /// μJ.
    pub storage_capacity: f64,
    /// μJ debited per response.
    pub activation_energy: f64,
    /// μW drained continuously from the store.
    pub self_discharge: f64,
    /// μW a category-A device draws while responding.
    pub operating_power: f64,
    /// Reflection amplifier gain, linear amplitude (category B).
    pub amplifier_gain: f64,
    /// Transmit power of a category-C device, dBm.
    pub active_tx_power_dbm: Option<f64>,
}

impl DeviceState {
    pub fn category_a() -> Self {
        Self {
            category: DeviceCategory::A,
            energy_store: 0.0,
            storage_capacity: 0.0,
            activation_energy: 0.0,
            self_discharge: 0.0,
            operating_power: 10.0,
            amplifier_gain: 1.0,
            active_tx_power_dbm: None,
        }
    }

    pub fn category_b() -> Self {
        Self {
            category: DeviceCategory::B,
            energy_store: 0.0,
            storage_capacity: 200.0,
            activation_energy: 50.0,
            self_discharge: 0.0,
            operating_power: 0.0,
            amplifier_gain: 2.0,
            active_tx_power_dbm: None,
        }
    }

    pub fn category_c() -> Self {
        Self {
            category: DeviceCategory::C,
            energy_store: 0.0,
            storage_capacity: 500.0,
            activation_energy: 50.0,
            self_discharge: 1.0,
            operating_power: 0.0,
            amplifier_gain: 1.0,
            active_tx_power_dbm: Some(-10.0),
        }
    }

    pub fn for_category(category: DeviceCategory) -> Self {
        match category {
            DeviceCategory::A => Self::category_a(),
            DeviceCategory::B => Self::category_b(),
            DeviceCategory::C => Self::category_c(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let nonneg = [
            ("energy_store", self.energy_store),
            ("storage_capacity", self.storage_capacity),
            ("activation_energy", self.activation_energy),
            ("self_discharge", self.self_discharge),
            ("operating_power", self.operating_power),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(format!("{name} must be finite and ≥ 0, got {v}"));
            }
        }
        if self.energy_store > self.storage_capacity {
            return Err(format!(
                "energy_store {} μJ exceeds capacity {} μJ",
                self.energy_store, self.storage_capacity
            ));
        }
        match self.category {
            DeviceCategory::A if self.storage_capacity != 0.0 => {
                return Err("category A devices have no energy storage".into())
            }
            DeviceCategory::B if !(self.amplifier_gain >= 1.0) => {
                return Err(format!("amplifier gain {} must be ≥ 1", self.amplifier_gain))
            }
            DeviceCategory::C if self.active_tx_power_dbm.is_none() => {
                return Err("category C devices need an active transmit power".into())
            }
            _ => {}
        }
        if self.category != DeviceCategory::B && self.amplifier_gain != 1.0 {
            return Err("only category B devices carry a reflection amplifier".into());
        }
        Ok(())
    }

    /// Gain applied to the reflected path.
    pub fn reflection_gain(&self) -> f64 {
        match self.category {
            DeviceCategory::B => self.amplifier_gain,
            _ => 1.0,
        }
    }

    /// Integrates `harvest − self_discharge` over `seconds`, clamped to the store.
    pub fn charge_for(&mut self, harvest_uw: f64, seconds: f64) {
        let net = harvest_uw - self.self_discharge;
        self.energy_store = (self.energy_store + net * seconds).clamp(0.0, self.storage_capacity);
    }

    /// Debits one response. Returns false, leaving the store intact, when
    /// the store cannot cover it.
    pub fn debit(&mut self) -> bool {
        if self.energy_store + 1e-9 < self.activation_energy {
            return false;
        }
        self.energy_store = (self.energy_store - self.activation_energy).max(0.0);
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChargeDelay {
    Seconds(f64),
    Never,
}

impl ChargeDelay {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            Self::Seconds(s) => Some(*s),
            Self::Never => None,
        }
    }
}

impl std::fmt::Display for ChargeDelay {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Seconds(s) => write!(f, "{s:.6}"),
            Self::Never => f.write_str("never"),
        }
    }
}

/// Time until the device can afford a response while harvesting `harvest_uw`.
pub fn charge_delay(device: &DeviceState, harvest_uw: f64) -> ChargeDelay {
    match device.category {
        DeviceCategory::A => {
            if harvest_uw > 0.0 && harvest_uw >= device.operating_power {
                ChargeDelay::Seconds(0.0)
            } else {
                ChargeDelay::Never
            }
        }
        DeviceCategory::B | DeviceCategory::C => {
            if device.energy_store >= device.activation_energy {
                return ChargeDelay::Seconds(0.0);
            }
            if device.activation_energy > device.storage_capacity {
                return ChargeDelay::Never;
            }
            let net = harvest_uw - device.self_discharge;
            if net <= 0.0 {
                ChargeDelay::Never
            } else {
                ChargeDelay::Seconds((device.activation_energy - device.energy_store) / net)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harvester_curve() {
        assert_eq!(harvested_power(-30.0), 0.0);
        assert!((harvested_power(-10.0) - 30.0).abs() < 1e-9);
        assert!((harvested_power(-20.0) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn charge_delays() {
        let mut d = DeviceState::category_b();
        d.self_discharge = 0.0;
        assert_eq!(charge_delay(&d, 10.0), ChargeDelay::Seconds(5.0));
        let mut c = DeviceState::category_c();
        c.self_discharge = 5.0;
        assert_eq!(charge_delay(&c, 2.0), ChargeDelay::Never);
        c.energy_store = 60.0;
        assert_eq!(charge_delay(&c, 2.0), ChargeDelay::Seconds(0.0));
    }

    #[test]
    fn category_a_needs_live_power() {
        let a = DeviceState::category_a();
        assert_eq!(charge_delay(&a, 0.0), ChargeDelay::Never);
        assert_eq!(charge_delay(&a, 5.0), ChargeDelay::Never);
        assert_eq!(charge_delay(&a, 10.0), ChargeDelay::Seconds(0.0));
    }

    #[test]
    fn store_stays_in_bounds() {
        let mut b = DeviceState::category_b();
        b.charge_for(100.0, 10.0);
        assert_eq!(b.energy_store, b.storage_capacity);
        assert!(b.debit());
        assert_eq!(b.energy_store, 150.0);
        let mut c = DeviceState::category_c();
        c.charge_for(0.0, 1e6);
        assert_eq!(c.energy_store, 0.0);
        assert!(!c.debit());
    }

    #[test]
    fn validation() {
        for c in [DeviceCategory::A, DeviceCategory::B, DeviceCategory::C] {
            DeviceState::for_category(c).validate().unwrap();
        }
        let mut a = DeviceState::category_a();
        a.storage_capacity = 1.0;
        assert!(a.validate().is_err());
        let mut b = DeviceState::category_b();
        b.energy_store = 1e3;
        assert!(b.validate().is_err());
    }
}
