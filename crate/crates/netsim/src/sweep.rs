//! Metric-versus-distance sweeps.

use serde::{Deserialize, Serialize};

use aiot_core::mac::tdma_schedule;
use aiot_core::rng::sub_seed;
use aiot_core::stats::ErrorCount;

use crate::inventory::{attempt_frame, run_inventory, RoundConfig};
use crate::topology::TopologyScene;
use crate::NetsimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMetric {
    /// Link BER of device 0, energy constraints ignored.
    Ber,
    /// Inventory success rate of device 0, energy included.
    SuccessRate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub distance_m: f64,
    /// Mean per-symbol SNR estimate in dB (mean taken on the linear scale).
    /// `None` when no trial produced an estimate.
    pub mean_snr_db: Option<f64>,
    pub metric: f64,
    pub trials: usize,
}

pub const SWEEP_HEADER: &str = "distance_m,mean_snr_db,metric,trials";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let snr = r.mean_snr_db.map(|x| format!("{x:.6}")).unwrap_or_default();
        s.push_str(&format!("{:.6},{snr},{:.9},{}\n", r.distance_m, r.metric, r.trials));
    }
    s
}

/// Moves device 0 to `d` metres from its query node along +x and measures
/// `metric` over `trials` seeded trials. Trial seeds are shared across
/// distances.
pub fn range_sweep(
    template: &TopologyScene,
    distances: &[f64],
    metric: SweepMetric,
    cfg: &RoundConfig,
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, NetsimError> {
    if distances.is_empty() || trials == 0 {
        return Err(NetsimError::InvalidScene("sweep needs at least one distance and one trial".into()));
    }
    let mut scene = template.clone();
    scene.devices.truncate(1);
    scene.validate()?;
    let origin = scene.nodes[scene.route(0)?.downlink].position;
    let sps = cfg.scheme.samples_per_symbol as f64;
    let mut rows = Vec::with_capacity(distances.len());
    for &d in distances {
        scene.devices[0].position = [origin[0] + d, origin[1]];
        scene.validate()?;
        let route = scene.route(0)?;
        let mut snr_sum = 0.0;
        let mut snr_n = 0usize;
        let value = match metric {
            SweepMetric::Ber => {
                let mut count = ErrorCount::default();
                for t in 0..trials {
                    let o = attempt_frame(&scene, &route, 0, &scene.devices[0].state, cfg, sub_seed(seed, t as u64))?;
                    count += o.errors;
                    if let Some(s) = o.snr {
                        snr_sum += s.gamma * sps;
                        snr_n += 1;
                    }
                }
                count.ber()
            }
            SweepMetric::SuccessRate => {
                let schedule = tdma_schedule(1, 1).expect("one device, one slot");
                let log = run_inventory(&scene, &schedule, cfg, seed, trials)?;
                for r in &log.records {
                    if let Some(db) = r.ua_snr_db {
                        snr_sum += 10f64.powf(db / 10.0);
                        snr_n += 1;
                    }
                }
                log.success_rate()
            }
        };
        let mean_snr_db = (snr_n > 0).then(|| 10.0 * (snr_sum / snr_n as f64).log10());
        rows.push(SweepRow { distance_m: d, mean_snr_db, metric: value, trials });
    }
    Ok(rows)
}
