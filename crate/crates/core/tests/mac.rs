use aiot_core::mac::{
    cbma_despread, cbma_spread, cbma_superpose, fdma_assign, fdma_shift, power_control_weights, tdma_schedule,
    MacError, SpreadingSet,
};
use aiot_core::phy::GammaWaveform;
use aiot_core::rng::{add_awgn, random_bits, stream};
use aiot_core::rxchain::freq_shift_filter;
use aiot_core::stats::ErrorCount;
use aiot_core::{Complex64, Samples};

fn cbma_errors(gains: &[Complex64], offsets: &[usize], power_control: bool, noise: f64, seed: u64) -> Vec<ErrorCount> {
    let set = SpreadingSet::walsh(4, gains.len()).unwrap();
    let w = if power_control { power_control_weights(gains) } else { vec![1.0; gains.len()] };
    let eff: Vec<_> = gains.iter().zip(&w).map(|(g, w)| g * w).collect();
    let mut rng = stream(seed, 0);
    let bits: Vec<_> = gains.iter().map(|_| random_bits(&mut rng, 20_000)).collect();
    let streams: Vec<_> = bits.iter().enumerate().map(|(k, b)| cbma_spread::<f64>(b, set.sequence(k))).collect();
    let mut rx = cbma_superpose(&streams, &eff, offsets).unwrap();
    add_awgn(&mut rx, noise, &mut rng);
    let got = cbma_despread(&rx, &set, &eff).unwrap();
    bits.iter().zip(&got).map(|(s, r)| ErrorCount::compare(s, r)).collect()
}

#[test]
fn chip_misalignment_breaks_orthogonality() {
    let g = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
    // Per-chip noise for a 10 dB bit SNR with four chips per bit.
    let noise = 4.0 / 10.0;
    let aligned = cbma_errors(&g, &[0, 0], false, noise, 1);
    let skewed = cbma_errors(&g, &[0, 1], false, noise, 1);
    assert!(aligned.iter().all(|c| c.errors <= 2), "{aligned:?}");
    let skewed_errors: u64 = skewed.iter().map(|c| c.errors).sum();
    assert!(skewed_errors > 0);
}

#[test]
fn power_control_rescues_weak_device_under_misalignment() {
    let g = [Complex64::new(1.0, 0.0), Complex64::new(0.06, 0.08)];
    // Bit SNR 10 dB for the weak (−20 dB) device.
    let noise = 4.0 * 0.01 / 10.0;
    let without = cbma_errors(&g, &[1, 0], false, noise, 2);
    let with = cbma_errors(&g, &[1, 0], true, noise, 2);
    assert!(with[1].ber() < without[1].ber() / 2.0, "{} vs {}", with[1].ber(), without[1].ber());
}

#[test]
fn fdma_neighbours_leak_below_forty_db() {
    let fs = 1e6;
    let n = 20_000;
    let sched = fdma_assign(2, &[100e3, 200e3]).unwrap();
    let tone = |k: usize| {
        let base = GammaWaveform::constant(Complex64::new(1.0, 0.0), n);
        Samples::new(fdma_shift(&base, sched.frequency_of(k).unwrap(), fs).0, fs)
    };
    let power = |x: &Samples| x.as_slice()[128..].iter().map(|v| v.norm_sqr()).sum::<f64>() / (n - 128) as f64;
    for (own, other) in [(0, 1), (1, 0)] {
        let f = sched.frequency_of(own).unwrap();
        let wanted = power(&freq_shift_filter(&tone(own), f, 20e3, fs).unwrap());
        let leak = power(&freq_shift_filter(&tone(other), f, 20e3, fs).unwrap());
        let db = 10.0 * (leak / wanted).log10();
        assert!(db <= -40.0, "device {own}: leakage {db:.1} dB");
    }
}

#[test]
fn fdma_needs_enough_frequencies() {
    assert!(matches!(
        fdma_assign(3, &[1e5, 2e5]),
        Err(MacError::InsufficientFrequencies { devices: 3, available: 2 })
    ));
}

#[test]
fn tdma_serves_each_device_once_per_cycle() {
    let s = tdma_schedule(7, 3).unwrap();
    let mut served: Vec<usize> = (0..s.cycle_length).flat_map(|f| s.served_in(f)).map(|a| a.device).collect();
    served.sort();
    assert_eq!(served, (0..7).collect::<Vec<_>>());
}
