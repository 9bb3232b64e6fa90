//! Monte-Carlo checks against closed-form references.

use aiot_core::channel::LinkRealization;
use aiot_core::link::{simulate_frame, Csi, LinkSetup, RxOptions, Timing};
use aiot_core::phy::{Modulation, ModulationScheme};
use aiot_core::rng::stream;
use aiot_core::stats::{q_function, wilson_interval, ErrorCount, Z95};
use aiot_core::Complex64;
use rand::Rng;

fn run_link(modulation: Modulation, snr_db: f64, frames: u64, opts: RxOptions, seed: u64) -> (ErrorCount, usize) {
    let scheme = ModulationScheme::new(modulation, 1e6, 4).unwrap();
    let setup = LinkSetup::<f64>::new(scheme);
    let carrier = Complex64::new(1.0, 0.0);
    let mut link = LinkRealization::<f64>::unit();
    link.h_forward = Complex64::from_polar(0.3, 0.7);
    link.h_back = Complex64::from_polar(0.2, -2.1);
    link.noise_power = setup.noise_for_symbol_snr(&link, carrier, snr_db).unwrap();
    let mut total = ErrorCount::default();
    let mut delivered = 0;
    for f in 0..frames {
        let out = simulate_frame(&setup, &link, carrier, &opts, &mut stream(seed, f)).unwrap();
        total += out.errors;
        delivered += out.delivered as usize;
    }
    (total, delivered)
}

fn within_sigmas(count: &ErrorCount, p: f64, k: f64) -> bool {
    let sigma = (p * (1.0 - p) / count.bits as f64).sqrt();
    (count.ber() - p).abs() <= k * sigma
}

#[test]
fn gray_qpsk_matches_q_of_root_es_n0() {
    let genie = RxOptions { timing: Timing::Genie, csi: Csi::Perfect, phase_tracking_gain: None };
    for snr_db in [4.0, 8.0] {
        let gamma = 10f64.powf(snr_db / 10.0);
        let (count, _) = run_link(Modulation::Qpsk, snr_db, 200, genie, 31);
        let p = q_function(gamma.sqrt());
        assert!(within_sigmas(&count, p, 4.0), "{snr_db} dB: {} vs {p}", count.ber());
    }
}

#[test]
fn bpsk_matches_q_of_root_two_es_n0() {
    let genie = RxOptions { timing: Timing::Genie, csi: Csi::Perfect, phase_tracking_gain: None };
    let (count, _) = run_link(Modulation::Bpsk, 3.0, 200, genie, 32);
    let p = q_function((2.0 * 10f64.powf(0.3)).sqrt());
    assert!(within_sigmas(&count, p, 4.0), "{} vs {p}", count.ber());
}

#[test]
fn correlator_with_estimated_csi_delivers_at_high_snr() {
    for m in [Modulation::Ook, Modulation::Bpsk, Modulation::Qpsk] {
        let (count, delivered) = run_link(m, 16.0, 50, RxOptions::default(), 33);
        assert_eq!(delivered, 50, "{m:?}: {delivered}/50 delivered, BER {}", count.ber());
    }
}

#[test]
fn estimated_csi_costs_little_over_perfect() {
    let perfect = RxOptions { timing: Timing::Genie, csi: Csi::Perfect, phase_tracking_gain: None };
    let estimated = RxOptions { timing: Timing::Genie, csi: Csi::Estimated, phase_tracking_gain: None };
    let (a, _) = run_link(Modulation::Bpsk, 4.0, 200, perfect, 34);
    let (b, _) = run_link(Modulation::Bpsk, 4.0, 200, estimated, 34);
    assert!(b.ber() >= a.ber() * 0.8 && b.ber() <= a.ber() * 2.0, "{} vs {}", b.ber(), a.ber());
}

/// Exact coverage of the Wilson interval under Binomial(n, p).
fn exact_coverage(p: f64, n: u64) -> f64 {
    let mut log_pmf = n as f64 * (1.0 - p).ln();
    let mut cov = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_pmf += ((n - k + 1) as f64 / k as f64).ln() + (p / (1.0 - p)).ln();
        }
        let (lo, hi) = wilson_interval(k, n, Z95);
        if lo <= p && p <= hi {
            cov += log_pmf.exp();
        }
    }
    cov
}

#[test]
fn wilson_interval_covers_true_rate() {
    for &(p, n) in &[(0.01, 2000u64), (0.2, 300), (0.05, 400)] {
        let exact = exact_coverage(p, n);
        assert!(exact >= 0.93, "p={p} n={n}: exact coverage {exact}");
        let reps = 2000u64;
        let mut covered = 0;
        for r in 0..reps {
            let mut rng = stream(41, r);
            let errors = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
            let (lo, hi) = wilson_interval(errors, n, Z95);
            covered += (lo <= p && p <= hi) as u64;
        }
        let empirical = covered as f64 / reps as f64;
        let sigma = (exact * (1.0 - exact) / reps as f64).sqrt();
        assert!((empirical - exact).abs() <= 4.0 * sigma, "p={p} n={n}: {empirical} vs exact {exact}");
    }
}
