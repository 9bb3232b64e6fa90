//! Acceptance suite. Every criterion prints one PASS/FAIL line; the test
//! fails at the end if any criterion failed.
//!
//! Run with `cargo test -p aiot-cli --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex;
use rand::Rng;

use aiot_cli::config::{AccessScheme, ScenarioConfig};
use aiot_cli::experiments::{ber, mac, snr};
use aiot_cli::execute;
use aiot_core::framing::{build_frame, bytes_to_bits, crc16, parse_frame, DEFAULT_PREAMBLE, FRAME_BITS, PAYLOAD_BITS};
use aiot_core::mac::{cbma_despread, cbma_spread, cbma_superpose, collisions, tdma_schedule, SpreadingSet};
use aiot_core::phy::Modulation;
use aiot_core::rng::{add_awgn, random_bits, stream};
use aiot_core::rxchain::{decode_without_cancellation, freq_shift_filter, sic_decode, BackscatterFormat, SicCsi};
use aiot_core::scalar::phasor;
use aiot_core::signal::ComplexSamples;
use aiot_core::stats::{bpsk_ber, ErrorCount};
use aiot_netsim::{run_inventory, ChargeDelay, DeviceState, RoundConfig, TopologyScene};

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn check(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(name);
        }
    }
}

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&config_dir().join(name), &[]).unwrap()
}

fn bpsk_oracle(r: &mut Report) {
    let start = Instant::now();
    let cfg = load("ber_bpsk_oracle.toml");
    let points = ber::run(&cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut pass = elapsed < 60.0;
    let mut detail = Vec::new();
    for p in &points {
        let gamma = 10f64.powf(p.snr_db / 10.0);
        let theory = bpsk_ber(gamma);
        let n = p.count.bits as f64;
        let sigma = (theory * (1.0 - theory) / n).sqrt();
        let z = (p.count.ber() - theory) / sigma;
        pass &= p.count.bits >= 1_000_000 && z.abs() <= 3.0;
        detail.push(format!("{} dB: {:.3e} vs {theory:.3e} ({z:+.2}σ, {} bits)", p.snr_db, p.count.ber(), p.count.bits));
    }
    r.check("1 bpsk-oracle", pass, format!("{}; {elapsed:.1} s", detail.join(", ")));
}

/// Per-trial BER pairs `(ook, bpsk)` at `snr_db` under the field profile.
fn paired_trials(snr_db: f64) -> Vec<(f64, f64)> {
    let cfg = load("ber_ook_vs_bpsk.toml");
    let sps = cfg.phy.samples_per_symbol;
    let ook = ber::point_outcomes(&cfg, Modulation::Ook, sps, snr_db).unwrap();
    let bpsk = ber::point_outcomes(&cfg, Modulation::Bpsk, sps, snr_db).unwrap();
    assert_eq!(ook.len(), 100);
    ook.iter().zip(&bpsk).map(|(o, b)| (o.errors.ber(), b.errors.ber())).collect()
}

fn bpsk_beats_ook_high_snr(r: &mut Report) {
    let pairs = paired_trials(8.0);
    let wins = pairs.iter().filter(|(o, b)| b < o).count();
    r.check("2 bpsk<ook@8dB", wins >= 95, format!("BPSK lower in {wins}/{} paired trials", pairs.len()));
}

fn ook_beats_bpsk_low_snr(r: &mut Report) {
    let pairs = paired_trials(-5.0);
    let wins = pairs.iter().filter(|(o, b)| o <= b).count();
    r.check("3 ook<=bpsk@-5dB", 2 * wins > pairs.len(), format!("OOK not worse in {wins}/{} paired trials", pairs.len()));
}

fn rate_sweep_monotone(r: &mut Report) {
    let cfg = load("ber_rate_sweep.toml");
    let points = ber::run(&cfg).unwrap();
    let bers: Vec<f64> = points.iter().map(|p| p.count.ber()).collect();
    let pass = points.len() == 5 && bers.windows(2).all(|w| w[1] <= w[0]);
    let detail = points.iter().map(|p| format!("{:.0} b/s: {:.2e}", p.rate_bps, p.count.ber())).collect::<Vec<_>>();
    r.check("4 rate-sweep", pass, detail.join(", "));
}

fn sic_benefit(r: &mut Report) {
    let sps = 8;
    let fmt = BackscatterFormat { modulation: Modulation::Bpsk, samples_per_symbol: sps };
    let qpsk = Modulation::Qpsk.unit_constellation::<f64>();
    // |h_b|² = 1 and γ_b = |h_b|²·sps/N0 = 10 dB; direct path 20 dB stronger.
    let noise = sps as f64 / 10.0;
    let (mut with, mut without) = (ErrorCount::default(), ErrorCount::default());
    for block in 0..100 {
        let mut rng = stream(505, block);
        let hb = phasor(rng.random::<f64>() * std::f64::consts::TAU);
        let hd = phasor(rng.random::<f64>() * std::f64::consts::TAU) * 10.0;
        let bits = random_bits(&mut rng, 1000);
        let mut rx: Vec<Complex<f64>> = (0..bits.len() * sps)
            .map(|n| {
                let s = qpsk[rng.random_range(0..4)];
                let u = if bits[n / sps] { -1.0 } else { 1.0 };
                hd * s + hb * u * s
            })
            .collect();
        add_awgn(&mut rx, noise, &mut rng);
        let csi = SicCsi { h_direct: Some(hd), h_backscatter: Some(hb) };
        with += ErrorCount::compare(&bits, &sic_decode(&rx, &qpsk, &csi, &fmt, 1).unwrap().backscatter_bits);
        without += ErrorCount::compare(&bits, &decode_without_cancellation(&rx, &qpsk, &csi, &fmt).unwrap().backscatter_bits);
    }
    r.check(
        "5 sic-benefit",
        with.bits == 100_000 && with.errors < without.errors,
        format!("BER {:.2e} with SIC vs {:.2e} without", with.ber(), without.ber()),
    );
}

fn frequency_shift_suppression(r: &mut Report) {
    let fs = 1e6;
    let shift = 200e3;
    let n = 8192;
    let settle = 64;
    let dpi = ComplexSamples::constant(Complex::new(1.0, 0.0), n, fs);
    let tag = ComplexSamples::new((0..n).map(|k| phasor(std::f64::consts::TAU * shift * k as f64 / fs)).collect(), fs);
    let power = |x: &ComplexSamples<f64>| {
        x.as_slice()[settle..].iter().map(|v| v.norm_sqr()).sum::<f64>() / (n - settle) as f64
    };
    let dpi_out = power(&freq_shift_filter(&dpi, shift, 50e3, fs).unwrap());
    let tag_out = power(&freq_shift_filter(&tag, shift, 50e3, fs).unwrap());
    let suppression = 10.0 * (tag_out / dpi_out).log10();
    r.check("6 freq-shift", suppression >= 40.0, format!("DPI suppressed {suppression:.1} dB relative to the tag"));
}

/// Bit-serial CRC-16/CCITT-FALSE written against bytes, independent of the
/// bool-slice implementation under test.
fn crc_oracle(bytes: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in bytes {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ 0x1021 } else { crc << 1 };
        }
    }
    crc
}

fn framing(r: &mut Report) {
    let check = crc16(&bytes_to_bits(b"123456789"));
    let oracle = crc_oracle(b"123456789");
    let mut undetected = 0usize;
    let mut injected = 0usize;
    for f in 0..1000u64 {
        let mut rng = stream(707, f);
        let payload = random_bits(&mut rng, PAYLOAD_BITS);
        let clean = build_frame(&payload, DEFAULT_PREAMBLE).unwrap().to_bits();
        let mut bad = |bits: &[bool]| {
            injected += 1;
            if matches!(parse_frame(bits, DEFAULT_PREAMBLE), Ok(p) if p != payload) {
                undetected += 1;
            }
        };
        for i in 0..FRAME_BITS {
            let mut bits = clean.clone();
            bits[i] ^= true;
            bad(&bits);
        }
        for _ in 0..64 {
            let len = rng.random_range(2..=16);
            let start = rng.random_range(0..=FRAME_BITS - len);
            let mut bits = clean.clone();
            bits[start] ^= true;
            bits[start + len - 1] ^= true;
            for b in &mut bits[start + 1..start + len - 1] {
                *b ^= rng.random::<bool>();
            }
            bad(&bits);
        }
    }
    r.check(
        "7 framing",
        check == 0x29B1 && oracle == 0x29B1 && undetected == 0,
        format!("check 0x{check:04X} (oracle 0x{oracle:04X}); {undetected} undetected of {injected} corrupted frames"),
    );
}

fn snr_estimator(r: &mut Report) {
    let cfg = load("snr_estimator.toml");
    assert!(cfg.snr.phase_samples >= 100_000);
    let mut pass = true;
    let mut detail = Vec::new();
    for &truth in &[0.0, 6.0, 12.0] {
        let est = snr::estimates(&cfg, truth).unwrap();
        let worst = est.iter().map(|g| (10.0 * g.log10() - truth).abs()).fold(0.0, f64::max);
        pass &= worst <= 0.5;
        detail.push(format!("{truth} dB: worst |error| {worst:.3} dB over {}", est.len()));
    }
    r.check("8 snr-estimator", pass, detail.join(", "));
}

fn multiple_access(r: &mut Report) {
    let mut walsh_ok = true;
    for len in [2, 4, 8, 16, 32, 64] {
        let set = SpreadingSet::walsh(len, len).unwrap();
        for a in 0..len {
            for b in 0..len {
                walsh_ok &= set.dot(a, b) == if a == b { len as i64 } else { 0 };
            }
        }
    }

    let set = SpreadingSet::walsh(8, 2).unwrap();
    let mut rng = stream(909, 0);
    let bits = [random_bits(&mut rng, 500), random_bits(&mut rng, 500)];
    let gains = [Complex::new(0.3, -0.8), Complex::new(-0.05, 0.02)];
    let streams: Vec<Vec<Complex<f64>>> = bits.iter().enumerate().map(|(k, b)| cbma_spread(b, set.sequence(k))).collect();
    let rx = cbma_superpose(&streams, &gains, &[0, 0]).unwrap();
    let decoded = cbma_despread(&rx, &set, &gains).unwrap();
    let cbma_ok = decoded[0] == bits[0] && decoded[1] == bits[1];

    let mut noma_cfg = load("mac_compare.toml");
    noma_cfg.mac.device_gains_db = vec![0.0, -10.0];
    let noma = mac::evaluate(&noma_cfg, AccessScheme::Noma, 15.0).unwrap();
    let noma_ok = noma.iter().all(|c| c.ber() < 1e-2);

    let mut tdma_ok = true;
    for n in 1..=12 {
        for slots in 1..=5 {
            tdma_ok &= collisions(&tdma_schedule(n, slots).unwrap()) == 0;
        }
    }

    r.check(
        "9 mac",
        walsh_ok && cbma_ok && noma_ok && tdma_ok,
        format!(
            "walsh {walsh_ok}, cbma noiseless {cbma_ok}, noma BER [{:.2e}, {:.2e}], tdma collision-free {tdma_ok}",
            noma[0].ber(),
            noma[1].ber()
        ),
    );
}

fn netsim(r: &mut Report) {
    let cfg = RoundConfig::default();
    let sched = tdma_schedule(1, 1).unwrap();

    let probe = run_inventory(&TopologyScene::direct(&[1.0], DeviceState::category_c()), &sched, &cfg, 1, 1).unwrap();
    let harvest = probe.records[0].harvest_uw;
    let mut leaky = DeviceState::category_c();
    leaky.self_discharge = 1.5 * harvest;
    let log = run_inventory(&TopologyScene::direct(&[1.0], leaky), &sched, &cfg, 1, 50).unwrap();
    let c_ok = harvest > 0.0 && log.successes() == 0 && log.records.iter().all(|r| r.charge_delay == Some(ChargeDelay::Never));

    let mut cap_ok = true;
    let mut rates = Vec::new();
    for d in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let t1 = run_inventory(&TopologyScene::direct(&[d], DeviceState::category_b()), &sched, &cfg, 13, 20).unwrap();
        let t4 = run_inventory(&TopologyScene::user_terminal(&[d], DeviceState::category_b(), 10.0), &sched, &cfg, 13, 20)
            .unwrap();
        cap_ok &= t4.success_rate() <= t1.success_rate();
        rates.push(format!("{d} m {:.2}/{:.2}", t1.success_rate(), t4.success_rate()));
    }

    let scene = TopologyScene::direct(&[1.0, 2.0, 3.5], DeviceState::category_b());
    let sched3 = tdma_schedule(3, 2).unwrap();
    let a = run_inventory(&scene, &sched3, &cfg, 77, 10).unwrap().to_csv();
    let b = run_inventory(&scene, &sched3, &cfg, 77, 10).unwrap().to_csv();

    r.check(
        "10 netsim",
        c_ok && cap_ok && a == b,
        format!(
            "device C drain {:.1} µW > harvest {harvest:.1} µW gives {} successes; topology 1/4 success {}; logs identical {}",
            leaky.self_discharge,
            log.successes(),
            rates.join(", "),
            a == b
        ),
    );
}

fn cli_determinism(r: &mut Report) {
    let mut files: Vec<PathBuf> = std::fs::read_dir(config_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    let mut kinds = std::collections::BTreeSet::new();
    let mut mismatched = Vec::new();
    for f in &files {
        let cfg = ScenarioConfig::load(f, &[]).unwrap();
        kinds.insert(cfg.experiment.name());
        if execute(&cfg).unwrap().csv != execute(&cfg).unwrap().csv {
            mismatched.push(f.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    r.check(
        "11 cli-determinism",
        mismatched.is_empty() && kinds.len() == 4,
        format!("{} configs over {} experiment kinds, mismatched {mismatched:?}", files.len(), kinds.len()),
    );
}

#[test]
fn acceptance() {
    let mut r = Report { failed: Vec::new() };
    bpsk_oracle(&mut r);
    bpsk_beats_ook_high_snr(&mut r);
    ook_beats_bpsk_low_snr(&mut r);
    rate_sweep_monotone(&mut r);
    sic_benefit(&mut r);
    frequency_shift_suppression(&mut r);
    framing(&mut r);
    snr_estimator(&mut r);
    multiple_access(&mut r);
    netsim(&mut r);
    cli_determinism(&mut r);
    assert!(r.failed.is_empty(), "failed criteria: {:?}", r.failed);
}
