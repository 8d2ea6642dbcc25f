//! End-to-end checks for the claims the library is built around: where the
//! reference link saturates, how throughput and drops behave on either side
//! of that point, what the gigabit upgrade buys, and that the analytic model
//! and the event simulator agree with each other.
//!
//! Each test prints a single `acceptance: <name>: PASS|FAIL` line (visible
//! under `cargo test --test acceptance -- --nocapture`) and enforces a
//! runtime budget on top of its assertions.

use std::time::{Duration, Instant};

use capplan::des::{simulate_queue, SimConfig};
use capplan::model::{evaluate_point, ModelModes, NetworkConfig, ProcessingMode, ThroughputMode};
use capplan::report::csv::{write_csv, CSV_HEADER};
use capplan::scenario::{apply_upgrade, find_threshold, sweep, ThresholdCriteria, UpgradePlan};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn criterion<F>(name: &str, budget: Duration, body: F)
where
    F: FnOnce() -> Result<(), String>,
{
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    let outcome = outcome.and_then(|()| {
        if elapsed <= budget {
            Ok(())
        } else {
            Err(format!("took {elapsed:.1?}, budget {budget:?}"))
        }
    });
    match &outcome {
        Ok(()) => println!("acceptance: {name}: PASS ({elapsed:.1?})"),
        Err(reason) => println!("acceptance: {name}: FAIL ({reason})"),
    }
    if let Err(reason) = outcome {
        panic!("{name}: {reason}");
    }
}

macro_rules! check {
    ($cond:expr, $($arg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)+)),
        }
    };
}

fn reference_sweep(modes: ModelModes) -> Result<capplan::scenario::SweepResult, String> {
    sweep(&NetworkConfig::default(), modes, 1, 50).map_err(|e| e.to_string())
}

fn point(sweep: &capplan::scenario::SweepResult, n: u32) -> capplan::model::PerformanceMetrics {
    *sweep
        .points
        .iter()
        .find(|p| p.n_users == n)
        .unwrap_or_else(|| panic!("sweep has no point for {n} users"))
}

#[test]
fn saturation_onset_at_twenty_users() {
    criterion("saturation onset at 20 users", Duration::from_secs(1), || {
        let sweep = reference_sweep(ModelModes::default())?;
        let first = sweep
            .points
            .iter()
            .find(|p| p.rho >= 1.0)
            .map(|p| p.n_users);
        check!(first == Some(20), "first rho >= 1 at {first:?}, expected 20");
        let rho = point(&sweep, 20).rho;
        check!(rho == 1.0008, "rho at 20 users is {rho}, expected 1.0008");
        for p in &sweep.points {
            check!(
                p.saturated == (p.rho >= 1.0),
                "saturated flag disagrees with rho at {} users",
                p.n_users
            );
        }
        Ok(())
    });
}

#[test]
fn throughput_peaks_near_eighty_megabits_then_collapses() {
    criterion(
        "throughput peak near 80 Mbps then collapse",
        Duration::from_secs(1),
        || {
            let sweep = reference_sweep(ModelModes::default())?;
            let at_16 = point(&sweep, 16).throughput_bps;
            check!(at_16 == 8.0064e7, "throughput at 16 users is {at_16}");
            check!(
                (8.0064e7_f64 - 8e7).abs() <= 0.01 * 8e7,
                "peak value strays more than 1% from 80 Mbps"
            );
            let peak = sweep
                .points
                .iter()
                .max_by(|a, b| a.throughput_bps.total_cmp(&b.throughput_bps))
                .unwrap();
            check!(
                (16..=19).contains(&peak.n_users),
                "peak throughput at {} users, expected 16..=19",
                peak.n_users
            );
            for p in sweep.points.iter().filter(|p| p.n_users >= 20) {
                check!(
                    p.throughput_bps == 0.0,
                    "throughput at {} users is {}, expected collapse to 0",
                    p.n_users,
                    p.throughput_bps
                );
            }
            Ok(())
        },
    );
}

#[test]
fn queue_drops_plateau_at_limit() {
    criterion(
        "queue-drop plateau at the 1000-packet limit",
        Duration::from_secs(1),
        || {
            let sweep = reference_sweep(ModelModes::default())?;
            for p in sweep.points.iter().filter(|p| p.n_users <= 19) {
                check!(
                    p.queue_drops_pps == 0.0,
                    "queue drops at {} users is {}, expected 0",
                    p.n_users,
                    p.queue_drops_pps
                );
            }
            let onset = point(&sweep, 20).queue_drops_pps;
            check!(
                (onset - 6.667).abs() <= 1e-3,
                "queue drops at 20 users is {onset}, expected 6.667 +- 1e-3"
            );
            for p in sweep.points.iter().filter(|p| p.n_users >= 23) {
                check!(
                    p.queue_drops_pps == 1000.0,
                    "queue drops at {} users is {}, expected the 1000 limit",
                    p.n_users,
                    p.queue_drops_pps
                );
            }
            Ok(())
        },
    );
}

#[test]
fn gigabit_upgrade_eliminates_all_drops() {
    criterion(
        "gigabit upgrade eliminates drops",
        Duration::from_secs(1),
        || {
            let upgraded = apply_upgrade(&NetworkConfig::default(), &UpgradePlan::gigabit())
                .map_err(|e| e.to_string())?;
            let sweep =
                sweep(&upgraded, ModelModes::default(), 1, 50).map_err(|e| e.to_string())?;
            let rho = point(&sweep, 50).rho;
            check!(rho == 0.2502, "rho at 50 users is {rho}, expected 0.2502");
            for p in &sweep.points {
                check!(
                    p.queue_drops_pps == 0.0 && p.server_drops_rps == 0.0,
                    "drops remain at {} users: queue {}, server {}",
                    p.n_users,
                    p.queue_drops_pps,
                    p.server_drops_rps
                );
                check!(
                    p.delays.transmission_s == 1.2e-5,
                    "transmission delay at {} users is {}, expected 1.2e-5",
                    p.n_users,
                    p.delays.transmission_s
                );
            }
            Ok(())
        },
    );
}

#[test]
fn threshold_detection_finds_upgrade_point() {
    criterion("upgrade threshold detection", Duration::from_secs(1), || {
        let modes = ModelModes {
            processing_mode: ProcessingMode::Disabled,
            ..ModelModes::default()
        };
        let criteria = ThresholdCriteria::default();

        let baseline = reference_sweep(modes)?;
        let report = find_threshold(&baseline, &criteria).map_err(|e| e.to_string())?;
        check!(
            report.first_delay_violation == Some(20),
            "baseline delay violation at {:?}, expected 20",
            report.first_delay_violation
        );
        check!(
            report.upgrade_required_at == Some(20),
            "baseline upgrade point {:?}, expected 20",
            report.upgrade_required_at
        );

        let capped = reference_sweep(ModelModes {
            throughput_mode: ThroughputMode::CarriedCapped,
            ..modes
        })?;
        let report = find_threshold(&capped, &criteria).map_err(|e| e.to_string())?;
        check!(
            report.first_per_user_throughput_violation == Some(21),
            "capped per-user violation at {:?}, expected 21",
            report.first_per_user_throughput_violation
        );

        let upgraded = apply_upgrade(&NetworkConfig::default(), &UpgradePlan::gigabit())
            .map_err(|e| e.to_string())?;
        let upgraded = sweep(&upgraded, modes, 1, 50).map_err(|e| e.to_string())?;
        let report = find_threshold(&upgraded, &criteria).map_err(|e| e.to_string())?;
        check!(
            report.upgrade_required_at.is_none(),
            "upgraded sweep still violates at {:?}",
            report.upgrade_required_at
        );
        Ok(())
    });
}

#[test]
fn simulator_reproduces_queueing_formulas() {
    criterion(
        "simulator agrees with closed-form queueing",
        Duration::from_secs(60),
        || {
            // Half-loaded link: mean wait should match rho/(1-rho) * service.
            let predicted_wait = 0.00012019215372297835_f64;
            let mut hits = 0;
            for seed in 1..=5 {
                let mut cfg = SimConfig::new(4170.0, 1_000_000, seed);
                cfg.queue_limit_packets = 100_000;
                let stats = simulate_queue(&cfg).map_err(|e| e.to_string())?;
                if ((stats.mean_wait_s - predicted_wait) / predicted_wait).abs() <= 0.05 {
                    hits += 1;
                }
            }
            check!(hits >= 4, "wait within 5% for only {hits} of 5 seeds");

            // Overloaded link: long-run drop rate should match the arrival
            // excess over link capacity.
            let cfg = SimConfig::new(12510.0, 1_000_000, 1);
            let stats = simulate_queue(&cfg).map_err(|e| e.to_string())?;
            let predicted_drops = 12510.0 - NetworkConfig::default().link_capacity_pps();
            check!(
                ((stats.drop_rate_pps - predicted_drops) / predicted_drops).abs() <= 0.05,
                "drop rate {} strays more than 5% from {predicted_drops}",
                stats.drop_rate_pps
            );
            Ok(())
        },
    );
}

fn random_integer_config(rng: &mut ChaCha12Rng) -> NetworkConfig {
    // Integer-valued parameters keep every derived rate an exact f64, so the
    // exactness claims below are testable with ==.
    let packet_size = rng.random_range(100..=100_000u64);
    let link_pps = rng.random_range(1..=1_000_000_000u64);
    NetworkConfig {
        bandwidth_bps: (packet_size * link_pps) as f64,
        packet_size_bits: packet_size as f64,
        per_user_request_rate_rps: rng.random_range(1..=1_000_000u64) as f64,
        server_capacity_rps: rng.random_range(1..=1_000_000_000u64) as f64,
        server_capacity_users: 1,
        propagation_speed_mps: 2e8,
        cable_length_m: 90.0,
        queue_limit_packets: rng.random_range(0..=100_000),
    }
}

#[test]
fn exactness_properties_hold() {
    criterion("exactness properties", Duration::from_secs(60), || {
        let modes = ModelModes::default();
        let mut rng = ChaCha12Rng::seed_from_u64(2026);
        for _ in 0..8 {
            let cfg = random_integer_config(&mut rng);
            let per_user_rho = evaluate_point(&cfg, modes, 1).rho;
            for n in 1..=10_000u32 {
                let p = evaluate_point(&cfg, modes, n);
                check!(
                    p.r_served_rps + p.server_drops_rps == p.r_total_rps,
                    "flow not conserved at {n} users for {cfg:?}"
                );
                check!(
                    p.rho == f64::from(n) * per_user_rho,
                    "rho not linear in users at {n} for {cfg:?}"
                );
                let d = p.delays;
                check!(
                    d.total_s == d.queue_s + d.processing_s + d.transmission_s + d.propagation_s,
                    "total delay is not the component sum at {n} users for {cfg:?}"
                );
            }
            for k in 1..=5u32 {
                let factor = f64::from(1u32 << k);
                let widened = NetworkConfig {
                    bandwidth_bps: cfg.bandwidth_bps * factor,
                    ..cfg
                };
                for n in [1, 7, 50, 333, 10_000] {
                    let narrow = evaluate_point(&cfg, modes, n).rho;
                    let wide = evaluate_point(&widened, modes, n).rho;
                    check!(
                        wide == narrow / factor,
                        "rho does not scale exactly with a {factor}x link at {n} users"
                    );
                }
            }
        }

        // Rendered CSV reproduces every numeric field exactly on parse.
        let sweep = reference_sweep(modes)?;
        let csv = write_csv(&sweep).map_err(|e| e.to_string())?;
        let mut lines = csv.lines();
        check!(lines.next() == Some(CSV_HEADER), "unexpected CSV header");
        for (line, p) in lines.zip(&sweep.points) {
            let fields: Vec<&str> = line.split(',').collect();
            check!(fields.len() == 14, "row arity {} != 14", fields.len());
            let parse = |i: usize| -> Result<f64, String> {
                fields[i].parse().map_err(|e| format!("field {i}: {e}"))
            };
            check!(
                fields[0] == p.n_users.to_string(),
                "n_users did not round-trip"
            );
            let d = p.delays;
            let expected = [
                p.rho,
                p.r_total_rps,
                p.r_served_rps,
                d.queue_s,
                d.processing_s,
                d.transmission_s,
                d.propagation_s,
                d.total_s,
                p.utilization_pct,
                p.throughput_bps,
                p.queue_drops_pps,
                p.server_drops_rps,
            ];
            for (i, want) in expected.iter().enumerate() {
                let got = parse(i + 1)?;
                check!(
                    got == *want,
                    "field {} of row {} parsed to {got}, not {want}",
                    CSV_HEADER.split(',').nth(i + 1).unwrap(),
                    p.n_users
                );
            }
            check!(
                fields[13] == if p.saturated { "true" } else { "false" },
                "saturated flag did not round-trip"
            );
        }

        // Same seed, same trace; a different seed moves the estimates.
        for (rate, seed) in [(5_000.0, 9), (12_510.0, 3)] {
            let cfg = SimConfig::new(rate, 20_000, seed);
            let a = simulate_queue(&cfg).map_err(|e| e.to_string())?;
            let b = simulate_queue(&cfg).map_err(|e| e.to_string())?;
            check!(
                a == b,
                "repeated simulation with seed {seed} diverged at rate {rate}"
            );
        }
        Ok(())
    });
}
