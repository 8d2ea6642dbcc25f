//! The `capplan` command line: evaluate, sweep, compare, threshold and
//! validate subcommands over a scenario file.
//!
//! Results go to stdout as `key=value` lines (or raw CSV for a sweep
//! without `--out`); diagnostics go to stderr. Exit codes: 0 on success,
//! 1 on runtime errors or a failed validation, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::des::{simulate_queue, validate_against_analytic, SimConfig, RNG_NAME};
use crate::error::Error;
use crate::model::{
    evaluate_point, queuing_delay, traffic_intensity, ModelModes, PerformanceMetrics,
    SaturationPolicy,
};
use crate::report::csv::{write_csv, write_delta_csv};
use crate::report::plot::render_plot;
use crate::report::{parse_scenario, serialize_scenario, ScenarioDocument};
use crate::scenario::{
    apply_upgrade, compare, find_threshold, sweep, SweepResult, ThresholdReport, UpgradePlan,
};

#[derive(Debug, Parser)]
#[command(name = "capplan", version, about = "Capacity planning for a shared access link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the model at one user count and print every metric.
    Evaluate {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Number of active users.
        #[arg(long)]
        users: u32,
        /// Override a scenario key, e.g. --set network.bandwidth_bps=1e9.
        /// Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Sweep a range of user counts and emit CSV, optionally with charts.
    Sweep {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// First user count; defaults to the scenario's sweep.from.
        #[arg(long)]
        from: Option<u32>,
        /// Last user count; defaults to the scenario's sweep.to.
        #[arg(long)]
        to: Option<u32>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render an SVG chart of this metric next to --out. Repeatable.
        #[arg(long, value_name = "METRIC", requires = "out")]
        plot: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Sweep the baseline and the upgraded network; write both plus deltas.
    Compare {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// First user count; defaults to the scenario's sweep.from.
        #[arg(long)]
        from: Option<u32>,
        /// Last user count; defaults to the scenario's sweep.to.
        #[arg(long)]
        to: Option<u32>,
        /// Output stem: writes <stem>_baseline.csv, <stem>_upgraded.csv and
        /// <stem>_delta.csv.
        #[arg(long)]
        out: PathBuf,
        /// Render <stem>_<metric>.svg with both series. Repeatable.
        #[arg(long, value_name = "METRIC")]
        plot: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Find the smallest user count that violates the service criteria.
    Threshold {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// First user count; defaults to the scenario's sweep.from.
        #[arg(long)]
        from: Option<u32>,
        /// Last user count; defaults to the scenario's sweep.to.
        #[arg(long)]
        to: Option<u32>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Simulate the link queue and check it against the model's predictions.
    Validate {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// User count to load the link with; defaults to the scenario's
        /// sweep.to.
        #[arg(long)]
        users: Option<u32>,
        /// Seed for the simulation's random number generator.
        #[arg(long)]
        seed: u64,
        /// Measured arrivals.
        #[arg(long, default_value_t = 1_000_000)]
        arrivals: u64,
        /// Warmup arrivals excluded from the statistics; defaults to a
        /// tenth of the measured arrivals.
        #[arg(long)]
        warmup: Option<u64>,
        /// Relative tolerance for each predicted-versus-observed check.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

/// Parses `args` and runs the selected command, returning the process exit
/// code instead of exiting, so tests can drive the full command path.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and exit 0; usage errors
            // print to stderr and exit 2. clap knows which is which.
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn run(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Evaluate {
            scenario,
            users,
            set,
        } => {
            let doc = load_scenario(&scenario, &set)?;
            print_point(&evaluate_point(&doc.network, doc.modes, users));
            Ok(0)
        }
        Command::Sweep {
            scenario,
            from,
            to,
            out,
            plot,
            set,
        } => {
            let doc = load_scenario(&scenario, &set)?;
            let result = run_sweep(&doc, from, to)?;
            let csv = write_csv(&result)?;
            match &out {
                None => print!("{csv}"),
                Some(path) => {
                    write_file(path, &csv)?;
                    println!("csv={}", path.display());
                    for metric in &plot {
                        let target = sibling(path, metric, "svg");
                        write_file(&target, &render_plot(&result, None, metric)?)?;
                        println!("plot_{metric}={}", target.display());
                    }
                }
            }
            Ok(0)
        }
        Command::Compare {
            scenario,
            from,
            to,
            out,
            plot,
            set,
        } => {
            let doc = load_scenario(&scenario, &set)?;
            let plan = doc.upgrade.unwrap_or_else(UpgradePlan::gigabit);
            let upgraded_cfg = apply_upgrade(&doc.network, &plan)?;
            let baseline = run_sweep(&doc, from, to)?;
            let upgraded = sweep(&upgraded_cfg, doc.modes, baseline.n_from, baseline.n_to)?;
            let comparison = compare(&baseline, &upgraded)?;

            let base_csv = sibling(&out, "baseline", "csv");
            let up_csv = sibling(&out, "upgraded", "csv");
            let delta_csv = sibling(&out, "delta", "csv");
            write_file(&base_csv, &write_csv(&baseline)?)?;
            write_file(&up_csv, &write_csv(&upgraded)?)?;
            write_file(&delta_csv, &write_delta_csv(&comparison)?)?;
            println!("baseline_csv={}", base_csv.display());
            println!("upgraded_csv={}", up_csv.display());
            println!("delta_csv={}", delta_csv.display());
            for metric in &plot {
                let target = sibling(&out, metric, "svg");
                write_file(&target, &render_plot(&baseline, Some(&upgraded), metric)?)?;
                println!("plot_{metric}={}", target.display());
            }

            let first_saturation =
                |s: &SweepResult| s.points.iter().find(|p| p.saturated).map(|p| p.n_users);
            println!(
                "baseline_first_saturation={}",
                fmt_first(first_saturation(&baseline))
            );
            println!(
                "upgraded_first_saturation={}",
                fmt_first(first_saturation(&upgraded))
            );
            let base_report = find_threshold(&baseline, &doc.criteria)?;
            let up_report = find_threshold(&upgraded, &doc.criteria)?;
            println!(
                "baseline_upgrade_required_at={}",
                fmt_first(base_report.upgrade_required_at)
            );
            println!(
                "upgraded_upgrade_required_at={}",
                fmt_first(up_report.upgrade_required_at)
            );
            Ok(0)
        }
        Command::Threshold {
            scenario,
            from,
            to,
            set,
        } => {
            let doc = load_scenario(&scenario, &set)?;
            let result = run_sweep(&doc, from, to)?;
            let report = find_threshold(&result, &doc.criteria)?;
            print_threshold(&report, result.n_from, result.n_to);
            Ok(0)
        }
        Command::Validate {
            scenario,
            users,
            seed,
            arrivals,
            warmup,
            tolerance,
            set,
        } => {
            let doc = load_scenario(&scenario, &set)?;
            let users = users.unwrap_or(doc.sweep.to);
            let net = &doc.network;
            let lambda = net.per_user_request_rate_rps * f64::from(users);
            let mut sim = SimConfig::new(lambda, arrivals, seed);
            sim.mean_service_time_s = net.service_time_s();
            sim.queue_limit_packets = net.queue_limit_packets;
            if let Some(w) = warmup {
                sim.warmup_arrivals = w;
            }
            let stats = simulate_queue(&sim)?;

            // What the closed-form model expects the queue to do. Waiting
            // time in real seconds; above saturation the full-queue drain
            // time is the honest finite prediction. The drop prediction is
            // the raw arrival excess: unlike the reporting clamp in the
            // sweep metrics, a real queue sheds the whole excess.
            let rho = f64::from(users)
                * traffic_intensity(
                    net.packet_size_bits,
                    net.per_user_request_rate_rps,
                    net.bandwidth_bps,
                );
            let capped = ModelModes {
                saturation_policy: SaturationPolicy::Capped,
                ..ModelModes::default()
            };
            let wait_pred =
                queuing_delay(rho, net.service_time_s(), net.queue_limit_packets, capped);
            let drop_pred = (lambda - net.link_capacity_pps()).max(0.0);
            let util_pred = rho.min(1.0);

            let report = validate_against_analytic(
                &[
                    ("mean_wait_s", wait_pred, stats.mean_wait_s),
                    ("drop_rate_pps", drop_pred, stats.drop_rate_pps),
                    ("utilization", util_pred, stats.observed_utilization),
                ],
                tolerance,
            )?;

            println!("rng={RNG_NAME}");
            println!("seed={seed}");
            println!("users={users}");
            println!("arrival_rate_rps={lambda}");
            println!("service_time_s={}", net.service_time_s());
            println!("queue_limit_packets={}", net.queue_limit_packets);
            println!("warmup_arrivals={}", sim.warmup_arrivals);
            println!("measured_arrivals={}", sim.measured_arrivals);
            println!("tolerance={tolerance}");
            for check in &report.checks {
                println!("{}_predicted={}", check.name, check.predicted);
                println!("{}_observed={}", check.name, check.observed);
                println!(
                    "{}_check={}",
                    check.name,
                    if check.passed { "pass" } else { "fail" }
                );
            }
            println!("validation={}", if report.passed { "pass" } else { "fail" });
            Ok(i32::from(!report.passed))
        }
    }
}

fn load_scenario(path: &Path, sets: &[String]) -> anyhow::Result<ScenarioDocument> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc =
        parse_scenario(&text).with_context(|| format!("parsing {}", path.display()))?;
    apply_overrides(&doc, sets)
}

/// Applies `--set key=value` pairs by editing the serialized document and
/// re-parsing it, so overrides face exactly the validation and unknown-key
/// rejection a scenario file faces.
fn apply_overrides(doc: &ScenarioDocument, sets: &[String]) -> anyhow::Result<ScenarioDocument> {
    if sets.is_empty() {
        return Ok(doc.clone());
    }
    let mut root: toml::Table = serialize_scenario(doc)?
        .parse()
        .context("re-reading scenario for overrides")?;
    for entry in sets {
        let (key, raw) = entry
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{entry}'"))?;
        set_path(&mut root, key, parse_toml_value(raw))
            .with_context(|| format!("--set {entry}"))?;
    }
    let text = toml::to_string(&root).context("serializing overridden scenario")?;
    parse_scenario(&text).context("applying --set overrides")
}

/// Interprets an override value as TOML; a bare word like `carried-capped`
/// is not valid TOML and falls back to a string, so enum values need no
/// shell-level quoting.
fn parse_toml_value(raw: &str) -> toml::Value {
    raw.parse::<toml::Value>()
        .unwrap_or_else(|_| toml::Value::String(raw.to_string()))
}

fn set_path(root: &mut toml::Table, key: &str, value: toml::Value) -> anyhow::Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    anyhow::ensure!(
        parts.iter().all(|p| !p.is_empty()),
        "key '{key}' has an empty segment"
    );
    let leaf = parts.pop().expect("split yields at least one part");
    let mut table = root;
    for part in parts {
        table = table
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .with_context(|| format!("'{part}' in '{key}' is not a table"))?;
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

fn run_sweep(
    doc: &ScenarioDocument,
    from: Option<u32>,
    to: Option<u32>,
) -> Result<SweepResult, Error> {
    sweep(
        &doc.network,
        doc.modes,
        from.unwrap_or(doc.sweep.from),
        to.unwrap_or(doc.sweep.to),
    )
}

fn write_file(path: &Path, content: &str) -> anyhow::Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn sibling(base: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    base.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn fmt_first(n: Option<u32>) -> String {
    n.map_or_else(|| "never".to_string(), |n| n.to_string())
}

fn print_point(p: &PerformanceMetrics) {
    println!("n_users={}", p.n_users);
    println!("rho={}", p.rho);
    println!("r_total_rps={}", p.r_total_rps);
    println!("r_served_rps={}", p.r_served_rps);
    println!("d_queue_s={}", p.delays.queue_s);
    println!("d_processing_s={}", p.delays.processing_s);
    println!("d_transmission_s={}", p.delays.transmission_s);
    println!("d_propagation_s={}", p.delays.propagation_s);
    println!("d_total_s={}", p.delays.total_s);
    println!("utilization_pct={}", p.utilization_pct);
    println!("throughput_bps={}", p.throughput_bps);
    println!("queue_drops_pps={}", p.queue_drops_pps);
    println!("server_drops_rps={}", p.server_drops_rps);
    println!("saturated={}", p.saturated);
}

fn print_threshold(r: &ThresholdReport, from: u32, to: u32) {
    println!("sweep_from={from}");
    println!("sweep_to={to}");
    println!("max_total_delay_s={}", r.criteria.max_total_delay_s);
    println!(
        "min_per_user_throughput_bps={}",
        r.criteria.min_per_user_throughput_bps
    );
    println!(
        "first_delay_violation={}",
        fmt_first(r.first_delay_violation)
    );
    println!(
        "first_per_user_throughput_violation={}",
        fmt_first(r.first_per_user_throughput_violation)
    );
    if let Some(f) = r.criteria.min_fraction_of_max_throughput {
        println!("min_fraction_of_max_throughput={f}");
        println!(
            "first_fraction_violation={}",
            fmt_first(r.first_fraction_violation)
        );
    }
    if let Some(u) = r.criteria.max_utilization_pct {
        println!("max_utilization_pct={u}");
        println!(
            "first_utilization_violation={}",
            fmt_first(r.first_utilization_violation)
        );
    }
    if let Some(d) = r.criteria.max_queue_drops_pps {
        println!("max_queue_drops_pps={d}");
        println!(
            "first_queue_drop_violation={}",
            fmt_first(r.first_queue_drop_violation)
        );
    }
    println!("upgrade_required_at={}", fmt_first(r.upgrade_required_at));
}
