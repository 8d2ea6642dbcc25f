//! Event-driven simulation of the link queue, used as an independent check
//! on the closed-form model.
//!
//! One server drains a FIFO queue with a bounded waiting room; the packet in
//! transmission occupies no waiting slot. Arrivals are Poisson. Each arrival
//! draws its service requirement the moment it arrives, admitted or not, so
//! two runs with the same seed that differ only in queue limit see the same
//! arrival and service stream and can be compared packet for packet.
//!
//! A departure scheduled at the same instant as an arrival completes first,
//! freeing the server for the newcomer. The run ends at the final arrival
//! and nothing drains afterwards; whatever is still queued or in service is
//! reported as such. Averages are taken over a measurement window that opens
//! at the first measured arrival and closes at the last arrival, which keeps
//! warmup transients out of the figures.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp};

use crate::error::Error;
use crate::model::NetworkConfig;

/// Name of the random number generator backing the simulator, recorded in
/// reports so a run can be reproduced exactly.
pub const RNG_NAME: &str = "chacha12";

/// How long one packet holds the server.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceDistribution {
    /// Exponential with the configured mean: the classic single-server
    /// queue the closed-form waiting time describes.
    Exponential,
    /// Every packet takes exactly the configured mean. Same load, roughly
    /// half the queueing.
    Deterministic,
}

/// One simulation run, fully determined by these fields and nothing else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Poisson arrival rate, packets per second.
    pub arrival_rate_rps: f64,
    /// Mean service time of one packet, seconds.
    pub mean_service_time_s: f64,
    pub service_distribution: ServiceDistribution,
    /// Waiting slots, excluding the packet in service.
    pub queue_limit_packets: u64,
    /// Arrivals discarded from the statistics while the queue warms up.
    pub warmup_arrivals: u64,
    /// Arrivals the statistics are taken over.
    pub measured_arrivals: u64,
    pub rng_seed: u64,
}

impl SimConfig {
    /// A run against the default link: exponential service at the link's
    /// packet transmission time, the default queue limit, and a warmup of a
    /// tenth of the measured arrivals.
    pub fn new(arrival_rate_rps: f64, measured_arrivals: u64, rng_seed: u64) -> Self {
        let link = NetworkConfig::default();
        SimConfig {
            arrival_rate_rps,
            mean_service_time_s: link.service_time_s(),
            service_distribution: ServiceDistribution::Exponential,
            queue_limit_packets: link.queue_limit_packets,
            warmup_arrivals: measured_arrivals / 10,
            measured_arrivals,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.arrival_rate_rps.is_finite() && self.arrival_rate_rps > 0.0) {
            return Err(Error::invalid(
                "sim.arrival_rate_rps",
                format!("must be finite and positive, got {}", self.arrival_rate_rps),
            ));
        }
        if !(self.mean_service_time_s.is_finite() && self.mean_service_time_s > 0.0) {
            return Err(Error::invalid(
                "sim.mean_service_time_s",
                format!("must be finite and positive, got {}", self.mean_service_time_s),
            ));
        }
        if self.measured_arrivals == 0 {
            return Err(Error::invalid(
                "sim.measured_arrivals",
                "at least one arrival must be measured",
            ));
        }
        if self.warmup_arrivals.checked_add(self.measured_arrivals).is_none() {
            return Err(Error::invalid(
                "sim.warmup_arrivals",
                "warmup plus measured arrivals overflows",
            ));
        }
        Ok(())
    }
}

/// Measurements from one run.
///
/// The means and rates cover only the measurement window; the `total_*`
/// counters cover the whole run including warmup, so
/// `total_arrivals == total_departures + total_drops + in_system_at_end`
/// holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStats {
    /// Mean time a measured packet spent waiting before service, seconds.
    /// Counted at service start, so packets still waiting at the end of the
    /// run contribute nothing.
    pub mean_wait_s: f64,
    /// Mean time a measured packet spent waiting plus in service, seconds.
    /// Counted at departure.
    pub mean_system_time_s: f64,
    /// Measured packets refused per second of window time.
    pub drop_rate_pps: f64,
    /// Fraction of measured arrivals refused.
    pub drop_fraction: f64,
    /// Fraction of the window the server spent transmitting.
    pub observed_utilization: f64,
    /// Number of waiting-time samples behind `mean_wait_s`.
    pub sample_count: u64,
    pub total_arrivals: u64,
    pub total_departures: u64,
    pub total_drops: u64,
    pub in_system_at_end: u64,
}

struct InService {
    arrival_t: f64,
    start_t: f64,
    depart_t: f64,
    idx: u64,
}

struct Waiting {
    arrival_t: f64,
    service_dur: f64,
    idx: u64,
}

/// Runs the queue and reports what it measured.
///
/// Identical configurations produce bit-identical statistics.
pub fn simulate_queue(config: &SimConfig) -> Result<SimStats, Error> {
    config.validate()?;

    let mut rng = ChaCha12Rng::seed_from_u64(config.rng_seed);
    let interarrival = Exp::new(config.arrival_rate_rps).expect("rate validated positive");
    let service = Exp::new(1.0 / config.mean_service_time_s).expect("mean validated positive");

    let total_arrivals = config.warmup_arrivals + config.measured_arrivals;
    let measured = |idx: u64| idx >= config.warmup_arrivals;

    let mut queue: VecDeque<Waiting> = VecDeque::new();
    let mut in_service: Option<InService> = None;
    let mut clock = 0.0_f64;
    let mut window_start: Option<f64> = None;

    let mut wait_sum = 0.0_f64;
    let mut wait_count = 0_u64;
    let mut system_sum = 0.0_f64;
    let mut system_count = 0_u64;
    let mut busy_in_window = 0.0_f64;
    let mut measured_drops = 0_u64;
    let mut total_departures = 0_u64;
    let mut total_drops = 0_u64;

    for idx in 0..total_arrivals {
        let t = clock + interarrival.sample(&mut rng);
        let service_dur = match config.service_distribution {
            ServiceDistribution::Exponential => service.sample(&mut rng),
            ServiceDistribution::Deterministic => config.mean_service_time_s,
        };

        // Complete every transmission due by this arrival; each completion
        // pulls the next waiter into service at the departure instant.
        while in_service.as_ref().is_some_and(|s| s.depart_t <= t) {
            let done = in_service.take().expect("loop condition saw Some");
            total_departures += 1;
            if let Some(ws) = window_start {
                busy_in_window += (done.depart_t - done.start_t.max(ws)).max(0.0);
            }
            if measured(done.idx) {
                system_sum += done.depart_t - done.arrival_t;
                system_count += 1;
            }
            if let Some(next) = queue.pop_front() {
                if measured(next.idx) {
                    wait_sum += done.depart_t - next.arrival_t;
                    wait_count += 1;
                }
                in_service = Some(InService {
                    arrival_t: next.arrival_t,
                    start_t: done.depart_t,
                    depart_t: done.depart_t + next.service_dur,
                    idx: next.idx,
                });
            }
        }

        // The window opens when the first measured packet arrives; every
        // transmission flushed above ended at or before this instant, so
        // none of it is lost from the busy accounting.
        if idx == config.warmup_arrivals {
            window_start = Some(t);
        }

        if in_service.is_none() {
            if measured(idx) {
                wait_count += 1;
            }
            in_service = Some(InService {
                arrival_t: t,
                start_t: t,
                depart_t: t + service_dur,
                idx,
            });
        } else if (queue.len() as u64) < config.queue_limit_packets {
            queue.push_back(Waiting {
                arrival_t: t,
                service_dur,
                idx,
            });
        } else {
            total_drops += 1;
            if measured(idx) {
                measured_drops += 1;
            }
        }

        clock = t;
    }

    let end = clock;
    let in_system_at_end = queue.len() as u64 + u64::from(in_service.is_some());
    if let (Some(active), Some(ws)) = (&in_service, window_start) {
        // The final transmission always outlives the run; clip its busy
        // time to the window.
        busy_in_window += (end - active.start_t.max(ws)).max(0.0);
    }
    let window = window_start.map_or(0.0, |ws| end - ws);

    let mean = |sum: f64, count: u64| if count > 0 { sum / count as f64 } else { 0.0 };
    let (drop_rate_pps, observed_utilization) = if window > 0.0 {
        (measured_drops as f64 / window, busy_in_window / window)
    } else {
        (0.0, 0.0)
    };

    Ok(SimStats {
        mean_wait_s: mean(wait_sum, wait_count),
        mean_system_time_s: mean(system_sum, system_count),
        drop_rate_pps,
        drop_fraction: measured_drops as f64 / config.measured_arrivals as f64,
        observed_utilization,
        sample_count: wait_count,
        total_arrivals,
        total_departures,
        total_drops,
        in_system_at_end,
    })
}

/// One predicted-versus-observed comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub predicted: f64,
    pub observed: f64,
    pub passed: bool,
}

/// Outcome of checking a simulation run against model predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub checks: Vec<OracleCheck>,
    /// True when every individual check passed.
    pub passed: bool,
}

/// Compares `(name, predicted, observed)` triples under a relative
/// tolerance: a check passes when
/// `|observed - predicted| <= tolerance * max(predicted, 1e-12)`.
///
/// The floor on the predicted value keeps a zero prediction meaningful: the
/// observation must then be essentially zero too.
pub fn validate_against_analytic(
    triples: &[(&str, f64, f64)],
    tolerance: f64,
) -> Result<ValidationReport, Error> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::invalid(
            "tolerance",
            format!("must be finite and positive, got {tolerance}"),
        ));
    }
    let checks: Vec<OracleCheck> = triples
        .iter()
        .map(|&(name, predicted, observed)| OracleCheck {
            name: name.to_string(),
            predicted,
            observed,
            passed: (observed - predicted).abs() <= tolerance * predicted.max(1e-12),
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        tolerance,
        checks,
        passed,
    })
}
