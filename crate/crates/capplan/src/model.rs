//! Closed-form performance model of a shared access link fed by identical
//! subscribers.
//!
//! A point evaluation composes these quantities, in order:
//!
//! ```text
//! R_total  = R_user * n                 offered load, requests/s
//! rho      = n * (S * R_user / B)       traffic intensity on the link
//! R_served = min(R_total, C)            what the server carries
//! D_queue  = g(rho)                     see QueueDelayMode / SaturationPolicy
//! D_proc   = R_served / C               see ProcessingMode
//! D_trans  = S / B
//! D_prop   = L / v
//! D_total  = D_queue + D_proc + D_trans + D_prop
//! ```
//!
//! with `S` the packet size in bits, `B` the link bandwidth in bits/s, `C`
//! the server capacity in requests/s, `L` the cable length and `v` the
//! propagation speed. Every request is one packet, so request rates and
//! packet rates are interchangeable throughout.
//!
//! Intensity is deliberately computed as `n * (S * R_user / B)` rather than
//! `S * (R_user * n) / B`: scaling the single-user intensity keeps a sweep
//! exactly linear in `n` in floating point, `rho(n) == n * rho(1)` bit for
//! bit, which downstream threshold detection relies on.
//!
//! Saturation (`rho >= 1`) is a first-class state, not an error: the queue
//! delay becomes infinite (or pinned at the full-queue drain time, by
//! policy), infinities propagate through `D_total`, and reported throughput
//! collapses to zero in the default mode. No quantity is ever rounded.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Static description of one access-network deployment.
///
/// The defaults describe a 100 Mbps link shared by up to 50 subscribers over
/// short structured cabling, with 1500-byte packets and a server sized for
/// exactly those 50 users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Link bandwidth in bits per second.
    pub bandwidth_bps: f64,
    /// Fixed packet size in bits.
    pub packet_size_bits: f64,
    /// Request rate generated by one active user, requests per second.
    pub per_user_request_rate_rps: f64,
    /// Aggregate rate the server can process, requests per second.
    pub server_capacity_rps: f64,
    /// User count the server is sized for. Informational: the request-rate
    /// form above is what the equations consume.
    pub server_capacity_users: u32,
    /// Signal propagation speed in the medium, metres per second.
    pub propagation_speed_mps: f64,
    /// Cable run between user and server, metres.
    pub cable_length_m: f64,
    /// Waiting room of the link queue in packets, excluding the packet in
    /// transmission.
    pub queue_limit_packets: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            bandwidth_bps: 1e8,
            packet_size_bits: 12_000.0,
            per_user_request_rate_rps: 417.0,
            server_capacity_rps: 20_850.0,
            server_capacity_users: 50,
            propagation_speed_mps: 2e8,
            cable_length_m: 90.0,
            queue_limit_packets: 1_000,
        }
    }
}

impl NetworkConfig {
    /// Checks the domain of every field, naming the first offender.
    pub fn validate(&self) -> Result<(), Error> {
        fn positive(field: &'static str, v: f64) -> Result<(), Error> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    field,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        }
        positive("network.bandwidth_bps", self.bandwidth_bps)?;
        positive("network.packet_size_bits", self.packet_size_bits)?;
        positive(
            "network.per_user_request_rate_rps",
            self.per_user_request_rate_rps,
        )?;
        positive("network.server_capacity_rps", self.server_capacity_rps)?;
        positive("network.propagation_speed_mps", self.propagation_speed_mps)?;
        if !(self.cable_length_m.is_finite() && self.cable_length_m >= 0.0) {
            return Err(Error::invalid(
                "network.cable_length_m",
                format!("must be finite and nonnegative, got {}", self.cable_length_m),
            ));
        }
        Ok(())
    }

    /// Transmission time of one packet on the link, in seconds. This doubles
    /// as the mean service time of the link queue.
    pub fn service_time_s(&self) -> f64 {
        transmission_delay(self.packet_size_bits, self.bandwidth_bps)
    }

    /// Rate at which the link drains packets, packets per second.
    pub fn link_capacity_pps(&self) -> f64 {
        self.bandwidth_bps / self.packet_size_bits
    }
}

/// How queueing delay is reported below saturation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueueDelayMode {
    /// Report `rho / (1 - rho)` as-is. The value is a mean queue occupancy,
    /// not a physical time, but some treatments print it in seconds; this
    /// mode reproduces those figures.
    LiteralSeconds,
    /// Scale `rho / (1 - rho)` by the packet service time, giving the
    /// classic single-server mean waiting time in real seconds.
    #[default]
    ServiceScaled,
}

/// What to report for queueing delay once `rho >= 1`, where no steady state
/// exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaturationPolicy {
    /// Report positive infinity and let it propagate through the total.
    #[default]
    Infinite,
    /// Report the time to drain a full queue, `queue_limit * service_time`,
    /// which is what a packet admitted to the last slot actually waits.
    Capped,
}

/// Whether server processing time contributes to the total delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessingMode {
    /// `R_served / C` read directly as seconds. The ratio is the server's
    /// busy fraction, so this contributes up to a full second at capacity
    /// and tends to dominate the other terms.
    #[default]
    Literal,
    /// Processing contributes zero, isolating the link-side delays.
    Disabled,
}

/// Which quantity `throughput_bps` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThroughputMode {
    /// Carried load `min(R_served * S, B)` while the link is stable, zero
    /// once it saturates: useful throughput collapses when the queue grows
    /// without bound.
    #[default]
    CarriedCollapsing,
    /// Carried load `min(R_served * S, B)` regardless of saturation.
    CarriedCapped,
    /// `R_served * S / D_total`, served bits divided by the total delay.
    /// Dimensionally this is not a link rate; it is kept for comparison
    /// with treatments that define throughput this way. Zero when the total
    /// delay is infinite.
    BitsPerDelay,
}

/// Interpretation switches for the ambiguous corners of the closed-form
/// model. The defaults give physically meaningful units everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelModes {
    pub queue_delay_mode: QueueDelayMode,
    pub saturation_policy: SaturationPolicy,
    pub processing_mode: ProcessingMode,
    pub throughput_mode: ThroughputMode,
}

/// Per-packet delay components of one evaluated load point, all in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBreakdown {
    pub queue_s: f64,
    pub processing_s: f64,
    pub transmission_s: f64,
    pub propagation_s: f64,
    /// Sum of the four components, computed once in field order, so
    /// `total_s == queue_s + processing_s + transmission_s + propagation_s`
    /// holds exactly. Infinite whenever any component is infinite.
    pub total_s: f64,
}

impl DelayBreakdown {
    pub fn new(queue_s: f64, processing_s: f64, transmission_s: f64, propagation_s: f64) -> Self {
        DelayBreakdown {
            queue_s,
            processing_s,
            transmission_s,
            propagation_s,
            total_s: total_delay(queue_s, processing_s, transmission_s, propagation_s),
        }
    }
}

/// Everything the model predicts for one (configuration, user count) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceMetrics {
    pub n_users: u32,
    /// Offered load, requests per second.
    pub r_total_rps: f64,
    /// Load the server actually carries, requests per second. Together with
    /// `server_drops_rps` this always sums back to `r_total_rps`.
    pub r_served_rps: f64,
    /// Link traffic intensity, dimensionless.
    pub rho: f64,
    pub delays: DelayBreakdown,
    /// Server busy fraction as a percentage, 0 to 100.
    pub utilization_pct: f64,
    /// Reported throughput in bits per second; see [`ThroughputMode`].
    pub throughput_bps: f64,
    /// Arrival excess the link queue cannot absorb, packets per second,
    /// clamped to the queue limit.
    pub queue_drops_pps: f64,
    /// Offered load beyond server capacity, requests per second.
    pub server_drops_rps: f64,
    /// True exactly when `rho >= 1`.
    pub saturated: bool,
}

/// Aggregate request rate offered by `n_users` identical users, requests/s.
pub fn total_request_rate(per_user_rps: f64, n_users: u32) -> f64 {
    per_user_rps * f64::from(n_users)
}

/// Traffic intensity `S * R / B`: the fraction of link capacity the offered
/// bit rate consumes. Dimensionless; at or above 1 the link is overloaded.
pub fn traffic_intensity(packet_size_bits: f64, total_rate_rps: f64, bandwidth_bps: f64) -> f64 {
    packet_size_bits * total_rate_rps / bandwidth_bps
}

/// Mean queueing delay for intensity `rho`.
///
/// Below saturation this is `rho / (1 - rho)`, reported as-is or scaled by
/// the service time depending on the mode. At `rho >= 1` no steady-state
/// wait exists and the saturation policy picks the reported value instead;
/// the queue-delay mode is irrelevant there.
pub fn queuing_delay(
    rho: f64,
    service_time_s: f64,
    queue_limit_packets: u64,
    modes: ModelModes,
) -> f64 {
    if rho >= 1.0 {
        return match modes.saturation_policy {
            SaturationPolicy::Infinite => f64::INFINITY,
            SaturationPolicy::Capped => queue_limit_packets as f64 * service_time_s,
        };
    }
    let occupancy = rho / (1.0 - rho);
    match modes.queue_delay_mode {
        QueueDelayMode::LiteralSeconds => occupancy,
        QueueDelayMode::ServiceScaled => occupancy * service_time_s,
    }
}

/// Server processing delay per request, seconds.
pub fn processing_delay(served_rate_rps: f64, server_capacity_rps: f64, modes: ModelModes) -> f64 {
    match modes.processing_mode {
        ProcessingMode::Literal => served_rate_rps / server_capacity_rps,
        ProcessingMode::Disabled => 0.0,
    }
}

/// Time to clock one packet onto the link, seconds.
pub fn transmission_delay(packet_size_bits: f64, bandwidth_bps: f64) -> f64 {
    packet_size_bits / bandwidth_bps
}

/// Signal travel time over the cable, seconds.
pub fn propagation_delay(cable_length_m: f64, propagation_speed_mps: f64) -> f64 {
    cable_length_m / propagation_speed_mps
}

/// Sum of the four delay components, seconds. Infinite whenever any
/// component is infinite.
pub fn total_delay(queue_s: f64, processing_s: f64, transmission_s: f64, propagation_s: f64) -> f64 {
    queue_s + processing_s + transmission_s + propagation_s
}

/// Splits offered load into the part the server carries and the part it
/// sheds: `(served, dropped)`. The two halves sum back to `total_rate_rps`.
pub fn served_rate(total_rate_rps: f64, server_capacity_rps: f64) -> (f64, f64) {
    let served = total_rate_rps.min(server_capacity_rps);
    (served, total_rate_rps - served)
}

/// Server busy fraction as a percentage of its capacity, 0 to 100.
pub fn utilization(served_rate_rps: f64, server_capacity_rps: f64) -> f64 {
    served_rate_rps / server_capacity_rps * 100.0
}

/// Packet rate the link queue must refuse once arrivals outrun the drain
/// rate `B / S`, clamped to the queue limit.
///
/// The clamp keeps the reported figure within the queue's own size. A real
/// queue in steady overload sheds packets at the full excess rate whatever
/// its length; the event-driven simulator in [`crate::des`] measures that
/// unclamped rate, and the two agree below the clamp.
pub fn queue_drops(
    total_rate_rps: f64,
    bandwidth_bps: f64,
    packet_size_bits: f64,
    queue_limit_packets: u64,
) -> f64 {
    let excess = total_rate_rps - bandwidth_bps / packet_size_bits;
    excess.min(queue_limit_packets as f64).max(0.0)
}

/// Reported throughput in bits per second, per the selected mode.
pub fn throughput(
    served_rate_rps: f64,
    packet_size_bits: f64,
    total_delay_s: f64,
    bandwidth_bps: f64,
    saturated: bool,
    modes: ModelModes,
) -> f64 {
    let carried = (served_rate_rps * packet_size_bits).min(bandwidth_bps);
    match modes.throughput_mode {
        ThroughputMode::CarriedCollapsing => {
            if saturated {
                0.0
            } else {
                carried
            }
        }
        ThroughputMode::CarriedCapped => carried,
        ThroughputMode::BitsPerDelay => {
            if total_delay_s.is_infinite() {
                0.0
            } else {
                served_rate_rps * packet_size_bits / total_delay_s
            }
        }
    }
}

/// Evaluates the closed-form model for `n_users` active subscribers.
///
/// The configuration is trusted to be valid (see
/// [`NetworkConfig::validate`]); boundary layers validate before calling.
/// `n_users == 0` is a legal quiet point: every load-dependent quantity is
/// zero and only the constant transmission and propagation delays remain.
pub fn evaluate_point(config: &NetworkConfig, modes: ModelModes, n_users: u32) -> PerformanceMetrics {
    let r_total = total_request_rate(config.per_user_request_rate_rps, n_users);
    let rho = f64::from(n_users)
        * traffic_intensity(
            config.packet_size_bits,
            config.per_user_request_rate_rps,
            config.bandwidth_bps,
        );
    let saturated = rho >= 1.0;
    let (r_served, server_drops) = served_rate(r_total, config.server_capacity_rps);
    let delays = DelayBreakdown::new(
        queuing_delay(rho, config.service_time_s(), config.queue_limit_packets, modes),
        processing_delay(r_served, config.server_capacity_rps, modes),
        transmission_delay(config.packet_size_bits, config.bandwidth_bps),
        propagation_delay(config.cable_length_m, config.propagation_speed_mps),
    );
    PerformanceMetrics {
        n_users,
        r_total_rps: r_total,
        r_served_rps: r_served,
        rho,
        delays,
        utilization_pct: utilization(r_served, config.server_capacity_rps),
        throughput_bps: throughput(
            r_served,
            config.packet_size_bits,
            delays.total_s,
            config.bandwidth_bps,
            saturated,
            modes,
        ),
        queue_drops_pps: queue_drops(
            r_total,
            config.bandwidth_bps,
            config.packet_size_bits,
            config.queue_limit_packets,
        ),
        server_drops_rps: server_drops,
        saturated,
    }
}
