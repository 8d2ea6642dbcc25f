//! What-if planning on top of the closed-form model: load sweeps, upgrade
//! plans, service thresholds, and baseline-versus-upgraded comparison.

use crate::error::Error;
use crate::model::{evaluate_point, ModelModes, NetworkConfig, PerformanceMetrics};
use serde::{Deserialize, Serialize};

/// Change applied to the link bandwidth by an upgrade. A plan carries at
/// most one of the two forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthChange {
    /// Replace the bandwidth with an absolute value, bits per second.
    Absolute(f64),
    /// Multiply the current bandwidth by a factor.
    Factor(f64),
}

/// A capacity upgrade expressed as changes against a baseline configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpgradePlan {
    pub bandwidth: Option<BandwidthChange>,
    /// Multiplier for the queue limit. The scaled limit is rounded down to
    /// whole packets.
    pub queue_scale_factor: f64,
    /// Replacement server capacity, requests per second. The user-count
    /// sizing in the configuration is left as-is; it is informational.
    pub server_capacity_new_rps: Option<f64>,
}

impl UpgradePlan {
    /// A plan that changes nothing.
    pub fn identity() -> Self {
        UpgradePlan {
            bandwidth: None,
            queue_scale_factor: 1.0,
            server_capacity_new_rps: None,
        }
    }

    /// The built-in reference upgrade: move the link to 1 Gbps and grow the
    /// queue fivefold. This is what `compare` falls back to when a scenario
    /// names no upgrade of its own.
    pub fn gigabit() -> Self {
        UpgradePlan {
            bandwidth: Some(BandwidthChange::Absolute(1e9)),
            queue_scale_factor: 5.0,
            server_capacity_new_rps: None,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self.bandwidth {
            Some(BandwidthChange::Absolute(b)) if !(b.is_finite() && b > 0.0) => {
                return Err(Error::invalid(
                    "upgrade.bandwidth_bps",
                    format!("must be finite and positive, got {b}"),
                ));
            }
            Some(BandwidthChange::Factor(f)) if !(f.is_finite() && f > 0.0) => {
                return Err(Error::invalid(
                    "upgrade.bandwidth_factor",
                    format!("must be finite and positive, got {f}"),
                ));
            }
            _ => {}
        }
        if !(self.queue_scale_factor.is_finite() && self.queue_scale_factor >= 0.0) {
            return Err(Error::invalid(
                "upgrade.queue_scale_factor",
                format!(
                    "must be finite and nonnegative, got {}",
                    self.queue_scale_factor
                ),
            ));
        }
        if let Some(c) = self.server_capacity_new_rps {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::invalid(
                    "upgrade.server_capacity_new_rps",
                    format!("must be finite and positive, got {c}"),
                ));
            }
        }
        Ok(())
    }
}

/// Applies `plan` to `base` and validates the result.
pub fn apply_upgrade(base: &NetworkConfig, plan: &UpgradePlan) -> Result<NetworkConfig, Error> {
    plan.validate()?;
    let mut out = *base;
    match plan.bandwidth {
        Some(BandwidthChange::Absolute(b)) => out.bandwidth_bps = b,
        Some(BandwidthChange::Factor(f)) => out.bandwidth_bps = base.bandwidth_bps * f,
        None => {}
    }
    out.queue_limit_packets =
        (base.queue_limit_packets as f64 * plan.queue_scale_factor).floor() as u64;
    if let Some(c) = plan.server_capacity_new_rps {
        out.server_capacity_rps = c;
    }
    out.validate()?;
    Ok(out)
}

/// One evaluated sweep: the inputs plus a metrics row per user count.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: NetworkConfig,
    pub modes: ModelModes,
    pub n_from: u32,
    pub n_to: u32,
    pub points: Vec<PerformanceMetrics>,
}

/// Evaluates every user count from `n_from` through `n_to` inclusive,
/// stepping by one.
pub fn sweep(
    config: &NetworkConfig,
    modes: ModelModes,
    n_from: u32,
    n_to: u32,
) -> Result<SweepResult, Error> {
    if n_from > n_to {
        return Err(Error::SweepRange {
            from: n_from,
            to: n_to,
        });
    }
    config.validate()?;
    let points = (n_from..=n_to)
        .map(|n| evaluate_point(config, modes, n))
        .collect();
    Ok(SweepResult {
        config: *config,
        modes,
        n_from,
        n_to,
        points,
    })
}

/// Service quality requirements checked against each sweep point.
///
/// Boundary semantics differ by kind: a point whose total delay *reaches*
/// the delay ceiling fails, while a point sitting exactly on a minimum
/// (per-user throughput, fraction of bandwidth) or maximum (utilization,
/// drop rate) still passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdCriteria {
    /// Total delay must stay strictly below this many seconds.
    pub max_total_delay_s: f64,
    /// Minimum throughput share per user, bits per second.
    pub min_per_user_throughput_bps: f64,
    /// Optional floor on throughput as a fraction of the link bandwidth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_fraction_of_max_throughput: Option<f64>,
    /// Optional ceiling on server utilization, percent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_utilization_pct: Option<f64>,
    /// Optional ceiling on reported queue drops, packets per second.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_queue_drops_pps: Option<f64>,
}

impl Default for ThresholdCriteria {
    /// Interactive-service defaults: keep the round delay under a tenth of
    /// a second and give every user room for a 5 Mbps stream.
    fn default() -> Self {
        ThresholdCriteria {
            max_total_delay_s: 0.1,
            min_per_user_throughput_bps: 5e6,
            min_fraction_of_max_throughput: None,
            max_utilization_pct: None,
            max_queue_drops_pps: None,
        }
    }
}

impl ThresholdCriteria {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.max_total_delay_s.is_finite() && self.max_total_delay_s > 0.0) {
            return Err(Error::invalid(
                "criteria.max_total_delay_s",
                format!("must be finite and positive, got {}", self.max_total_delay_s),
            ));
        }
        if !(self.min_per_user_throughput_bps.is_finite()
            && self.min_per_user_throughput_bps >= 0.0)
        {
            return Err(Error::invalid(
                "criteria.min_per_user_throughput_bps",
                format!(
                    "must be finite and nonnegative, got {}",
                    self.min_per_user_throughput_bps
                ),
            ));
        }
        if let Some(f) = self.min_fraction_of_max_throughput {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(
                    "criteria.min_fraction_of_max_throughput",
                    format!("must lie in (0, 1], got {f}"),
                ));
            }
        }
        if let Some(u) = self.max_utilization_pct {
            if !(u > 0.0 && u <= 100.0) {
                return Err(Error::invalid(
                    "criteria.max_utilization_pct",
                    format!("must lie in (0, 100], got {u}"),
                ));
            }
        }
        if let Some(d) = self.max_queue_drops_pps {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::invalid(
                    "criteria.max_queue_drops_pps",
                    format!("must be finite and nonnegative, got {d}"),
                ));
            }
        }
        Ok(())
    }
}

/// First user counts at which each active criterion fails, scanning the
/// sweep in ascending order. `None` means the criterion held everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub criteria: ThresholdCriteria,
    pub first_delay_violation: Option<u32>,
    pub first_per_user_throughput_violation: Option<u32>,
    pub first_fraction_violation: Option<u32>,
    pub first_utilization_violation: Option<u32>,
    pub first_queue_drop_violation: Option<u32>,
    /// Smallest user count at which any active criterion fails.
    pub upgrade_required_at: Option<u32>,
}

/// Scans a sweep against the criteria. The per-user throughput criterion
/// skips the zero-user point, where "per user" is undefined.
pub fn find_threshold(
    sweep: &SweepResult,
    criteria: &ThresholdCriteria,
) -> Result<ThresholdReport, Error> {
    criteria.validate()?;
    if sweep.points.is_empty() {
        return Err(Error::EmptySweep);
    }

    let mut delay = None;
    let mut per_user = None;
    let mut fraction = None;
    let mut util = None;
    let mut drops = None;

    for p in &sweep.points {
        if delay.is_none() && p.delays.total_s >= criteria.max_total_delay_s {
            delay = Some(p.n_users);
        }
        if per_user.is_none()
            && p.n_users > 0
            && p.throughput_bps / f64::from(p.n_users) < criteria.min_per_user_throughput_bps
        {
            per_user = Some(p.n_users);
        }
        if let Some(f) = criteria.min_fraction_of_max_throughput {
            if fraction.is_none() && p.throughput_bps < f * sweep.config.bandwidth_bps {
                fraction = Some(p.n_users);
            }
        }
        if let Some(max_u) = criteria.max_utilization_pct {
            if util.is_none() && p.utilization_pct > max_u {
                util = Some(p.n_users);
            }
        }
        if let Some(max_d) = criteria.max_queue_drops_pps {
            if drops.is_none() && p.queue_drops_pps > max_d {
                drops = Some(p.n_users);
            }
        }
    }

    let upgrade_required_at = [delay, per_user, fraction, util, drops]
        .into_iter()
        .flatten()
        .min();

    Ok(ThresholdReport {
        criteria: *criteria,
        first_delay_violation: delay,
        first_per_user_throughput_violation: per_user,
        first_fraction_violation: fraction,
        first_utilization_violation: util,
        first_queue_drop_violation: drops,
        upgrade_required_at,
    })
}

/// Pointwise difference between an upgraded sweep and its baseline, indexed
/// by user count. Every numeric field is upgraded minus baseline; a
/// component that is infinite on both sides yields NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsDelta {
    pub n_users: u32,
    pub rho: f64,
    pub r_total_rps: f64,
    pub r_served_rps: f64,
    pub d_queue_s: f64,
    pub d_processing_s: f64,
    pub d_transmission_s: f64,
    pub d_propagation_s: f64,
    pub d_total_s: f64,
    pub utilization_pct: f64,
    pub throughput_bps: f64,
    pub queue_drops_pps: f64,
    pub server_drops_rps: f64,
    /// +1 when the point saturates only after the upgrade, -1 when the
    /// upgrade clears saturation, 0 when unchanged.
    pub saturated_change: i8,
}

/// A baseline sweep, an upgraded sweep over the same user counts, and their
/// pointwise deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    pub baseline: SweepResult,
    pub upgraded: SweepResult,
    pub deltas: Vec<MetricsDelta>,
}

/// Pairs two sweeps point by point. The sweeps must cover identical user
/// counts.
pub fn compare(baseline: &SweepResult, upgraded: &SweepResult) -> Result<ComparisonResult, Error> {
    if baseline.n_from != upgraded.n_from
        || baseline.n_to != upgraded.n_to
        || baseline.points.len() != upgraded.points.len()
    {
        return Err(Error::SweepMismatch {
            left: format!("{}..={}", baseline.n_from, baseline.n_to),
            right: format!("{}..={}", upgraded.n_from, upgraded.n_to),
        });
    }
    let deltas = baseline
        .points
        .iter()
        .zip(&upgraded.points)
        .map(|(b, u)| MetricsDelta {
            n_users: b.n_users,
            rho: u.rho - b.rho,
            r_total_rps: u.r_total_rps - b.r_total_rps,
            r_served_rps: u.r_served_rps - b.r_served_rps,
            d_queue_s: u.delays.queue_s - b.delays.queue_s,
            d_processing_s: u.delays.processing_s - b.delays.processing_s,
            d_transmission_s: u.delays.transmission_s - b.delays.transmission_s,
            d_propagation_s: u.delays.propagation_s - b.delays.propagation_s,
            d_total_s: u.delays.total_s - b.delays.total_s,
            utilization_pct: u.utilization_pct - b.utilization_pct,
            throughput_bps: u.throughput_bps - b.throughput_bps,
            queue_drops_pps: u.queue_drops_pps - b.queue_drops_pps,
            server_drops_rps: u.server_drops_rps - b.server_drops_rps,
            saturated_change: i8::from(u.saturated) - i8::from(b.saturated),
        })
        .collect();
    Ok(ComparisonResult {
        baseline: baseline.clone(),
        upgraded: upgraded.clone(),
        deltas,
    })
}
