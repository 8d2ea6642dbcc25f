//! CSV rendering of sweeps and comparisons.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! reading a column back recovers the exact computed value. Infinities
//! appear as `inf`, and a delta between two infinities appears as `NaN`.

use crate::error::Error;
use crate::scenario::{ComparisonResult, SweepResult};

/// Column layout of [`write_csv`], stable across releases.
pub const CSV_HEADER: &str = "n_users,rho,r_total_rps,r_served_rps,d_queue_s,d_processing_s,\
d_transmission_s,d_propagation_s,d_total_s,utilization_pct,throughput_bps,queue_drops_pps,\
server_drops_rps,saturated";

/// Column layout of [`write_delta_csv`], stable across releases.
pub const DELTA_CSV_HEADER: &str = "n_users,delta_rho,delta_r_total_rps,delta_r_served_rps,\
delta_d_queue_s,delta_d_processing_s,delta_d_transmission_s,delta_d_propagation_s,\
delta_d_total_s,delta_utilization_pct,delta_throughput_bps,delta_queue_drops_pps,\
delta_server_drops_rps,delta_saturated";

/// Renders a sweep as CSV, one row per user count, `\n` line endings.
pub fn write_csv(sweep: &SweepResult) -> Result<String, Error> {
    if sweep.points.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut out = String::with_capacity(64 * (sweep.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &sweep.points {
        let d = p.delays;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.n_users,
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
            p.saturated,
        ));
    }
    Ok(out)
}

/// Renders the upgraded-minus-baseline deltas of a comparison as CSV.
/// `delta_saturated` is -1, 0 or 1.
pub fn write_delta_csv(comparison: &ComparisonResult) -> Result<String, Error> {
    if comparison.deltas.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut out = String::with_capacity(64 * (comparison.deltas.len() + 1));
    out.push_str(DELTA_CSV_HEADER);
    out.push('\n');
    for d in &comparison.deltas {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            d.n_users,
            d.rho,
            d.r_total_rps,
            d.r_served_rps,
            d.d_queue_s,
            d.d_processing_s,
            d.d_transmission_s,
            d.d_propagation_s,
            d.d_total_s,
            d.utilization_pct,
            d.throughput_bps,
            d.queue_drops_pps,
            d.server_drops_rps,
            d.saturated_change,
        ));
    }
    Ok(out)
}
