//! Scenario files and the renderers that turn results into CSV and SVG.
//!
//! A scenario is a TOML document with one required table and four optional
//! ones:
//!
//! ```toml
//! [sweep]                        # required; inclusive user-count range
//! from = 1
//! to = 50
//!
//! [network]                      # optional; the deployment under study
//! bandwidth_bps = 1e8            # each field defaults to the reference link
//! packet_size_bits = 12000
//! per_user_request_rate_rps = 417
//! server_capacity_users = 50
//! # server_capacity_rps = 20850  # defaults to rate * users
//! propagation_speed_mps = 2e8
//! cable_length_m = 90
//! queue_limit_packets = 1000
//!
//! [modes]                        # optional; see crate::model::ModelModes
//! queue_delay_mode = "service-scaled"
//!
//! [upgrade]                      # optional; see crate::scenario::UpgradePlan
//! bandwidth_bps = 1e9            # or bandwidth_factor = 10.0, not both
//! queue_scale_factor = 5.0       # default 5.0
//!
//! [criteria]                     # optional; see crate::scenario::ThresholdCriteria
//! max_total_delay_s = 0.1
//! ```
//!
//! Unknown keys anywhere in the document are rejected, which is what makes
//! command-line overrides safe: a typo cannot silently become a no-op.

pub mod csv;
pub mod plot;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{ModelModes, NetworkConfig};
use crate::scenario::{BandwidthChange, ThresholdCriteria, UpgradePlan};

/// Inclusive range of user counts a scenario sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub from: u32,
    pub to: u32,
}

/// A parsed and validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDocument {
    pub network: NetworkConfig,
    pub modes: ModelModes,
    pub upgrade: Option<UpgradePlan>,
    pub criteria: ThresholdCriteria,
    pub sweep: SweepRange,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    #[serde(default)]
    network: RawNetwork,
    #[serde(default)]
    modes: ModelModes,
    upgrade: Option<RawUpgrade>,
    #[serde(default)]
    criteria: ThresholdCriteria,
    sweep: SweepRange,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    bandwidth_bps: Option<f64>,
    packet_size_bits: Option<f64>,
    per_user_request_rate_rps: Option<f64>,
    server_capacity_rps: Option<f64>,
    server_capacity_users: Option<u32>,
    propagation_speed_mps: Option<f64>,
    cable_length_m: Option<f64>,
    queue_limit_packets: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUpgrade {
    bandwidth_bps: Option<f64>,
    bandwidth_factor: Option<f64>,
    queue_scale_factor: Option<f64>,
    server_capacity_new_rps: Option<f64>,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, Error> {
    let raw: RawDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

    let n = raw.network;
    let d = NetworkConfig::default();
    let per_user = n.per_user_request_rate_rps.unwrap_or(d.per_user_request_rate_rps);
    let users = n.server_capacity_users.unwrap_or(d.server_capacity_users);
    let network = NetworkConfig {
        bandwidth_bps: n.bandwidth_bps.unwrap_or(d.bandwidth_bps),
        packet_size_bits: n.packet_size_bits.unwrap_or(d.packet_size_bits),
        per_user_request_rate_rps: per_user,
        server_capacity_rps: n
            .server_capacity_rps
            .unwrap_or(per_user * f64::from(users)),
        server_capacity_users: users,
        propagation_speed_mps: n.propagation_speed_mps.unwrap_or(d.propagation_speed_mps),
        cable_length_m: n.cable_length_m.unwrap_or(d.cable_length_m),
        queue_limit_packets: n.queue_limit_packets.unwrap_or(d.queue_limit_packets),
    };
    network.validate()?;

    let upgrade = match raw.upgrade {
        None => None,
        Some(u) => {
            let bandwidth = match (u.bandwidth_bps, u.bandwidth_factor) {
                (Some(_), Some(_)) => {
                    return Err(Error::invalid(
                        "upgrade",
                        "bandwidth_bps and bandwidth_factor are mutually exclusive",
                    ));
                }
                (Some(b), None) => Some(BandwidthChange::Absolute(b)),
                (None, Some(f)) => Some(BandwidthChange::Factor(f)),
                (None, None) => None,
            };
            let plan = UpgradePlan {
                bandwidth,
                queue_scale_factor: u.queue_scale_factor.unwrap_or(5.0),
                server_capacity_new_rps: u.server_capacity_new_rps,
            };
            plan.validate()?;
            Some(plan)
        }
    };

    raw.criteria.validate()?;
    if raw.sweep.from > raw.sweep.to {
        return Err(Error::SweepRange {
            from: raw.sweep.from,
            to: raw.sweep.to,
        });
    }

    Ok(ScenarioDocument {
        network,
        modes: raw.modes,
        upgrade,
        criteria: raw.criteria,
        sweep: raw.sweep,
    })
}

#[derive(Serialize)]
struct OutDoc<'a> {
    network: OutNetwork,
    modes: &'a ModelModes,
    #[serde(skip_serializing_if = "Option::is_none")]
    upgrade: Option<OutUpgrade>,
    criteria: &'a ThresholdCriteria,
    sweep: &'a SweepRange,
}

#[derive(Serialize)]
struct OutNetwork {
    bandwidth_bps: f64,
    packet_size_bits: f64,
    per_user_request_rate_rps: f64,
    server_capacity_rps: f64,
    server_capacity_users: u32,
    propagation_speed_mps: f64,
    cable_length_m: f64,
    queue_limit_packets: u64,
}

#[derive(Serialize)]
struct OutUpgrade {
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth_factor: Option<f64>,
    queue_scale_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    server_capacity_new_rps: Option<f64>,
}

/// Renders a document back to TOML. Feeding the output to
/// [`parse_scenario`] reproduces the document exactly: floats are written
/// with round-trip precision.
pub fn serialize_scenario(doc: &ScenarioDocument) -> Result<String, Error> {
    let n = doc.network;
    let out = OutDoc {
        network: OutNetwork {
            bandwidth_bps: n.bandwidth_bps,
            packet_size_bits: n.packet_size_bits,
            per_user_request_rate_rps: n.per_user_request_rate_rps,
            server_capacity_rps: n.server_capacity_rps,
            server_capacity_users: n.server_capacity_users,
            propagation_speed_mps: n.propagation_speed_mps,
            cable_length_m: n.cable_length_m,
            queue_limit_packets: n.queue_limit_packets,
        },
        modes: &doc.modes,
        upgrade: doc.upgrade.map(|u| OutUpgrade {
            bandwidth_bps: match u.bandwidth {
                Some(BandwidthChange::Absolute(b)) => Some(b),
                _ => None,
            },
            bandwidth_factor: match u.bandwidth {
                Some(BandwidthChange::Factor(f)) => Some(f),
                _ => None,
            },
            queue_scale_factor: u.queue_scale_factor,
            server_capacity_new_rps: u.server_capacity_new_rps,
        }),
        criteria: &doc.criteria,
        sweep: &doc.sweep,
    };
    toml::to_string(&out).map_err(|e| Error::Parse(format!("cannot serialize scenario: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProcessingMode, QueueDelayMode, ThroughputMode};
    use proptest::prelude::*;

    const REFERENCE: &str = r#"
[network]
bandwidth_bps = 1e8
packet_size_bits = 12000
per_user_request_rate_rps = 417
server_capacity_users = 50
propagation_speed_mps = 2e8
cable_length_m = 90
queue_limit_packets = 1000

[sweep]
from = 1
to = 50
"#;

    #[test]
    fn minimal_document_fills_in_defaults() {
        let doc = parse_scenario(REFERENCE).unwrap();
        assert_eq!(doc.network, NetworkConfig::default());
        assert_eq!(doc.modes, ModelModes::default());
        assert_eq!(doc.upgrade, None);
        assert_eq!(doc.criteria, ThresholdCriteria::default());
        assert_eq!(doc.sweep, SweepRange { from: 1, to: 50 });
    }

    #[test]
    fn capacity_defaults_to_rate_times_users() {
        let doc = parse_scenario(REFERENCE).unwrap();
        assert_eq!(doc.network.server_capacity_rps, 20_850.0);

        let explicit = REFERENCE.replace(
            "server_capacity_users = 50",
            "server_capacity_users = 50\nserver_capacity_rps = 30000",
        );
        let doc = parse_scenario(&explicit).unwrap();
        assert_eq!(doc.network.server_capacity_rps, 30_000.0);
    }

    #[test]
    fn full_document_parses_every_table() {
        let text = format!(
            "{REFERENCE}
[modes]
queue_delay_mode = \"literal-seconds\"
processing_mode = \"disabled\"
throughput_mode = \"carried-capped\"

[upgrade]
bandwidth_factor = 10.0
server_capacity_new_rps = 41700

[criteria]
max_total_delay_s = 0.25
min_per_user_throughput_bps = 1e6
max_utilization_pct = 80.0
"
        );
        let doc = parse_scenario(&text).unwrap();
        assert_eq!(doc.modes.queue_delay_mode, QueueDelayMode::LiteralSeconds);
        assert_eq!(doc.modes.processing_mode, ProcessingMode::Disabled);
        assert_eq!(doc.modes.throughput_mode, ThroughputMode::CarriedCapped);
        let plan = doc.upgrade.unwrap();
        assert_eq!(plan.bandwidth, Some(BandwidthChange::Factor(10.0)));
        assert_eq!(plan.queue_scale_factor, 5.0);
        assert_eq!(plan.server_capacity_new_rps, Some(41_700.0));
        assert_eq!(doc.criteria.max_total_delay_s, 0.25);
        assert_eq!(doc.criteria.max_utilization_pct, Some(80.0));
        assert_eq!(doc.criteria.max_queue_drops_pps, None);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let text = REFERENCE.replace("cable_length_m = 90", "cable_length_m = 90\nbogus = 1");
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("bogus"), "got: {err}");

        let err = parse_scenario(&format!("{REFERENCE}\n[nonsense]\nx = 1\n"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("nonsense"), "got: {err}");

        let err = parse_scenario(&format!("{REFERENCE}\n[modes]\nqueue_mode = \"x\"\n"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("queue_mode"), "got: {err}");
    }

    #[test]
    fn sweep_is_the_only_required_table() {
        let doc = parse_scenario("[sweep]\nfrom = 1\nto = 50\n").unwrap();
        assert_eq!(doc.network, NetworkConfig::default());
        assert_eq!(doc.modes, ModelModes::default());
        assert_eq!(doc.upgrade, None);

        let err = parse_scenario("").unwrap_err().to_string();
        assert!(err.contains("sweep"), "got: {err}");

        let err = parse_scenario("[network]\nbandwidth_bps = 1e8\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("sweep"), "got: {err}");
    }

    #[test]
    fn partial_network_table_keeps_other_defaults() {
        let text = "[network]\nbandwidth_bps = 1e9\n\n[sweep]\nfrom = 1\nto = 50\n";
        let doc = parse_scenario(text).unwrap();
        assert_eq!(doc.network.bandwidth_bps, 1e9);
        assert_eq!(doc.network.packet_size_bits, 12_000.0);
        assert_eq!(doc.network.server_capacity_rps, 20_850.0);
        assert_eq!(doc.network.queue_limit_packets, 1000);
    }

    #[test]
    fn conflicting_bandwidth_forms_are_rejected() {
        let text = format!(
            "{REFERENCE}
[upgrade]
bandwidth_bps = 1e9
bandwidth_factor = 10.0
"
        );
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("mutually exclusive"), "got: {err}");
    }

    #[test]
    fn semantic_errors_surface_from_parsing() {
        let zero_bw = REFERENCE.replace("bandwidth_bps = 1e8", "bandwidth_bps = 0");
        let err = parse_scenario(&zero_bw).unwrap_err().to_string();
        assert!(err.contains("network.bandwidth_bps"), "got: {err}");

        let reversed = REFERENCE.replace("from = 1", "from = 60");
        let err = parse_scenario(&reversed).unwrap_err();
        assert!(matches!(err, Error::SweepRange { from: 60, to: 50 }));
    }

    #[test]
    fn parse_errors_carry_position_information() {
        let err = parse_scenario("[network\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "got: {err}");
    }

    #[test]
    fn reference_document_round_trips() {
        let mut doc = parse_scenario(REFERENCE).unwrap();
        doc.upgrade = Some(UpgradePlan {
            bandwidth: Some(BandwidthChange::Absolute(1e9)),
            queue_scale_factor: 5.0,
            server_capacity_new_rps: None,
        });
        doc.modes.saturation_policy = crate::model::SaturationPolicy::Capped;
        doc.criteria.min_fraction_of_max_throughput = Some(0.5);
        let text = serialize_scenario(&doc).unwrap();
        assert_eq!(parse_scenario(&text).unwrap(), doc);
    }

    proptest! {
        #[test]
        fn serialized_documents_parse_back_identically(
            bandwidth in 1.0f64..1e12,
            rate in 0.5f64..1e6,
            users in 1u32..10_000,
            queue in 0u64..10_000_000,
            factor in proptest::option::of(0.5f64..1000.0),
            scale in 0.0f64..100.0,
            from in 0u32..100,
            len in 0u32..100,
        ) {
            let doc = ScenarioDocument {
                network: NetworkConfig {
                    bandwidth_bps: bandwidth,
                    per_user_request_rate_rps: rate,
                    server_capacity_users: users,
                    queue_limit_packets: queue,
                    ..NetworkConfig::default()
                },
                modes: ModelModes::default(),
                upgrade: factor.map(|f| UpgradePlan {
                    bandwidth: Some(BandwidthChange::Factor(f)),
                    queue_scale_factor: scale,
                    server_capacity_new_rps: None,
                }),
                criteria: ThresholdCriteria::default(),
                sweep: SweepRange { from, to: from + len },
            };
            let text = serialize_scenario(&doc).unwrap();
            prop_assert_eq!(parse_scenario(&text).unwrap(), doc);
        }
    }
}
