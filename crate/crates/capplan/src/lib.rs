//! Capacity planning for a shared access link.
//!
//! The closed-form model in [`model`] predicts delays, utilization,
//! throughput and drop rates for a pool of identical users sharing one link
//! and server. [`scenario`] layers load sweeps, upgrade plans, threshold
//! detection and baseline-versus-upgraded comparison on top. [`report`]
//! parses scenario files and renders results as CSV and SVG. [`des`] is an
//! event-driven simulator of the same queue, there to check the formulas
//! against machinery that does not share their assumptions. [`cli`] backs
//! the `capplan` binary.
//!
//! ```
//! use capplan::model::{evaluate_point, ModelModes, NetworkConfig};
//!
//! let point = evaluate_point(&NetworkConfig::default(), ModelModes::default(), 10);
//! assert_eq!(point.rho, 0.5004);
//! assert!(!point.saturated);
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod des;
pub mod error;
pub mod model;
pub mod report;
pub mod scenario;

pub use error::Error;
