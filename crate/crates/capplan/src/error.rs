use thiserror::Error;

/// Failure modes surfaced by the planning APIs.
///
/// Model evaluation itself is total over validated inputs and never fails;
/// errors arise at the boundaries, when configurations, plans, scenario
/// documents, or output requests are malformed.
#[derive(Debug, Error)]
pub enum Error {
    /// A field is outside its domain. `field` names the offender using the
    /// same spelling the scenario format uses.
    #[error("invalid {field}: {reason}")]
    InvalidField { field: String, reason: String },

    /// A sweep was requested with a reversed range.
    #[error("invalid sweep range: from={from} exceeds to={to}")]
    SweepRange { from: u32, to: u32 },

    /// An operation that needs sweep points received none.
    #[error("sweep contains no points")]
    EmptySweep,

    /// Two sweeps cover different user counts and cannot be paired up.
    #[error("sweep ranges differ: {left} versus {right}")]
    SweepMismatch { left: String, right: String },

    /// The scenario text is not well formed. The message carries the line
    /// and column reported by the parser.
    #[error("scenario parse error: {0}")]
    Parse(String),

    /// A plot was requested for a column that does not exist.
    #[error("unknown metric {given:?}; valid metrics are {valid}")]
    UnknownMetric { given: String, valid: String },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
