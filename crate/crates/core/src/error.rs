use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A single field failed validation. `field` is the dotted config path or
    /// the parameter name.
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error(
        "cavity bandwidth mismatch: derived {derived_hz:.6e} Hz vs supplied {supplied_hz:.6e} Hz \
         (relative difference {relative:.3} > 5%)"
    )]
    BandwidthMismatch {
        derived_hz: f64,
        supplied_hz: f64,
        relative: f64,
    },

    #[error("mode frequencies of the {mirror} mirror are not strictly increasing")]
    UnorderedModes { mirror: &'static str },

    #[error("no interior minimum in [{lo_hz:.3}, {hi_hz:.3}] Hz: minimum sits at the {edge} edge")]
    NoInteriorMinimum {
        lo_hz: f64,
        hi_hz: f64,
        edge: &'static str,
    },

    #[error("susceptibility vanishes at {omega:.6e} rad/s")]
    SingularSusceptibility { omega: f64 },

    #[error("span [{lo_hz:.3}, {hi_hz:.3}] Hz lies outside the modeled band (0, {limit_hz:.3}] Hz")]
    SpanOutsideBand { lo_hz: f64, hi_hz: f64, limit_hz: f64 },

    #[error("doublet parameters are not identifiable from this trace (normal-equation condition {condition:.3e})")]
    NonIdentifiable { condition: f64 },

    #[error("traces are not on a common frequency grid")]
    GridMismatch,

    #[error("trace is empty")]
    EmptyTrace,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Whether this error is a cross-field physical consistency failure
    /// rather than a malformed single input.
    pub fn is_physics_violation(&self) -> bool {
        matches!(
            self,
            Error::BandwidthMismatch { .. }
                | Error::UnorderedModes { .. }
                | Error::SpanOutsideBand { .. }
                | Error::SingularSusceptibility { .. }
        )
    }
}
