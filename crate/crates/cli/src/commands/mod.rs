//! One module per subcommand.

pub mod norm;
pub mod report;
pub mod transform;
pub mod verify;

use tfzak_core::Error;

use crate::Exit;

/// Errors caused by the inputs a user chose rather than by the numerics.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::DimensionMismatch(_)
            | Error::UnsupportedDimension(_)
            | Error::ExponentHypothesis(_)
            | Error::SingularBasis(_)
            | Error::WeightBound(_)
            | Error::Serialization(_)
    )
}

pub fn core_exit(context: &str, e: Error) -> Exit {
    Exit::usage(format!("{context}: {e}"))
}
