//! Sampled functions, windows, weights and exponents.

mod exponent;
mod sampled;
mod weight;
mod window;

pub use exponent::{Exponent, MixedExponent};
pub(crate) use sampled::row_major_strides;
pub use sampled::{sample, sample_in_basis, Axis, AxisKind, SampledField};
pub use weight::{check_moderate, theta_weight, ModerateReport, Weight};
pub use window::{gaussian_window, Window};
