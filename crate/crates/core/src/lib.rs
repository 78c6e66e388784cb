//! Numerical time-frequency analysis on lattices.
//!
//! The crate provides ordered bases and their duals, sampled fields, the
//! Fourier, short-time Fourier and Zak transforms, mixed quasi-norms of
//! Lebesgue, Wiener amalgam and modulation type, and a harness of checks that
//! compares such norms across families of test signals.

pub mod error;
pub mod experiments;
mod fft;
pub mod field;
pub mod geometry;
pub mod io;
pub mod norms;
pub mod transforms;

pub use error::{Error, Result};
pub use field::{gaussian_window, sample, Axis, AxisKind, Exponent, MixedExponent, SampledField, Weight, Window};
pub use geometry::{dual_basis, product_basis, LatticePatch, OrderedBasis, PhaseSplit, PhaseSplitDescriptor};
pub use num_complex::Complex64;
