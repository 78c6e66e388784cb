//! Fourier, short-time Fourier and Zak transforms.

mod convolution;
mod fourier;
mod periodic;
pub(crate) mod stft;
pub(crate) mod zak;
mod zak_stft;

pub use convolution::{semidiscrete_convolve, LatticeSequence};
pub use fourier::fourier;
pub use periodic::{fourier_coefficients, synthesize_periodic, FourierCoefficients};
pub use stft::{stft, stft_with, StftOptions, WINDOW_MASS_LIMIT};
pub use zak::{finite_zak, inverse_zak, zak, zak_with, ZakField, ZakOptions};
pub use zak_stft::{partial_stft_zak, stft_of_zak, zak_stft_norms, ZakStftField, ZakStftOptions};
