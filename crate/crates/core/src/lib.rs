//! Numerical library behind the `photon-box` CLI.
//!
//! Each module covers one quantitative piece of the photon-box time-energy argument:
//!
//! - [`spectral`]: spectral amplitudes, Fourier time profiles and the bound Δω·Δt ≥ 1/2
//! - [`entangled`]: the box-photon entangled state, finite-resolution collapse and no-signaling
//! - [`epr`]: the two-branch EPR momentum state and Gaussian wavepacket regularization
//! - [`chsh`]: singlet correlations and the CHSH quantity
//! - [`robertson`]: Robertson inequality, Heisenberg rate and the clock time-energy bound
//! - [`bohr`]: the semiclassical weighing chain
//! - [`harness`]: the command-line front end
//!
//! Units are ħ = 1 throughout, except in [`bohr`] which carries explicit constants.

pub mod bohr;
pub mod chsh;
pub mod entangled;
pub mod epr;
pub mod error;
pub mod extended;
pub mod harness;
pub mod robertson;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use extended::Extended;
