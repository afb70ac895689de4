//! Simulation of the spin-½ photon-scattering channel of a trapped ion,
//! its reconstruction by simulated state and process tomography, and the
//! derived Bloch-sphere, entropy and entanglement datasets.

pub mod analysis;
pub mod error;
pub mod quantum;
pub mod scattering;
pub mod tomography;

pub use error::{Error, Result};
