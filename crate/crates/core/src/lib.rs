//! Continuous-variable quantum optics: Gaussian states as mean vectors and
//! covariance matrices, truncated Fock-space states, homodyne measurement and
//! tomography, device models for parametric squeezers, and protocol pipelines
//! (teleportation, squeezed phase readout, photon-subtraction state engineering).
//!
//! Quadratures satisfy `[X, P] = i` and the vacuum has variance 1/2. The
//! Gaussian and Fock engines are generic over the scalar type; the aliases
//! below fix it to `f64` (and `f32` where the engine supports it).

pub mod devices;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod homodyne;
pub mod linalg;
pub mod protocols;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GaussianState = gaussian::GaussianState<f64>;
pub type GaussianStateF32 = gaussian::GaussianState<f32>;
pub type SymplecticOp = gaussian::SymplecticOp<f64>;
pub type FockState = fock::FockState<f64>;
pub type FockStateF32 = fock::FockState<f32>;
pub type DensityMatrix = fock::DensityMatrix<f64>;
pub type Matrix = linalg::Matrix<f64>;

pub use homodyne::{NoiseSpectrum, PhotocurrentTrace, QuadratureDataset};
pub use protocols::{PhaseEstimate, TeleportResult};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
