//! Robust adaptive beamforming through covariance reconstruction.
//!
//! The interference-plus-noise covariance is rebuilt from a maximum-entropy
//! spatial spectrum, with each interferer's power and steering vector taken
//! from the dominant eigenpair (power method) of a narrow-sector spectral sum.
//! The desired signal's steering vector comes from a convex spectrum-matching
//! program over the PSD cone. Baseline beamformers and a seeded Monte-Carlo
//! harness round out the crate.

pub mod array;
pub mod beamforming;
pub mod error;
pub mod harness;
pub mod inc;
pub mod numerics;
pub mod spectrum;
pub mod spectrum_match;

pub use error::{Error, Result};
pub use numerics::{ComplexVector, HermitianMatrix};
