//! Simulation library for CSI-based radiometric fingerprinting, keyed phase
//! obfuscation of OFDM pilots, the averaging attack against naive
//! obfuscation, and closed-form estimator analysis.

pub mod analysis;
pub mod angle;
pub mod attack;
pub mod error;
pub mod experiments;
pub mod fingerprint;
pub mod keystream;
pub mod obfuscation;
pub mod phy;
pub mod protocol;

pub use error::{Error, Result};
