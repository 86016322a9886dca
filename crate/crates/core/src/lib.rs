//! UPC-A bar code scanning toolkit.
//!
//! Encodes 12-digit UPC-A codes into their 95-bar binary form and the
//! 123-entry sparse dictionary representation, simulates laser-scanner
//! measurements through a Gaussian blur forward model, decodes noisy scans
//! with a greedy block algorithm, and computes the diagnostics that govern
//! when recovery is guaranteed.

pub mod analysis;
pub mod decoder;
pub mod error;
pub mod forward;
pub mod noise;
pub mod phase;
pub mod signal_io;
pub mod special;
pub mod symbology;

pub use error::{Error, Result};
pub use forward::{BlurMatrix, ForwardMap, GaussianParams, SampleGrid, ScanSignal};
pub use symbology::{BinaryBarcode, DigitString, Dictionary, SparseCode};
