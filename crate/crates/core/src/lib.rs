//! Core building blocks for detecting distribution shift between image
//! datasets and for assembling training sets with controlled composition.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation over
//! in-memory values. File formats, serialization and the command line live in
//! the companion `driftgauge` crate.
//!
//! Modules:
//! - [`types`]: dataset manifests (items, boxes, time-of-day tags).
//! - [`matrix`]: dense row-major feature matrices.
//! - [`rng`]: counter-based deterministic RNG and subsampling.
//! - [`reduce`]: PCA fitting, projection and reconstruction.
//! - [`mmd`]: RBF-kernel maximum mean discrepancy and permutation tests.
//! - [`protocol`]: repeated-subsampling shift detection and label-shift tests.
//! - [`partition`]: ratio-controlled dataset assembly and augmentation unions.
//! - [`eval`]: IoU and mAP@IoU detection quality scoring.
//! - [`synth`]: synthetic feature/manifest generators for calibration.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod matrix;
pub mod mmd;
pub mod partition;
pub mod protocol;
pub mod reduce;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod types;

pub use error::CoreError;
pub use matrix::FeatureMatrix;
pub use rng::RngSeed;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, CoreError>;
