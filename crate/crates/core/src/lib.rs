//! MAC-layer WiFi traffic fingerprinting pipeline.
//!
//! From 802.11 frame metadata to per-burst app and action predictions:
//! capture ingestion, user-activity trace segmentation, multi-level feature
//! extraction, a small self-contained temporal-convolution classifier with
//! self-attention, open-set recalibration over Weibull tail models, traffic
//! annotation from interaction logs, and a seeded synthetic traffic
//! generator for end-to-end evaluation.
//!
//! All numeric stages are generic over [`Scalar`] (`f32` or `f64`); training
//! uses `f64` so finite-difference gradient checks are meaningful.

pub mod error;
pub mod features;
pub mod mac;
pub mod scalar;
pub mod trace;
pub mod wire;

pub use error::{Error, Result};
pub use mac::MacAddr;
pub use scalar::Scalar;
