//! Fourier-domain augmentation for domain generalization.
//!
//! Images are augmented by mixing their DFT amplitude spectrum with that of
//! an image from another domain while keeping their own phase. The target
//! amplitude can first be soft-thresholded per channel, which suppresses the
//! small entries that carry background clutter. The crate also provides the
//! segmentation metrics (Hausdorff distance, average surface distance, Dice)
//! and a batch pipeline over multi-domain datasets.

pub mod augment;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod metrics;
pub mod oracle;
pub mod pipeline;
pub mod selftest;
pub mod synthetic;
pub mod types;

pub use error::{Error, Result};
pub use types::{Amplitude, AmplitudePhase, ImageTensor, SegmentationMask, Shape, Spectrum, StructureLabel, ThresholdVector};
