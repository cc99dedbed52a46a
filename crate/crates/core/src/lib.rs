//! Coupled dictionary learning for multimodal image restoration.
//!
//! A registered clean image of one modality guides the restoration of
//! another: joint sparse codes over learned coupled dictionaries separate
//! the structure the modalities share from what is specific to each, which
//! lets guidance detail help without leaking foreign texture into the
//! target. Denoising, super-resolution, and inpainting pipelines are built
//! on the same patch, pursuit, and learning machinery.

pub mod dictlearn;
pub mod error;
pub mod image;
pub mod io;
pub mod metrics;
pub mod patch;
pub mod resize;
pub mod sparse;
pub mod synth;
pub mod tasks;

pub use error::{Error, Result};
pub use image::Image;
