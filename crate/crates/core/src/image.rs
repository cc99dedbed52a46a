//! Single-channel intensity image used by every pipeline.

use crate::error::{Error, Result};

/// A 2-D grid of real-valued intensities, stored row-major.
///
/// Values are nominally in `[0, 1]` but are not clamped; operations only
/// guarantee they stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "image data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("image contains non-finite values".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col] = value;
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Scales intensities from `[0, peak]` down to `[0, 1]`.
    pub fn peak_normalize(&self, peak: f64) -> Result<Image> {
        if peak <= 0.0 {
            return Err(Error::Config(format!("peak must be positive, got {peak}")));
        }
        Ok(Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v / peak).collect(),
        })
    }

    /// Inverse of [`peak_normalize`](Self::peak_normalize).
    pub fn peak_denormalize(&self, peak: f64) -> Result<Image> {
        if peak <= 0.0 {
            return Err(Error::Config(format!("peak must be positive, got {peak}")));
        }
        Ok(Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v * peak).collect(),
        })
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }
}
