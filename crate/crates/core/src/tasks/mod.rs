//! End-to-end restoration pipelines: coupled denoising, super-resolution,
//! and inpainting, plus the degradation operators used to set up
//! experiments.

mod degrade;
mod denoise;
mod inpaint;
mod superres;

pub use degrade::{add_gaussian_noise, degrade_for_sr};
pub use denoise::{denoise, solve_fidelity_combine};
pub use inpaint::{inpaint, PatchMask};
pub use superres::superresolve;

use serde::{Deserialize, Serialize};

/// Multiplier for the error-constrained stopping rule: pursuit stops once
/// the squared residual drops below C * d * sigma^2.
pub const RESIDUAL_STOP_FACTOR: f64 = 1.15;

/// Range the derived fidelity weight is clipped to.
pub const MU_CLIP: (f64, f64) = (0.05, 30.0);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenoiseConfig {
    /// Noise standard deviation in intensity units (the 0-255 CLI value
    /// divided by 255).
    pub sigma: f64,
    /// Fidelity weight toward the noisy input; derived from sigma when
    /// absent.
    pub mu: Option<f64>,
    pub patch_side: usize,
    pub stride: usize,
    pub sparsity: usize,
    /// Stop pursuit at the noise floor as well as at the sparsity budget.
    pub residual_stop: bool,
    pub remove_dc: bool,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            mu: None,
            patch_side: 8,
            stride: 1,
            sparsity: 4,
            residual_stop: true,
            remove_dc: true,
        }
    }
}

impl DenoiseConfig {
    /// The fidelity weight actually used: explicit, or n / (255 sigma)
    /// clipped to [0.05, 30].
    pub fn resolved_mu(&self, n: usize) -> f64 {
        self.mu.unwrap_or_else(|| {
            if self.sigma <= 0.0 {
                MU_CLIP.1
            } else {
                (n as f64 / (self.sigma * 255.0)).clamp(MU_CLIP.0, MU_CLIP.1)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SrConfig {
    /// Upscaling factor; 1 is accepted as the degenerate identity scale.
    pub scale: usize,
    pub patch_side: usize,
    pub stride: usize,
    pub sparsity: usize,
    pub remove_dc: bool,
}

impl Default for SrConfig {
    fn default() -> Self {
        Self {
            scale: 4,
            patch_side: 8,
            stride: 1,
            sparsity: 4,
            remove_dc: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InpaintConfig {
    pub patch_side: usize,
    pub stride: usize,
    pub sparsity: usize,
    /// Patches with fewer observed target pixels than this fraction are
    /// coded from the guidance block alone.
    pub min_observed_frac: f64,
    pub remove_dc: bool,
}

impl Default for InpaintConfig {
    fn default() -> Self {
        Self {
            patch_side: 8,
            stride: 1,
            sparsity: 4,
            min_observed_frac: 0.1,
            remove_dc: true,
        }
    }
}
