//! Image quality metrics: PSNR, RMSE, and SSIM.

use crate::error::{Error, Result};
use crate::image::Image;
use serde::{Deserialize, Serialize};

/// SSIM window side (standard 11x11 Gaussian).
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

/// One row of quality numbers against a reference image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QualityReport {
    pub psnr_db: f64,
    pub rmse: f64,
    pub ssim: f64,
    pub peak: f64,
}

impl QualityReport {
    pub fn compute(truth: &Image, candidate: &Image, peak: f64) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr(truth, candidate, peak)?,
            rmse: rmse(truth, candidate)?,
            ssim: ssim(truth, candidate, peak)?,
            peak,
        })
    }
}

fn check_dims(a: &Image, b: &Image) -> Result<()> {
    if !a.same_dims(b) {
        return Err(Error::Dimension(format!(
            "metric inputs differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    check_dims(a, b)?;
    let n = a.data().len() as f64;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n)
}

pub fn rmse(a: &Image, b: &Image) -> Result<f64> {
    Ok(mse(a, b)?.sqrt())
}

/// Peak signal-to-noise ratio in dB. Identical images report +infinity.
pub fn psnr(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    if peak <= 0.0 {
        return Err(Error::Config(format!("peak must be positive, got {peak}")));
    }
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

fn gaussian_window() -> Vec<f64> {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    for r in 0..SSIM_WINDOW {
        for col in 0..SSIM_WINDOW {
            let dr = r as f64 - c;
            let dc = col as f64 - c;
            w.push((-(dr * dr + dc * dc) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp());
        }
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5) and the
/// standard constants C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.
///
/// Images smaller than the window fall back to a single uniform window over
/// the whole image (logged as a warning).
pub fn ssim(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    check_dims(a, b)?;
    if peak <= 0.0 {
        return Err(Error::Config(format!("peak must be positive, got {peak}")));
    }
    let c1 = (0.01 * peak) * (0.01 * peak);
    let c2 = (0.03 * peak) * (0.03 * peak);

    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        log::warn!(
            "ssim: image {}x{} smaller than {} window, using one global window",
            a.width(),
            a.height(),
            SSIM_WINDOW
        );
        let n = a.data().len() as f64;
        let w: Vec<f64> = vec![1.0 / n; a.data().len()];
        return Ok(local_ssim(a.data(), b.data(), &w, c1, c2));
    }

    let window = gaussian_window();
    let mut total = 0.0;
    let mut count = 0usize;
    let w = a.width();
    for r0 in 0..=(a.height() - SSIM_WINDOW) {
        for c0 in 0..=(a.width() - SSIM_WINDOW) {
            let mut pa = Vec::with_capacity(window.len());
            let mut pb = Vec::with_capacity(window.len());
            for r in 0..SSIM_WINDOW {
                let base = (r0 + r) * w + c0;
                pa.extend_from_slice(&a.data()[base..base + SSIM_WINDOW]);
                pb.extend_from_slice(&b.data()[base..base + SSIM_WINDOW]);
            }
            total += local_ssim(&pa, &pb, &window, c1, c2);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

fn local_ssim(a: &[f64], b: &[f64], w: &[f64], c1: f64, c2: f64) -> f64 {
    let mut mu_a = 0.0;
    let mut mu_b = 0.0;
    for ((x, y), wi) in a.iter().zip(b).zip(w) {
        mu_a += wi * x;
        mu_b += wi * y;
    }
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut cov = 0.0;
    for ((x, y), wi) in a.iter().zip(b).zip(w) {
        var_a += wi * (x - mu_a) * (x - mu_a);
        var_b += wi * (y - mu_b) * (y - mu_b);
        cov += wi * (x - mu_a) * (y - mu_b);
    }
    ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
}

/// Per-pixel absolute difference.
pub fn error_map(a: &Image, b: &Image) -> Result<Image> {
    check_dims(a, b)?;
    let data = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .collect();
    Image::new(a.width(), a.height(), data)
}

/// Error map rescaled to `[0, 1]` against a fixed maximum (clamping above),
/// ready for 8-bit export.
pub fn error_map_visual(a: &Image, b: &Image, max_error: f64) -> Result<Image> {
    if max_error <= 0.0 {
        return Err(Error::Config(format!(
            "max_error must be positive, got {max_error}"
        )));
    }
    let map = error_map(a, b)?;
    let data = map
        .data()
        .iter()
        .map(|v| (v / max_error).min(1.0))
        .collect();
    Image::new(a.width(), a.height(), data)
}
