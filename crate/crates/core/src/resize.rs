//! Separable bicubic resampling with anti-aliasing on downscale.
//!
//! Uses the Keys kernel (a = -0.5). When shrinking, the kernel is widened by
//! the scale ratio so the pass low-pass filters before decimating, matching
//! the conventional anti-aliased resize. Borders replicate; weights are
//! normalized so constant images are preserved exactly.

use crate::image::Image;

fn keys_kernel(t: f64) -> f64 {
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
    } else {
        0.0
    }
}

/// Precomputed taps for one output coordinate along one axis.
struct Taps {
    start: usize,
    weights: Vec<f64>,
}

fn axis_taps(in_size: usize, out_size: usize) -> Vec<Taps> {
    let ratio = in_size as f64 / out_size as f64;
    // Widen the kernel when shrinking so it low-passes first.
    let width = ratio.max(1.0);
    let support = 2.0 * width;
    (0..out_size)
        .map(|o| {
            let center = (o as f64 + 0.5) * ratio - 0.5;
            let lo = (center - support).ceil() as isize;
            let hi = (center + support).floor() as isize;
            let mut weights = Vec::with_capacity((hi - lo + 1) as usize);
            let mut start = None;
            let mut sum = 0.0;
            for i in lo..=hi {
                let w = keys_kernel((i as f64 - center) / width);
                if w == 0.0 && start.is_none() {
                    continue;
                }
                let clamped = i.clamp(0, in_size as isize - 1) as usize;
                if start.is_none() {
                    start = Some(clamped);
                }
                weights.push((clamped, w));
                sum += w;
            }
            // Merge clamped duplicates into a dense run and normalize.
            let start = start.unwrap_or(0);
            let end = weights.last().map(|&(i, _)| i).unwrap_or(start);
            let mut dense = vec![0.0; end - start + 1];
            for (i, w) in weights {
                dense[i - start] += w / sum;
            }
            Taps {
                start,
                weights: dense,
            }
        })
        .collect()
}

fn resample_rows(data: &[f64], in_w: usize, h: usize, taps: &[Taps]) -> Vec<f64> {
    let out_w = taps.len();
    let mut out = vec![0.0; out_w * h];
    for r in 0..h {
        let row = &data[r * in_w..(r + 1) * in_w];
        for (o, t) in taps.iter().enumerate() {
            let mut acc = 0.0;
            for (k, w) in t.weights.iter().enumerate() {
                acc += w * row[t.start + k];
            }
            out[r * out_w + o] = acc;
        }
    }
    out
}

fn transpose(data: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            out[c * h + r] = data[r * w + c];
        }
    }
    out
}

/// Resamples `img` to `out_width` x `out_height`.
pub fn resize_bicubic(img: &Image, out_width: usize, out_height: usize) -> Image {
    assert!(out_width > 0 && out_height > 0, "output dims must be positive");
    if out_width == img.width() && out_height == img.height() {
        return img.clone();
    }
    let h_taps = axis_taps(img.width(), out_width);
    let v_taps = axis_taps(img.height(), out_height);
    // Horizontal pass, then vertical via transpose.
    let horiz = resample_rows(img.data(), img.width(), img.height(), &h_taps);
    let t = transpose(&horiz, out_width, img.height());
    let vert = resample_rows(&t, img.height(), out_width, &v_taps);
    let data = transpose(&vert, out_height, out_width);
    Image::from_raw(out_width, out_height, data)
}

/// Upscales by an integer factor.
pub fn upscale(img: &Image, factor: usize) -> Image {
    resize_bicubic(img, img.width() * factor, img.height() * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scale_is_exact() {
        let img = Image::new(4, 3, (0..12).map(|v| v as f64 / 11.0).collect()).unwrap();
        let out = resize_bicubic(&img, 4, 3);
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn constant_preserved_up_and_down() {
        let img = Image::constant(8, 8, 0.37);
        for (w, h) in [(32, 32), (2, 2), (5, 7)] {
            let out = resize_bicubic(&img, w, h);
            for v in out.data() {
                assert!((v - 0.37).abs() < 1e-12, "{v} at {w}x{h}");
            }
        }
    }

    #[test]
    fn linear_ramp_interpolates_midpoints() {
        // Bicubic reproduces linear functions away from borders.
        let img = Image::new(8, 1, (0..8).map(|v| v as f64).collect()).unwrap();
        let out = resize_bicubic(&img, 16, 1);
        // interior output sample centers fall at x = (o+0.5)/2 - 0.5
        for o in 4..12 {
            let x = (o as f64 + 0.5) * 0.5 - 0.5;
            assert!((out.data()[o] - x).abs() < 1e-10, "o={o}");
        }
    }

    #[test]
    fn downscale_averages_locally() {
        // 4x down of a half-black/half-white stripe stays within range and
        // keeps the step ordering.
        let mut img = Image::zeros(16, 16);
        for r in 0..16 {
            for c in 8..16 {
                img.set(r, c, 1.0);
            }
        }
        let out = resize_bicubic(&img, 4, 4);
        assert!(out.data()[0] < out.data()[3]);
    }
}
