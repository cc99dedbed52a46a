//! Grayscale image decoding and encoding: PNG (8/16-bit, RGB reduced to
//! luminance) and binary PGM (P5).

use crate::error::{Error, Result};
use crate::image::Image;
use std::fs;
use std::io::Read;
use std::path::Path;

/// ITU-R BT.601 luminance weights used when reducing RGB inputs.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Reduce RGB inputs to luminance; when disabled, color inputs are
    /// rejected.
    pub rgb_to_luma: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { rgb_to_luma: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    load_image_with(path, &LoadOptions::default())
}

pub fn load_image_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Image> {
    let path = path.as_ref();
    match extension(path)?.as_str() {
        "png" => load_png(path, opts),
        "pgm" => load_pgm(path),
        ext => Err(Error::format(path, format!("unsupported extension .{ext}"))),
    }
}

/// Writes `img` clamped to `[0, 1]` and quantized. PNG honors the requested
/// bit depth; PGM is always 8-bit.
pub fn save_image(path: impl AsRef<Path>, img: &Image, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    match extension(path)?.as_str() {
        "png" => save_png(path, img, depth),
        "pgm" => save_pgm(path, img),
        ext => Err(Error::format(path, format!("unsupported extension .{ext}"))),
    }
}

fn extension(path: &Path) -> Result<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| Error::format(path, "missing file extension"))
}

fn load_png(path: &Path, opts: &LoadOptions) -> Result<Image> {
    use image::DynamicImage::*;
    let decoded = image::open(path).map_err(|e| Error::format(path, e.to_string()))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let gray_err = || Error::format(path, "color input with RGB-to-luma disabled");
    let data: Vec<f64> = match decoded {
        ImageLuma8(b) => b.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        ImageLumaA8(b) => b.into_raw().chunks(2).map(|p| p[0] as f64 / 255.0).collect(),
        ImageLuma16(b) => b
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 65535.0)
            .collect(),
        ImageLumaA16(b) => b
            .into_raw()
            .chunks(2)
            .map(|p| p[0] as f64 / 65535.0)
            .collect(),
        ImageRgb8(b) if opts.rgb_to_luma => b
            .into_raw()
            .chunks(3)
            .map(|p| luma(p[0] as f64, p[1] as f64, p[2] as f64) / 255.0)
            .collect(),
        ImageRgba8(b) if opts.rgb_to_luma => b
            .into_raw()
            .chunks(4)
            .map(|p| luma(p[0] as f64, p[1] as f64, p[2] as f64) / 255.0)
            .collect(),
        ImageRgb16(b) if opts.rgb_to_luma => b
            .into_raw()
            .chunks(3)
            .map(|p| luma(p[0] as f64, p[1] as f64, p[2] as f64) / 65535.0)
            .collect(),
        ImageRgba16(b) if opts.rgb_to_luma => b
            .into_raw()
            .chunks(4)
            .map(|p| luma(p[0] as f64, p[1] as f64, p[2] as f64) / 65535.0)
            .collect(),
        ImageRgb8(_) | ImageRgba8(_) | ImageRgb16(_) | ImageRgba16(_) => return Err(gray_err()),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported pixel format {:?}", other.color()),
            ))
        }
    };
    Image::new(w, h, data)
}

fn luma(r: f64, g: f64, b: f64) -> f64 {
    LUMA[0] * r + LUMA[1] * g + LUMA[2] * b
}

fn save_png(path: &Path, img: &Image, depth: BitDepth) -> Result<()> {
    let w = img.width() as u32;
    let h = img.height() as u32;
    let result = match depth {
        BitDepth::Eight => {
            let buf: Vec<u8> = img.data().iter().map(|v| quantize(*v, 255.0) as u8).collect();
            image::GrayImage::from_raw(w, h, buf)
                .expect("buffer sized from image")
                .save_with_format(path, image::ImageFormat::Png)
        }
        BitDepth::Sixteen => {
            let buf: Vec<u16> = img
                .data()
                .iter()
                .map(|v| quantize(*v, 65535.0) as u16)
                .collect();
            image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_raw(w, h, buf)
                .expect("buffer sized from image")
                .save_with_format(path, image::ImageFormat::Png)
        }
    };
    result.map_err(|e| Error::format(path, e.to_string()))
}

fn quantize(v: f64, max: f64) -> u32 {
    (v.clamp(0.0, 1.0) * max).round() as u32
}

fn load_pgm(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;

    let magic = take_token(&bytes, &mut pos)
        .ok_or_else(|| Error::format(path, "missing PGM header"))?;
    if magic != b"P5" {
        return Err(Error::format(path, "not a binary PGM (expected P5)"));
    }
    let mut fields = [0usize; 3];
    for f in &mut fields {
        let tok = take_token(&bytes, &mut pos)
            .ok_or_else(|| Error::format(path, "truncated PGM header"))?;
        *f = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(path, "malformed PGM header field"))?;
    }
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::format(path, format!("bad PGM dimensions {w}x{h} maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from pixel data
    pos += 1;
    let wide = maxval > 255;
    let need = w * h * if wide { 2 } else { 1 };
    if bytes.len() < pos + need {
        return Err(Error::format(path, "truncated PGM pixel data"));
    }
    let data: Vec<f64> = if wide {
        bytes[pos..pos + need]
            .chunks(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64 / maxval as f64)
            .collect()
    } else {
        bytes[pos..pos + need]
            .iter()
            .map(|&v| v as f64 / maxval as f64)
            .collect()
    };
    Image::new(w, h, data)
}

/// Next whitespace-delimited token, skipping `#` comments.
fn take_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn save_pgm(path: &Path, img: &Image) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|v| quantize(*v, 255.0) as u8));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
