//! Patch extraction and overlap-averaging aggregation.
//!
//! Patches are square, vectorized in row-major pixel order, and stored as
//! columns of an `n x P` matrix. Geometry keeps the top-left origin of every
//! patch so an image can be re-assembled by averaging overlapping
//! contributions per pixel.

use crate::error::{Error, Result};
use crate::image::Image;
use ndarray::Array2;

/// Placement of square patches over an image.
///
/// Origins are row-major and deterministic. When the last stride step does
/// not land exactly on the image border, a final clamped origin is appended
/// so every pixel is covered by at least one patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchGeometry {
    patch_side: usize,
    stride: usize,
    image_width: usize,
    image_height: usize,
    origins: Vec<(usize, usize)>,
}

fn axis_origins(size: usize, patch_side: usize, stride: usize) -> Vec<usize> {
    let last = size - patch_side;
    let mut origins: Vec<usize> = (0..=last).step_by(stride).collect();
    if *origins.last().unwrap() != last {
        origins.push(last);
    }
    origins
}

impl PatchGeometry {
    pub fn new(
        image_width: usize,
        image_height: usize,
        patch_side: usize,
        stride: usize,
    ) -> Result<Self> {
        if patch_side == 0 || stride == 0 {
            return Err(Error::Config(
                "patch_side and stride must be at least 1".into(),
            ));
        }
        if patch_side > image_width || patch_side > image_height {
            return Err(Error::Dimension(format!(
                "patch side {} exceeds image {}x{}",
                patch_side, image_width, image_height
            )));
        }
        let rows = axis_origins(image_height, patch_side, stride);
        let cols = axis_origins(image_width, patch_side, stride);
        let mut origins = Vec::with_capacity(rows.len() * cols.len());
        for &r in &rows {
            for &c in &cols {
                origins.push((r, c));
            }
        }
        Ok(Self {
            patch_side,
            stride,
            image_width,
            image_height,
            origins,
        })
    }

    pub fn patch_side(&self) -> usize {
        self.patch_side
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn image_width(&self) -> usize {
        self.image_width
    }

    pub fn image_height(&self) -> usize {
        self.image_height
    }

    /// Patch dimension n = patch_side².
    pub fn patch_len(&self) -> usize {
        self.patch_side * self.patch_side
    }

    pub fn patch_count(&self) -> usize {
        self.origins.len()
    }

    pub fn origins(&self) -> &[(usize, usize)] {
        &self.origins
    }
}

/// Vectorized patches plus the geometry needed to re-embed them.
#[derive(Debug, Clone)]
pub struct PatchSet {
    geometry: PatchGeometry,
    /// n x P, one column per patch.
    patches: Array2<f64>,
    /// Per-patch DC values removed at extraction time, if any.
    means: Option<Vec<f64>>,
}

impl PatchSet {
    pub fn new(
        geometry: PatchGeometry,
        patches: Array2<f64>,
        means: Option<Vec<f64>>,
    ) -> Result<Self> {
        if patches.nrows() != geometry.patch_len() || patches.ncols() != geometry.patch_count() {
            return Err(Error::Dimension(format!(
                "patch matrix {}x{} does not match geometry ({} pixels, {} patches)",
                patches.nrows(),
                patches.ncols(),
                geometry.patch_len(),
                geometry.patch_count()
            )));
        }
        if let Some(m) = &means {
            if m.len() != geometry.patch_count() {
                return Err(Error::Dimension(format!(
                    "means length {} != patch count {}",
                    m.len(),
                    geometry.patch_count()
                )));
            }
        }
        Ok(Self {
            geometry,
            patches,
            means,
        })
    }

    pub fn geometry(&self) -> &PatchGeometry {
        &self.geometry
    }

    pub fn patches(&self) -> &Array2<f64> {
        &self.patches
    }

    pub fn patches_mut(&mut self) -> &mut Array2<f64> {
        &mut self.patches
    }

    pub fn means(&self) -> Option<&[f64]> {
        self.means.as_deref()
    }

    /// Replaces the patch columns, keeping geometry and means.
    pub fn with_patches(&self, patches: Array2<f64>) -> Result<Self> {
        Self::new(self.geometry.clone(), patches, self.means.clone())
    }
}

/// Extracts every patch under the geometry as a column in origin order.
///
/// With `remove_dc`, each column's mean is subtracted and recorded so
/// aggregation can restore it.
pub fn extract_patches(
    img: &Image,
    patch_side: usize,
    stride: usize,
    remove_dc: bool,
) -> Result<PatchSet> {
    let geometry = PatchGeometry::new(img.width(), img.height(), patch_side, stride)?;
    extract_with_geometry(img, geometry, remove_dc)
}

pub fn extract_with_geometry(
    img: &Image,
    geometry: PatchGeometry,
    remove_dc: bool,
) -> Result<PatchSet> {
    if geometry.image_width() != img.width() || geometry.image_height() != img.height() {
        return Err(Error::Dimension(format!(
            "geometry is for {}x{}, image is {}x{}",
            geometry.image_width(),
            geometry.image_height(),
            img.width(),
            img.height()
        )));
    }
    let n = geometry.patch_len();
    let p = geometry.patch_count();
    let side = geometry.patch_side();
    let mut patches = Array2::zeros((n, p));
    let mut means = remove_dc.then(|| Vec::with_capacity(p));
    for (idx, &(r0, c0)) in geometry.origins().iter().enumerate() {
        let mut k = 0;
        for pr in 0..side {
            for pc in 0..side {
                patches[(k, idx)] = img.get(r0 + pr, c0 + pc);
                k += 1;
            }
        }
        if let Some(means) = means.as_mut() {
            let mut col = patches.column_mut(idx);
            let mean = col.sum() / n as f64;
            col.mapv_inplace(|v| v - mean);
            means.push(mean);
        }
    }
    PatchSet::new(geometry, patches, means)
}

/// Per-pixel count of covering patches, i.e. the diagonal of the sum of
/// patch-embedding normal matrices. Always >= 1 for a valid geometry.
pub fn coverage_counts(geom: &PatchGeometry) -> Image {
    let mut counts = vec![0.0; geom.image_width() * geom.image_height()];
    let side = geom.patch_side();
    let w = geom.image_width();
    for &(r0, c0) in geom.origins() {
        for pr in 0..side {
            for pc in 0..side {
                counts[(r0 + pr) * w + (c0 + pc)] += 1.0;
            }
        }
    }
    Image::from_raw(geom.image_width(), geom.image_height(), counts)
}

/// Re-assembles an image by averaging overlapping patch contributions.
///
/// With `add_dc`, per-patch DC values recorded at extraction are restored
/// before summation.
pub fn aggregate_patches(ps: &PatchSet, add_dc: bool) -> Result<Image> {
    let (sum, counts) = accumulate(ps, add_dc)?;
    let data = sum
        .data()
        .iter()
        .zip(counts.data())
        .map(|(s, c)| s / c)
        .collect();
    Ok(Image::from_raw(sum.width(), sum.height(), data))
}

/// Per-pixel sum of patch contributions and coverage counts, before division.
/// Shared by plain aggregation and the fidelity-weighted combine.
pub(crate) fn accumulate(ps: &PatchSet, add_dc: bool) -> Result<(Image, Image)> {
    let geom = ps.geometry();
    let side = geom.patch_side();
    let w = geom.image_width();
    let mut sum = vec![0.0; w * geom.image_height()];
    for (idx, &(r0, c0)) in geom.origins().iter().enumerate() {
        let col = ps.patches().column(idx);
        let dc = match (add_dc, ps.means()) {
            (true, Some(m)) => m[idx],
            _ => 0.0,
        };
        let mut k = 0;
        for pr in 0..side {
            for pc in 0..side {
                sum[(r0 + pr) * w + (c0 + pc)] += col[k] + dc;
                k += 1;
            }
        }
    }
    let counts = coverage_counts(geom);
    Ok((
        Image::new(w, geom.image_height(), sum)?,
        counts,
    ))
}
