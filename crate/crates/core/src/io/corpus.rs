//! Paired-corpus manifests and training-matrix ingestion: seeded uniform
//! patch sampling from registered image pairs, stacked per layout.

use crate::dictlearn::DictLayout;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::io::images::load_image;
use crate::resize::upscale;
use crate::tasks::degrade_for_sr;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairEntry {
    pub target: PathBuf,
    pub guidance: PathBuf,
}

/// Training-corpus description: registered (target, guidance) pairs plus
/// sampling parameters. An optional held-out test list is validated to be
/// disjoint from the training pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairedCorpusManifest {
    pub pairs: Vec<PairEntry>,
    pub patch_side: usize,
    pub samples_per_pair: usize,
    pub seed: u64,
    #[serde(default)]
    pub test_pairs: Vec<PairEntry>,
}

impl PairedCorpusManifest {
    pub fn validate(&self) -> Result<()> {
        if self.patch_side == 0 {
            return Err(Error::Config("patch_side must be >= 1".into()));
        }
        let mut seen: HashSet<&Path> = HashSet::new();
        for e in self.pairs.iter().chain(&self.test_pairs) {
            for p in [&e.target, &e.guidance] {
                if !seen.insert(p.as_path()) {
                    return Err(Error::Config(format!(
                        "path {} appears more than once across train/test groups",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<PairedCorpusManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: PairedCorpusManifest =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    manifest.validate()?;
    Ok(manifest)
}

/// Samples `samples_per_pair` stacked patch signals from every training
/// pair. Denoise layouts stack `[target; guidance]` (2n rows); SuperRes
/// layouts degrade the target by `scale`, re-upsample it, and stack
/// `[target; upsampled-LR; guidance]` (3n rows). Per-block DC is removed
/// when `remove_dc` is set. Deterministic given the manifest seed.
pub fn ingest_corpus(
    manifest: &PairedCorpusManifest,
    layout: DictLayout,
    scale: Option<usize>,
    remove_dc: bool,
) -> Result<Array2<f64>> {
    manifest.validate()?;
    let p = manifest.patch_side;
    let n = p * p;
    let rows = layout.stacked_rows(n);
    let total = manifest.pairs.len() * manifest.samples_per_pair;
    let mut out = Array2::zeros((rows, total));
    let mut rng = ChaCha8Rng::seed_from_u64(manifest.seed);
    let mut col = 0usize;

    for entry in &manifest.pairs {
        let ingest_err = |message: String| Error::Ingest {
            target: entry.target.clone(),
            guidance: entry.guidance.clone(),
            message,
        };
        let target = load_image(&entry.target)?;
        let guidance = load_image(&entry.guidance)?;
        if !target.same_dims(&guidance) {
            return Err(ingest_err(format!(
                "unregistered pair: {}x{} vs {}x{}",
                target.width(),
                target.height(),
                guidance.width(),
                guidance.height()
            )));
        }

        // SuperRes training needs the degraded-and-upsampled companion; the
        // pair is cropped to the degradation's multiple-of-scale footprint.
        let (target, guidance, lr_up) = match layout {
            DictLayout::Denoise => (target, guidance, None),
            DictLayout::SuperRes => {
                let scale = scale.ok_or_else(|| {
                    Error::Config("superres ingestion requires a scale factor".into())
                })?;
                let lr = degrade_for_sr(&target, scale).map_err(|e| ingest_err(e.to_string()))?;
                let up = upscale(&lr, scale);
                let (w, h) = (up.width(), up.height());
                let crop = |img: &Image| -> Result<Image> {
                    let mut data = Vec::with_capacity(w * h);
                    for r in 0..h {
                        for c in 0..w {
                            data.push(img.get(r, c));
                        }
                    }
                    Image::new(w, h, data)
                };
                (crop(&target)?, crop(&guidance)?, Some(up))
            }
        };

        if target.width() < p || target.height() < p {
            return Err(ingest_err(format!(
                "images {}x{} smaller than patch side {p}",
                target.width(),
                target.height()
            )));
        }
        let max_r = target.height() - p;
        let max_c = target.width() - p;
        for _ in 0..manifest.samples_per_pair {
            let r0 = rng.gen_range(0..=max_r);
            let c0 = rng.gen_range(0..=max_c);
            let mut write_block = |block: usize, img: &Image| {
                let base = block * n;
                let mut mean = 0.0;
                for pr in 0..p {
                    for pc in 0..p {
                        let v = img.get(r0 + pr, c0 + pc);
                        out[(base + pr * p + pc, col)] = v;
                        mean += v;
                    }
                }
                if remove_dc {
                    mean /= n as f64;
                    for i in 0..n {
                        out[(base + i, col)] -= mean;
                    }
                }
            };
            match layout {
                DictLayout::Denoise => {
                    write_block(0, &target);
                    write_block(1, &guidance);
                }
                DictLayout::SuperRes => {
                    write_block(0, &target);
                    write_block(1, lr_up.as_ref().unwrap());
                    write_block(2, &guidance);
                }
            }
            col += 1;
        }
    }
    Ok(out)
}
