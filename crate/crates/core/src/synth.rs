//! Desk-scale synthetic multimodal data: planted coupled dictionaries and
//! image pairs generated from them.
//!
//! Images are assembled from non-overlapping tiles, each tile an exactly
//! sparse combination of planted atoms around a mid-gray offset. The common
//! group carries most of the energy so the guidance modality genuinely
//! shares structure with the target, and atoms are zero-mean per modality
//! block so per-patch DC removal leaves the sparse structure intact.

use crate::dictlearn::{CoupledDictionary, DictLayout, Provenance};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::sparse::SparseCodeTriple;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random unit atoms on each group's allowed rows, zero-mean within every
/// modality block they touch.
pub fn planted_dictionary(
    layout: DictLayout,
    patch_side: usize,
    atoms_per_group: usize,
    seed: u64,
) -> Result<CoupledDictionary> {
    let n = patch_side * patch_side;
    let rows = layout.stacked_rows(n);
    let k = atoms_per_group;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stacked = Array2::zeros((rows, 3 * k));
    for j in 0..3 * k {
        let allowed = layout.allowed_rows(j / k, n);
        for r in allowed.clone() {
            stacked[(r, j)] = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        // zero-mean per modality block so tile DC is exactly the offset
        for b in 0..layout.modality_blocks() {
            let block = b * n..(b + 1) * n;
            if block.start >= allowed.start && block.end <= allowed.end {
                let mean: f64 =
                    block.clone().map(|r| stacked[(r, j)]).sum::<f64>() / n as f64;
                for r in block {
                    stacked[(r, j)] -= mean;
                }
            }
        }
        let norm = stacked.column(j).dot(&stacked.column(j)).sqrt();
        if norm < 1e-12 {
            return Err(Error::DegenerateAtom { index: j, norm });
        }
        stacked.column_mut(j).mapv_inplace(|v| v / norm);
    }
    CoupledDictionary::from_stacked(layout, patch_side, k, stacked, Provenance::default())
}

/// Generation parameters for a synthetic coupled pair.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub tiles_x: usize,
    pub tiles_y: usize,
    /// Atoms drawn from the common (z) group per tile.
    pub s_common: usize,
    /// Atoms drawn from the target-specific (u) group per tile.
    pub s_target: usize,
    /// Atoms drawn from the guidance-specific (v) group per tile.
    pub s_guidance: usize,
    /// Mid-gray level the sparse deviations ride on.
    pub offset: f64,
    /// Peak absolute deviation from the offset after rescaling.
    pub max_deviation: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            tiles_x: 12,
            tiles_y: 12,
            s_common: 2,
            s_target: 1,
            s_guidance: 1,
            offset: 0.5,
            max_deviation: 0.45,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn joint_sparsity(&self) -> usize {
        self.s_common + self.s_target + self.s_guidance
    }
}

/// A generated pair with its ground-truth codes (one per tile, row-major
/// tile order, already rescaled to the emitted intensities).
#[derive(Debug, Clone)]
pub struct SynthPair {
    pub target: Image,
    pub guidance: Image,
    /// SuperRes layouts only: the image assembled from the LR block rows,
    /// i.e. what the upsampled LR image would be were the model exact.
    pub lr_block_view: Option<Image>,
    pub codes: Vec<SparseCodeTriple>,
}

/// Generates a registered target/guidance pair whose tiles are exactly
/// sparse in `dict`.
pub fn coupled_pair(dict: &CoupledDictionary, spec: &SynthSpec) -> Result<SynthPair> {
    let k = dict.atoms_per_group();
    if spec.s_common > k || spec.s_target > k || spec.s_guidance > k {
        return Err(Error::Config(format!(
            "per-group sparsity exceeds {k} atoms per group"
        )));
    }
    if spec.tiles_x == 0 || spec.tiles_y == 0 {
        return Err(Error::Config("tile grid must be nonempty".into()));
    }
    let p = dict.patch_side();
    let n = p * p;
    let rows = dict.stacked().nrows();
    let width = spec.tiles_x * p;
    let height = spec.tiles_y * p;
    let tiles = spec.tiles_x * spec.tiles_y;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Raw stacked combination per tile, before amplitude rescaling.
    let mut combos = Array2::zeros((rows, tiles));
    let mut codes: Vec<Vec<(usize, f64)>> = Vec::with_capacity(tiles);
    for t in 0..tiles {
        let mut entries = Vec::with_capacity(spec.joint_sparsity());
        for (group, count, lo, hi) in [
            (0usize, spec.s_common, 1.0, 2.0),
            (1, spec.s_target, 0.3, 0.8),
            (2, spec.s_guidance, 0.3, 0.8),
        ] {
            let mut chosen = std::collections::BTreeSet::new();
            while chosen.len() < count {
                chosen.insert(group * k + rng.gen_range(0..k));
            }
            for &j in &chosen {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let c = sign * rng.gen_range(lo..hi);
                entries.push((j, c));
                for r in 0..rows {
                    combos[(r, t)] += c * dict.stacked()[(r, j)];
                }
            }
        }
        codes.push(entries);
    }

    // One global scale keeps every tile exactly sparse while bounding the
    // deviation from the offset.
    let max_abs = combos.iter().fold(0.0f64, |m, v: &f64| m.max(v.abs()));
    let scale = if max_abs > 0.0 {
        spec.max_deviation / max_abs
    } else {
        1.0
    };
    combos.mapv_inplace(|v| v * scale);
    let codes: Vec<SparseCodeTriple> = codes
        .into_iter()
        .map(|entries| {
            SparseCodeTriple::from_entries(
                entries.into_iter().map(|(j, c)| (j, c * scale)).collect(),
                k,
            )
        })
        .collect();

    let blocks = dict.layout().modality_blocks();
    let mut planes: Vec<Image> = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut data = vec![spec.offset; width * height];
        for ty in 0..spec.tiles_y {
            for tx in 0..spec.tiles_x {
                let t = ty * spec.tiles_x + tx;
                for pr in 0..p {
                    for pc in 0..p {
                        let px = (ty * p + pr) * width + tx * p + pc;
                        data[px] += combos[(b * n + pr * p + pc, t)];
                    }
                }
            }
        }
        planes.push(Image::new(width, height, data)?);
    }

    let mut planes = planes.into_iter();
    let target = planes.next().unwrap();
    let (lr_block_view, guidance) = match dict.layout() {
        DictLayout::Denoise => (None, planes.next().unwrap()),
        DictLayout::SuperRes => {
            let lr = planes.next().unwrap();
            (Some(lr), planes.next().unwrap())
        }
    };
    Ok(SynthPair {
        target,
        guidance,
        lr_block_view,
        codes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::extract_patches;
    use crate::sparse::{batch_code, StopRule};
    use ndarray::s;

    #[test]
    fn planted_dictionary_valid_and_deterministic() {
        let d1 = planted_dictionary(DictLayout::Denoise, 4, 8, 7).unwrap();
        let d2 = planted_dictionary(DictLayout::Denoise, 4, 8, 7).unwrap();
        assert_eq!(d1.stacked(), d2.stacked());
        d1.validate().unwrap();
        // zero-mean per touched block
        let n = 16;
        for j in 0..24 {
            let allowed = DictLayout::Denoise.allowed_rows(j / 8, n);
            for b in 0..2 {
                let block = b * n..(b + 1) * n;
                if block.start >= allowed.start && block.end <= allowed.end {
                    let mean: f64 = block.map(|r| d1.stacked()[(r, j)]).sum::<f64>() / n as f64;
                    assert!(mean.abs() < 1e-12, "atom {j} block {b} mean {mean}");
                }
            }
        }
    }

    #[test]
    fn pair_tiles_are_exactly_sparse() {
        let dict = planted_dictionary(DictLayout::Denoise, 4, 8, 3).unwrap();
        let spec = SynthSpec {
            tiles_x: 4,
            tiles_y: 3,
            seed: 11,
            ..SynthSpec::default()
        };
        let pair = coupled_pair(&dict, &spec).unwrap();
        assert_eq!(pair.target.width(), 16);
        assert_eq!(pair.target.height(), 12);
        assert!(pair.target.data().iter().all(|v| (0.0..=1.0).contains(v)));

        // DC removal leaves tiles exactly representable: code and check.
        let xs = extract_patches(&pair.target, 4, 4, true).unwrap();
        let ys = extract_patches(&pair.guidance, 4, 4, true).unwrap();
        let n = 16;
        let pcount = xs.geometry().patch_count();
        let mut signals = Array2::zeros((2 * n, pcount));
        signals.slice_mut(s![..n, ..]).assign(xs.patches());
        signals.slice_mut(s![n.., ..]).assign(ys.patches());
        let sd = dict.coding_dictionary();
        let stop = StopRule::sparsity(spec.joint_sparsity());
        let codes = batch_code(&signals, &sd, &stop).unwrap();
        for (i, code) in codes.iter().enumerate() {
            let approx = crate::sparse::synthesize(&sd, code);
            let res: f64 = signals
                .column(i)
                .iter()
                .zip(&approx)
                .map(|(s, a)| (s - a) * (s - a))
                .sum();
            assert!(res < 1e-10, "tile {i} residual {res}");
        }
    }

    #[test]
    fn pair_codes_match_emitted_pixels() {
        let dict = planted_dictionary(DictLayout::SuperRes, 4, 6, 5).unwrap();
        let spec = SynthSpec {
            tiles_x: 3,
            tiles_y: 2,
            seed: 9,
            ..SynthSpec::default()
        };
        let pair = coupled_pair(&dict, &spec).unwrap();
        let lr = pair.lr_block_view.as_ref().unwrap();
        let n = 16;
        // tile (0,0) of each plane must equal offset + block rows of D*code
        let code = &pair.codes[0];
        let mut stacked = vec![0.0; dict.stacked().nrows()];
        for &(j, c) in code.entries() {
            for (r, v) in stacked.iter_mut().enumerate() {
                *v += c * dict.stacked()[(r, j)];
            }
        }
        for pr in 0..4 {
            for pc in 0..4 {
                let i = pr * 4 + pc;
                assert!((pair.target.get(pr, pc) - (0.5 + stacked[i])).abs() < 1e-12);
                assert!((lr.get(pr, pc) - (0.5 + stacked[n + i])).abs() < 1e-12);
                assert!((pair.guidance.get(pr, pc) - (0.5 + stacked[2 * n + i])).abs() < 1e-12);
            }
        }
    }
}
