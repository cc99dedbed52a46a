//! Coupled denoising: code each noisy/guidance patch pair jointly, estimate
//! clean target patches from the common and target-specific contributions,
//! and blend with the noisy input through the closed-form fidelity combine.

use super::{DenoiseConfig, RESIDUAL_STOP_FACTOR};
use crate::dictlearn::{CoupledDictionary, DictLayout};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::patch::{accumulate, extract_patches, PatchSet};
use crate::sparse::{batch_code, StopRule};
use ndarray::{s, Array2};

/// Denoises `noisy` guided by a registered clean image of another modality.
pub fn denoise(
    noisy: &Image,
    guidance: &Image,
    dict: &CoupledDictionary,
    cfg: &DenoiseConfig,
) -> Result<Image> {
    if !noisy.same_dims(guidance) {
        return Err(Error::Dimension(format!(
            "noisy {}x{} vs guidance {}x{}",
            noisy.width(),
            noisy.height(),
            guidance.width(),
            guidance.height()
        )));
    }
    if dict.layout() != DictLayout::Denoise {
        return Err(Error::Layout {
            expected: "denoise".into(),
            actual: dict.layout().name().into(),
        });
    }
    if dict.patch_side() != cfg.patch_side {
        return Err(Error::Config(format!(
            "dictionary patch side {} != configured {}",
            dict.patch_side(),
            cfg.patch_side
        )));
    }

    let xs = extract_patches(noisy, cfg.patch_side, cfg.stride, cfg.remove_dc)?;
    let ys = extract_patches(guidance, cfg.patch_side, cfg.stride, cfg.remove_dc)?;
    let n = xs.geometry().patch_len();
    let p = xs.geometry().patch_count();

    let mut signals = Array2::zeros((2 * n, p));
    signals.slice_mut(s![..n, ..]).assign(xs.patches());
    signals.slice_mut(s![n.., ..]).assign(ys.patches());

    let residual_tol = (cfg.residual_stop && cfg.sigma > 0.0)
        .then(|| RESIDUAL_STOP_FACTOR * (2 * n) as f64 * cfg.sigma * cfg.sigma);
    let stop = StopRule::new(Some(cfg.sparsity), residual_tol)?;

    let codes = batch_code(&signals, &dict.coding_dictionary(), &stop)?;

    let mut estimates = Array2::zeros((n, p));
    for (i, code) in codes.iter().enumerate() {
        let est = dict.reconstruct_target_patch(code);
        for (r, v) in est.into_iter().enumerate() {
            estimates[(r, i)] = v;
        }
    }
    let est_set = PatchSet::new(
        xs.geometry().clone(),
        estimates,
        xs.means().map(|m| m.to_vec()),
    )?;

    solve_fidelity_combine(noisy, &est_set, cfg.resolved_mu(n))
}

/// Closed-form minimizer of mu ||X - X_noisy||^2 + sum_i ||R_i X - x_hat_i||^2.
///
/// The normal matrix is diagonal (patch embeddings select disjoint pixels),
/// so every pixel is a weighted average of the noisy value (weight mu) and
/// the covering patch estimates (weight 1 each). With mu = 0 this reduces to
/// plain overlap averaging.
pub fn solve_fidelity_combine(
    noisy: &Image,
    patch_estimates: &PatchSet,
    mu: f64,
) -> Result<Image> {
    if mu < 0.0 {
        return Err(Error::Config(format!("mu must be >= 0, got {mu}")));
    }
    let geom = patch_estimates.geometry();
    if geom.image_width() != noisy.width() || geom.image_height() != noisy.height() {
        return Err(Error::Dimension(format!(
            "patch geometry {}x{} vs image {}x{}",
            geom.image_width(),
            geom.image_height(),
            noisy.width(),
            noisy.height()
        )));
    }
    let (sum, counts) = accumulate(patch_estimates, true)?;
    let data = noisy
        .data()
        .iter()
        .zip(sum.data())
        .zip(counts.data())
        .map(|((x, s), c)| (mu * x + s) / (mu + c))
        .collect();
    Image::new(noisy.width(), noisy.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::psnr;
    use crate::patch::{aggregate_patches, PatchGeometry};
    use crate::synth::{coupled_pair, planted_dictionary, SynthSpec};
    use crate::tasks::add_gaussian_noise;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_patchset(geom: PatchGeometry, seed: u64) -> PatchSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Array2::from_shape_fn((geom.patch_len(), geom.patch_count()), |_| {
            rng.gen_range(0.0..1.0)
        });
        PatchSet::new(geom, m, None).unwrap()
    }

    #[test]
    fn combine_mu_zero_equals_overlap_average() {
        let geom = PatchGeometry::new(7, 6, 3, 2).unwrap();
        let ps = random_patchset(geom, 1);
        let noisy = Image::constant(7, 6, 0.9);
        let combined = solve_fidelity_combine(&noisy, &ps, 0.0).unwrap();
        let averaged = aggregate_patches(&ps, true).unwrap();
        for (a, b) in combined.data().iter().zip(averaged.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn combine_single_patch_mu_one() {
        let geom = PatchGeometry::new(3, 3, 3, 1).unwrap();
        let ps = random_patchset(geom, 2);
        let noisy = Image::constant(3, 3, 0.2);
        let out = solve_fidelity_combine(&noisy, &ps, 1.0).unwrap();
        for (i, v) in out.data().iter().enumerate() {
            let est = ps.patches()[(i, 0)];
            assert!((v - (0.2 + est) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn combine_tiling_mosaic() {
        let geom = PatchGeometry::new(4, 4, 2, 2).unwrap();
        let ps = random_patchset(geom, 3);
        let noisy = Image::constant(4, 4, 0.5);
        let out = solve_fidelity_combine(&noisy, &ps, 0.0).unwrap();
        // patch 0 occupies the top-left 2x2 tile
        assert_eq!(out.get(0, 0), ps.patches()[(0, 0)]);
        assert_eq!(out.get(0, 1), ps.patches()[(1, 0)]);
        assert_eq!(out.get(1, 0), ps.patches()[(2, 0)]);
        assert_eq!(out.get(1, 1), ps.patches()[(3, 0)]);
    }

    #[test]
    fn combine_hand_computed_center_pixel() {
        // 3x3 image, 2x2 patches, stride 1: the center pixel is covered by
        // all four patches, so X = (mu x + sum of 4 estimates) / (mu + 4).
        let geom = PatchGeometry::new(3, 3, 2, 1).unwrap();
        let ps = random_patchset(geom, 4);
        let noisy = Image::constant(3, 3, 0.8);
        let mu = 2.5;
        let out = solve_fidelity_combine(&noisy, &ps, mu).unwrap();
        // center pixel is local index 3, 2, 1, 0 of patches 0..4
        let est_sum = ps.patches()[(3, 0)]
            + ps.patches()[(2, 1)]
            + ps.patches()[(1, 2)]
            + ps.patches()[(0, 3)];
        let expect = (mu * 0.8 + est_sum) / (mu + 4.0);
        assert!((out.get(1, 1) - expect).abs() < 1e-12);
    }

    #[test]
    fn combine_satisfies_normal_equations() {
        let geom = PatchGeometry::new(9, 8, 3, 2).unwrap();
        let ps = random_patchset(geom.clone(), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let noisy = Image::new(9, 8, (0..72).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let mu = 1.7;
        let x = solve_fidelity_combine(&noisy, &ps, mu).unwrap();
        // residual of (mu I + sum R^T R) X - (mu X_ns + sum R^T est)
        let (sum, counts) = accumulate(&ps, true).unwrap();
        for i in 0..x.data().len() {
            let lhs = (mu + counts.data()[i]) * x.data()[i];
            let rhs = mu * noisy.data()[i] + sum.data()[i];
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    fn planted_setup(
        sigma: f64,
        seed: u64,
    ) -> (Image, Image, Image, crate::dictlearn::CoupledDictionary) {
        let dict = planted_dictionary(DictLayout::Denoise, 4, 8, 100 + seed).unwrap();
        let spec = SynthSpec {
            tiles_x: 10,
            tiles_y: 10,
            seed: 200 + seed,
            ..SynthSpec::default()
        };
        let pair = coupled_pair(&dict, &spec).unwrap();
        let noisy = add_gaussian_noise(&pair.target, sigma, 300 + seed).unwrap();
        (pair.target, noisy, pair.guidance, dict)
    }

    fn tile_cfg(sigma: f64) -> DenoiseConfig {
        DenoiseConfig {
            sigma,
            mu: Some(0.0),
            patch_side: 4,
            stride: 4,
            sparsity: 4,
            residual_stop: true,
            remove_dc: true,
        }
    }

    #[test]
    fn denoise_sigma_zero_identity_on_representable_input() {
        let (truth, _, guidance, dict) = planted_setup(0.0, 1);
        let cfg = DenoiseConfig {
            sigma: 0.0,
            ..tile_cfg(0.0)
        };
        let out = denoise(&truth, &guidance, &dict, &cfg).unwrap();
        for (a, b) in out.data().iter().zip(truth.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn denoise_mu_large_returns_noisy_input() {
        let (_, noisy, guidance, dict) = planted_setup(16.0 / 255.0, 2);
        let cfg = DenoiseConfig {
            mu: Some(1e9),
            ..tile_cfg(16.0 / 255.0)
        };
        let out = denoise(&noisy, &guidance, &dict, &cfg).unwrap();
        for (a, b) in out.data().iter().zip(noisy.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn denoise_improves_planted_pair() {
        let sigma = 16.0 / 255.0;
        let (truth, noisy, guidance, dict) = planted_setup(sigma, 3);
        let out = denoise(&noisy, &guidance, &dict, &tile_cfg(sigma)).unwrap();
        let before = psnr(&truth, &noisy, 1.0).unwrap();
        let after = psnr(&truth, &out, 1.0).unwrap();
        assert!(
            after - before >= 6.0,
            "gain {:.2} dB (before {before:.2}, after {after:.2})",
            after - before
        );
    }

    #[test]
    fn denoise_zero_guidance_degrades_gracefully() {
        let sigma = 16.0 / 255.0;
        let (truth, noisy, _, dict) = planted_setup(sigma, 4);
        let zero = Image::zeros(truth.width(), truth.height());
        let out = denoise(&noisy, &zero, &dict, &tile_cfg(sigma)).unwrap();
        let before = psnr(&truth, &noisy, 1.0).unwrap();
        let after = psnr(&truth, &out, 1.0).unwrap();
        assert!(after >= before, "zero guidance hurt: {after} < {before}");
    }

    #[test]
    fn denoise_rejects_mismatches() {
        let (truth, noisy, guidance, dict) = planted_setup(0.05, 5);
        let small = Image::zeros(truth.width() - 4, truth.height());
        assert!(denoise(&noisy, &small, &dict, &tile_cfg(0.05)).is_err());

        let sr_dict = planted_dictionary(DictLayout::SuperRes, 4, 4, 9).unwrap();
        assert!(matches!(
            denoise(&noisy, &guidance, &sr_dict, &tile_cfg(0.05)),
            Err(Error::Layout { .. })
        ));
    }

    #[test]
    fn target_estimate_never_reads_guidance_blocks() {
        // reconstructing through all columns of the stacked dictionary and
        // through the target groups only must agree: the guidance-specific
        // group is structurally zero on target rows
        let dict = planted_dictionary(DictLayout::Denoise, 4, 6, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let signal: Vec<f64> = (0..32).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let code = crate::sparse::omp(
            &signal,
            &dict.coding_dictionary(),
            &StopRule::sparsity(5),
        )
        .unwrap();
        let full = crate::sparse::synthesize(&dict.coding_dictionary(), &code);
        let target_only = dict.reconstruct_target_patch(&code);
        for (a, b) in full.iter().take(16).zip(&target_only) {
            assert_eq!(a, b);
        }
    }
}
