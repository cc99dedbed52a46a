//! Coupled dictionary learning: alternating sparse coding and block-aware
//! K-SVD updates over a stacked dictionary with structural zero blocks.
//!
//! The stacked matrix couples two (denoising) or three (super-resolution)
//! modality blocks through a shared common group of atoms, while the
//! specific groups carry zero blocks so one modality's specific code can
//! never influence the other. Atom updates run a rank-1 factorization of the
//! residual restricted to each atom's allowed rows, which keeps the zero
//! blocks exact and the objective non-increasing.

use crate::error::{Error, Result};
use crate::sparse::{batch_code, synthesize, SparseCodeTriple, StackedDictionary, StopRule};
use ndarray::{s, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Which task the dictionary is shaped for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DictLayout {
    /// Two modality blocks: `[Psi_c Psi 0; Phi_c 0 Phi]`, 2n x 3K.
    Denoise,
    /// Three modality blocks: `[Psi_c^h Psi^h 0; Psi_c^l Psi^l 0; Phi_c 0 Phi]`, 3n x 3K.
    SuperRes,
}

impl DictLayout {
    pub fn modality_blocks(&self) -> usize {
        match self {
            DictLayout::Denoise => 2,
            DictLayout::SuperRes => 3,
        }
    }

    pub fn stacked_rows(&self, n: usize) -> usize {
        self.modality_blocks() * n
    }

    /// Rows an atom of column group `group` may occupy (0 = common z,
    /// 1 = target-specific u, 2 = guidance-specific v). Always contiguous.
    pub fn allowed_rows(&self, group: usize, n: usize) -> Range<usize> {
        match (self, group) {
            (DictLayout::Denoise, 0) => 0..2 * n,
            (DictLayout::Denoise, 1) => 0..n,
            (DictLayout::Denoise, 2) => n..2 * n,
            (DictLayout::SuperRes, 0) => 0..3 * n,
            (DictLayout::SuperRes, 1) => 0..2 * n,
            (DictLayout::SuperRes, 2) => 2 * n..3 * n,
            _ => panic!("column group {group} out of range"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DictLayout::Denoise => "denoise",
            DictLayout::SuperRes => "superres",
        }
    }
}

/// Training metadata carried inside a dictionary file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub sparsity: usize,
    pub iterations: usize,
    pub corpus_hash: String,
}

/// The block dictionary of the coupled model: unit-norm stacked columns with
/// exact structural zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledDictionary {
    layout: DictLayout,
    patch_side: usize,
    k: usize,
    /// stacked_rows(n) x 3K
    stacked: Array2<f64>,
    provenance: Provenance,
}

impl CoupledDictionary {
    /// Assembles a dictionary from raw per-block matrices in file order
    /// (Denoise: Psi_c, Psi, Phi_c, Phi; SuperRes: Psi_c^h, Psi^h, Psi_c^l,
    /// Psi^l, Phi_c, Phi), imposing structural zeros and normalizing the
    /// stacked columns.
    pub fn assemble(
        layout: DictLayout,
        patch_side: usize,
        blocks: &[Array2<f64>],
    ) -> Result<Self> {
        let n = patch_side * patch_side;
        let expected = match layout {
            DictLayout::Denoise => 4,
            DictLayout::SuperRes => 6,
        };
        if blocks.len() != expected {
            return Err(Error::Dimension(format!(
                "{} layout expects {} blocks, got {}",
                layout.name(),
                expected,
                blocks.len()
            )));
        }
        let k = blocks[0].ncols();
        for (i, b) in blocks.iter().enumerate() {
            if b.nrows() != n || b.ncols() != k {
                return Err(Error::Dimension(format!(
                    "block {i} is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    n,
                    k
                )));
            }
        }
        let rows = layout.stacked_rows(n);
        let mut stacked = Array2::zeros((rows, 3 * k));
        for (slot, (rr, cc)) in Self::block_slots(layout, n, k).into_iter().enumerate() {
            stacked.slice_mut(s![rr, cc]).assign(&blocks[slot]);
        }
        // normalize stacked columns
        for j in 0..3 * k {
            let norm = stacked.column(j).dot(&stacked.column(j)).sqrt();
            if norm < 1e-12 {
                return Err(Error::DegenerateAtom { index: j, norm });
            }
            stacked.column_mut(j).mapv_inplace(|v| v / norm);
        }
        Ok(Self {
            layout,
            patch_side,
            k,
            stacked,
            provenance: Provenance::default(),
        })
    }

    /// Rebuilds a dictionary from an already-normalized stacked matrix,
    /// validating every invariant. Used when loading from disk.
    pub fn from_stacked(
        layout: DictLayout,
        patch_side: usize,
        k: usize,
        stacked: Array2<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        let d = Self {
            layout,
            patch_side,
            k,
            stacked,
            provenance,
        };
        d.validate()?;
        Ok(d)
    }

    fn block_slots(
        layout: DictLayout,
        n: usize,
        k: usize,
    ) -> Vec<(Range<usize>, Range<usize>)> {
        match layout {
            DictLayout::Denoise => vec![
                (0..n, 0..k),          // Psi_c
                (0..n, k..2 * k),      // Psi
                (n..2 * n, 0..k),      // Phi_c
                (n..2 * n, 2 * k..3 * k), // Phi
            ],
            DictLayout::SuperRes => vec![
                (0..n, 0..k),             // Psi_c^h
                (0..n, k..2 * k),         // Psi^h
                (n..2 * n, 0..k),         // Psi_c^l
                (n..2 * n, k..2 * k),     // Psi^l
                (2 * n..3 * n, 0..k),     // Phi_c
                (2 * n..3 * n, 2 * k..3 * k), // Phi
            ],
        }
    }

    /// Per-block views in the fixed file order.
    pub fn blocks(&self) -> Vec<ArrayView2<'_, f64>> {
        Self::block_slots(self.layout, self.n(), self.k)
            .into_iter()
            .map(|(rr, cc)| self.stacked.slice(ndarray::s![rr, cc]))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let rows = self.layout.stacked_rows(n);
        if self.stacked.nrows() != rows || self.stacked.ncols() != 3 * self.k {
            return Err(Error::Dimension(format!(
                "stacked matrix {}x{} does not match layout ({}x{})",
                self.stacked.nrows(),
                self.stacked.ncols(),
                rows,
                3 * self.k
            )));
        }
        for j in 0..3 * self.k {
            let group = j / self.k;
            let allowed = self.layout.allowed_rows(group, n);
            let col = self.stacked.column(j);
            for (r, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Numerical(format!("atom {j} has non-finite entry")));
                }
                if !allowed.contains(&r) && *v != 0.0 {
                    return Err(Error::Numerical(format!(
                        "atom {j} violates structural zero at row {r}"
                    )));
                }
            }
            let norm = col.dot(&col).sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::Numerical(format!(
                    "atom {j} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> DictLayout {
        self.layout
    }

    pub fn patch_side(&self) -> usize {
        self.patch_side
    }

    /// Patch dimension n = patch_side².
    pub fn n(&self) -> usize {
        self.patch_side * self.patch_side
    }

    /// Atoms per column group.
    pub fn atoms_per_group(&self) -> usize {
        self.k
    }

    pub fn stacked(&self) -> &Array2<f64> {
        &self.stacked
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn set_provenance(&mut self, p: Provenance) {
        self.provenance = p;
    }

    /// The full stacked dictionary prepared for coding. Columns are already
    /// unit, so recorded norms are exactly 1 and coefficients apply to the
    /// stored blocks directly.
    pub fn coding_dictionary(&self) -> StackedDictionary {
        StackedDictionary::new(self.stacked.clone(), self.k)
            .expect("stored dictionary has unit columns")
    }

    /// The reduced dictionary used at super-resolution test time: the HR
    /// block rows are dropped and the surviving columns re-normalized, with
    /// norms recorded so coefficients apply against the full dictionary.
    pub fn sr_reduced_dictionary(&self) -> Result<StackedDictionary> {
        if self.layout != DictLayout::SuperRes {
            return Err(Error::Layout {
                expected: "superres".into(),
                actual: self.layout.name().into(),
            });
        }
        let n = self.n();
        let rows: Vec<usize> = (n..3 * n).collect();
        self.coding_dictionary().restrict_rows(&rows)
    }

    /// The `[target; guidance]` view used for inpainting: LR rows dropped
    /// (SuperRes) or the full dictionary (Denoise).
    pub fn target_guidance_dictionary(&self) -> Result<StackedDictionary> {
        match self.layout {
            DictLayout::Denoise => Ok(self.coding_dictionary()),
            DictLayout::SuperRes => {
                let n = self.n();
                let rows: Vec<usize> = (0..n).chain(2 * n..3 * n).collect();
                self.coding_dictionary().restrict_rows(&rows)
            }
        }
    }

    /// Target-patch estimate from a code: common and target-specific
    /// contributions only (the guidance-specific group has structural zeros
    /// on these rows and is never read).
    pub fn reconstruct_target_patch(&self, code: &SparseCodeTriple) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for &(j, c) in code.entries() {
            if j >= 2 * self.k {
                continue; // guidance-specific: not part of the target estimate
            }
            for (o, a) in out.iter_mut().zip(self.stacked.column(j).iter().take(n)) {
                *o += c * a;
            }
        }
        out
    }

    /// Diagnostic guidance-patch estimate (common + guidance-specific).
    pub fn reconstruct_guidance_patch(&self, code: &SparseCodeTriple) -> Vec<f64> {
        let n = self.n();
        let rows = self.layout.stacked_rows(n) - n..self.layout.stacked_rows(n);
        let mut out = vec![0.0; n];
        for &(j, c) in code.entries() {
            if j >= self.k && j < 2 * self.k {
                continue;
            }
            for (o, r) in out.iter_mut().zip(rows.clone()) {
                *o += c * self.stacked[(r, j)];
            }
        }
        out
    }
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Atoms per column group (the stacked dictionary has 3K columns).
    pub atoms_per_group: usize,
    /// Joint sparsity budget per training signal.
    pub sparsity: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Atoms used by fewer signals than this are replaced by the
    /// worst-represented training signal.
    pub dead_atom_threshold: usize,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.atoms_per_group == 0 {
            return Err(Error::Config("atoms_per_group must be >= 1".into()));
        }
        if self.sparsity == 0 || self.sparsity > 3 * self.atoms_per_group {
            return Err(Error::Config(format!(
                "sparsity must be in 1..=3K (K = {})",
                self.atoms_per_group
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            atoms_per_group: 64,
            sparsity: 4,
            iterations: 20,
            seed: 0,
            dead_atom_threshold: 1,
        }
    }
}

/// A trained dictionary plus the per-iteration objective values.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub dictionary: CoupledDictionary,
    pub objective_log: Vec<f64>,
}

/// Sum of squared residuals of the coded training set: the quadratic term of
/// the coupled learning objective.
pub fn objective(
    dict: &CoupledDictionary,
    codes: &[SparseCodeTriple],
    training: &Array2<f64>,
) -> Result<f64> {
    if codes.len() != training.ncols() {
        return Err(Error::Dimension(format!(
            "{} codes for {} training signals",
            codes.len(),
            training.ncols()
        )));
    }
    if training.nrows() != dict.stacked.nrows() {
        return Err(Error::Dimension(format!(
            "training rows {} != dictionary rows {}",
            training.nrows(),
            dict.stacked.nrows()
        )));
    }
    let sd = dict.coding_dictionary();
    let mut total = 0.0;
    for (i, code) in codes.iter().enumerate() {
        let approx = synthesize(&sd, code);
        total += training
            .column(i)
            .iter()
            .zip(&approx)
            .map(|(x, a)| (x - a) * (x - a))
            .sum::<f64>();
    }
    Ok(total)
}

fn signal_error(
    training: &Array2<f64>,
    sd: &StackedDictionary,
    code: &SparseCodeTriple,
    i: usize,
) -> f64 {
    let approx = synthesize(sd, code);
    training
        .column(i)
        .iter()
        .zip(&approx)
        .map(|(x, a)| (x - a) * (x - a))
        .sum()
}

/// Seeds the dictionary from training signals: 3K samples (without
/// replacement when possible), restricted to each group's allowed rows,
/// jittered when signals must repeat, and normalized.
pub fn init_dictionary(
    training: &Array2<f64>,
    cfg: &TrainConfig,
    layout: DictLayout,
    patch_side: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CoupledDictionary> {
    cfg.validate()?;
    let n = patch_side * patch_side;
    let rows = layout.stacked_rows(n);
    let p = training.ncols();
    if p == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if training.nrows() != rows {
        return Err(Error::Dimension(format!(
            "training rows {} != {} required by {} layout with patch side {}",
            training.nrows(),
            rows,
            layout.name(),
            patch_side
        )));
    }
    let k = cfg.atoms_per_group;
    let total = 3 * k;
    let (picks, jitter): (Vec<usize>, bool) = if p >= total {
        let mut idx: Vec<usize> = (0..p).collect();
        // partial Fisher-Yates, seeded
        for i in 0..total {
            let j = rng.gen_range(i..p);
            idx.swap(i, j);
        }
        idx.truncate(total);
        (idx, false)
    } else {
        ((0..total).map(|_| rng.gen_range(0..p)).collect(), true)
    };

    let mut stacked = Array2::zeros((rows, total));
    for (slot, &pick) in picks.iter().enumerate() {
        let group = slot / k;
        let allowed = layout.allowed_rows(group, n);
        let mut col = vec![0.0; rows];
        for r in allowed.clone() {
            col[r] = training[(r, pick)];
            if jitter {
                col[r] += 1e-3 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
        }
        let mut norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            // signal vanishes on this group's rows: seed randomly instead
            for r in allowed {
                col[r] = rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
            norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        for (r, v) in col.iter().enumerate() {
            stacked[(r, slot)] = v / norm;
        }
    }
    Ok(CoupledDictionary {
        layout,
        patch_side,
        k,
        stacked,
        provenance: Provenance {
            seed: cfg.seed,
            sparsity: cfg.sparsity,
            iterations: 0,
            corpus_hash: String::new(),
        },
    })
}

/// Dominant rank-1 factor of `e` (rows x users) by power iteration started
/// from `d0`. Returns the unit left vector and its coefficient row, or None
/// when the residual is numerically zero.
fn rank1_factor(e: &Array2<f64>, d0: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let frob2: f64 = e.iter().map(|v| v * v).sum();
    if frob2 < 1e-28 {
        return None;
    }
    let rows = e.nrows();
    let users = e.ncols();
    let mut d = d0.to_vec();
    for _ in 0..60 {
        // g = E^T d, then d_next = E g
        let mut g = vec![0.0; users];
        for (i, mut_g) in g.iter_mut().enumerate() {
            let mut acc = 0.0;
            for r in 0..rows {
                acc += e[(r, i)] * d[r];
            }
            *mut_g = acc;
        }
        let mut d_next = vec![0.0; rows];
        for i in 0..users {
            let gi = g[i];
            for r in 0..rows {
                d_next[r] += e[(r, i)] * gi;
            }
        }
        let norm = d_next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-15 {
            // d0 orthogonal to the residual column space; restart from the
            // largest residual column
            let mut best = 0;
            let mut best_n = -1.0;
            for i in 0..users {
                let cn: f64 = (0..rows).map(|r| e[(r, i)] * e[(r, i)]).sum();
                if cn > best_n {
                    best_n = cn;
                    best = i;
                }
            }
            let cn = best_n.sqrt();
            for r in 0..rows {
                d[r] = e[(r, best)] / cn;
            }
            continue;
        }
        let mut delta: f64 = 0.0;
        for r in 0..rows {
            let v = d_next[r] / norm;
            delta = delta.max((v - d[r]).abs());
            d[r] = v;
        }
        if delta < 1e-13 {
            break;
        }
    }
    // sign: largest-magnitude entry of the atom is positive
    let mut max_idx = 0;
    for r in 1..rows {
        if d[r].abs() > d[max_idx].abs() {
            max_idx = r;
        }
    }
    let flip = if d[max_idx] < 0.0 { -1.0 } else { 1.0 };
    let mut g = vec![0.0; users];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut acc = 0.0;
        for r in 0..rows {
            acc += e[(r, i)] * d[r];
        }
        *gi = acc * flip;
    }
    if flip < 0.0 {
        d.iter_mut().for_each(|v| *v = -*v);
    }
    Some((d, g))
}

/// One K-SVD atom update restricted to the atom's allowed rows. Preserves
/// the support pattern of the codes (only values change), keeps structural
/// zeros exact, and cannot increase the objective. Unused atoms take the
/// direction of the worst-represented training signal.
fn ksvd_update_atom(
    stacked: &mut Array2<f64>,
    codes: &mut [SparseCodeTriple],
    residual: &mut Array2<f64>,
    training: &Array2<f64>,
    j: usize,
    allowed: Range<usize>,
    dead_atom_threshold: usize,
    rng: &mut ChaCha8Rng,
) {
    let users: Vec<(usize, f64)> = codes
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            c.entries()
                .iter()
                .find(|&&(col, _)| col == j)
                .map(|&(_, v)| (i, v))
        })
        .collect();

    if users.len() >= dead_atom_threshold.max(1) {
        let rows = allowed.len();
        let mut e = Array2::zeros((rows, users.len()));
        for (ei, &(sig, coef)) in users.iter().enumerate() {
            for (er, r) in allowed.clone().enumerate() {
                e[(er, ei)] = residual[(r, sig)] + stacked[(r, j)] * coef;
            }
        }
        let d0: Vec<f64> = allowed.clone().map(|r| stacked[(r, j)]).collect();
        if let Some((d, g)) = rank1_factor(&e, &d0) {
            for (er, r) in allowed.clone().enumerate() {
                stacked[(r, j)] = d[er];
            }
            for (ei, &(sig, _)) in users.iter().enumerate() {
                codes[sig].set_entry(j, g[ei]);
                for (er, r) in allowed.clone().enumerate() {
                    residual[(r, sig)] = e[(er, ei)] - d[er] * g[ei];
                }
            }
            return;
        }
        // Residual restricted to this atom's users is numerically zero: the
        // signals are exact without it. Zero the coefficients and fall
        // through to the dead-atom replacement.
        for &(sig, _) in &users {
            codes[sig].set_entry(j, 0.0);
            for r in allowed.clone() {
                residual[(r, sig)] = 0.0;
            }
        }
    }

    // Dead atom: replace with the worst-represented training signal,
    // restricted to the allowed rows; coefficients stay untouched (zero).
    let p = training.ncols();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        let ea: f64 = residual.column(a).dot(&residual.column(a));
        let eb: f64 = residual.column(b).dot(&residual.column(b));
        eb.partial_cmp(&ea).unwrap().then(a.cmp(&b))
    });
    for cand in order {
        let mut norm2 = 0.0;
        for r in allowed.clone() {
            let v = training[(r, cand)];
            norm2 += v * v;
        }
        if norm2 > 1e-24 {
            let norm = norm2.sqrt();
            for r in 0..stacked.nrows() {
                stacked[(r, j)] = 0.0;
            }
            for r in allowed.clone() {
                stacked[(r, j)] = training[(r, cand)] / norm;
            }
            return;
        }
    }
    // Every training signal vanishes on these rows; seed randomly.
    let mut col = vec![0.0; allowed.len()];
    let mut norm2 = 0.0;
    for v in col.iter_mut() {
        *v = rng.sample::<f64, _>(rand_distr::StandardNormal);
        norm2 += *v * *v;
    }
    let norm = norm2.sqrt();
    for r in 0..stacked.nrows() {
        stacked[(r, j)] = 0.0;
    }
    for (er, r) in allowed.enumerate() {
        stacked[(r, j)] = col[er] / norm;
    }
}

/// Trains a coupled dictionary by alternating OMP sparse coding with K-SVD
/// atom updates. The returned objective log is non-increasing.
pub fn train_coupled(
    training: &Array2<f64>,
    cfg: &TrainConfig,
    layout: DictLayout,
    patch_side: usize,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let p = training.ncols();
    if p == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if training.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "training matrix contains non-finite values".into(),
        ));
    }
    let k = cfg.atoms_per_group;
    if p < 3 * k {
        log::warn!(
            "training set has {} signals for {} atoms; expect duplicated initial atoms",
            p,
            3 * k
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dict = init_dictionary(training, cfg, layout, patch_side, &mut rng)?;
    let n = patch_side * patch_side;
    let stop = StopRule::sparsity(cfg.sparsity);

    let mut objective_log = Vec::with_capacity(cfg.iterations);
    let mut prev_codes: Option<Vec<SparseCodeTriple>> = None;

    for _ in 0..cfg.iterations {
        let sd = dict.coding_dictionary();
        let mut codes = batch_code(training, &sd, &stop)?;
        // Guarded coding: OMP is greedy, so a re-code can occasionally fit
        // worse than the code kept from the previous iteration. Keep
        // whichever fits better under the current dictionary.
        if let Some(prev) = prev_codes.take() {
            for i in 0..p {
                let new_err = signal_error(training, &sd, &codes[i], i);
                let old_err = signal_error(training, &sd, &prev[i], i);
                if old_err < new_err {
                    codes[i] = prev[i].clone();
                }
            }
        }

        // Residual matrix X - D A, maintained through the atom sweep.
        let mut residual = training.to_owned();
        for (i, code) in codes.iter().enumerate() {
            let approx = synthesize(&sd, code);
            for (r, a) in approx.iter().enumerate() {
                residual[(r, i)] -= a;
            }
        }

        for j in 0..3 * k {
            let allowed = layout.allowed_rows(j / k, n);
            ksvd_update_atom(
                &mut dict.stacked,
                &mut codes,
                &mut residual,
                training,
                j,
                allowed,
                cfg.dead_atom_threshold,
                &mut rng,
            );
        }

        objective_log.push(objective(&dict, &codes, training)?);
        prev_codes = Some(codes);
    }

    dict.provenance = Provenance {
        seed: cfg.seed,
        sparsity: cfg.sparsity,
        iterations: cfg.iterations,
        corpus_hash: corpus_hash(training),
    };
    Ok(TrainOutcome {
        dictionary: dict,
        objective_log,
    })
}

/// CRC32 of the training matrix bytes in column-major order.
pub fn corpus_hash(training: &Array2<f64>) -> String {
    let mut h = crc32fast::Hasher::new();
    for col in training.columns() {
        for v in col {
            h.update(&v.to_le_bytes());
        }
    }
    format!("{:08x}", h.finalize())
}
