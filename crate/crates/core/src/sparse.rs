//! Greedy sparse coding over a stacked coupled dictionary.
//!
//! Orthogonal matching pursuit with least-squares refitting via an
//! incrementally updated Cholesky factor of the support Gram matrix, plus a
//! row-masked variant used for inpainting and for coding against reduced
//! dictionaries (dropped modality blocks).

use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

/// Columns below this masked norm are excluded from selection.
const MASKED_NORM_FLOOR: f64 = 1e-8;
/// Gram pivot floor: a candidate atom this close to the span of the selected
/// support is rejected and pursuit stops with the truncated support.
const GRAM_PIVOT_FLOOR: f64 = 1e-12;

/// A dictionary whose columns have been normalized to unit length, with the
/// original norms recorded so coefficients can be reported against the raw
/// (un-normalized) columns.
#[derive(Debug, Clone)]
pub struct StackedDictionary {
    atoms: Array2<f64>,
    column_norms: Vec<f64>,
    usable: Vec<bool>,
    group_size: usize,
}

impl StackedDictionary {
    /// Normalizes `atoms` column-wise. `group_size` is the number of columns
    /// per coefficient group: columns `[0, K)` carry the common code z,
    /// `[K, 2K)` the target-specific u, `[2K, 3K)` the guidance-specific v.
    /// For plain (ungrouped) dictionaries pass the column count, which puts
    /// every coefficient in z.
    pub fn new(atoms: Array2<f64>, group_size: usize) -> Result<Self> {
        let l = atoms.ncols();
        if group_size == 0 || (group_size < l && l != 3 * group_size) {
            return Err(Error::Config(format!(
                "group size {group_size} incompatible with {l} columns"
            )));
        }
        let mut atoms = atoms;
        let mut column_norms = Vec::with_capacity(l);
        for j in 0..l {
            let norm = atoms.column(j).dot(&atoms.column(j)).sqrt();
            if norm < MASKED_NORM_FLOOR {
                return Err(Error::DegenerateAtom { index: j, norm });
            }
            atoms.column_mut(j).mapv_inplace(|v| v / norm);
            column_norms.push(norm);
        }
        Ok(Self {
            atoms,
            column_norms,
            usable: vec![true; l],
            group_size,
        })
    }

    /// Unit-norm atoms, one per column.
    pub fn atoms(&self) -> &Array2<f64> {
        &self.atoms
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn rows(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    /// Raw (un-normalized) column `j`.
    pub fn raw_column(&self, j: usize) -> Vec<f64> {
        let norm = self.column_norms[j];
        self.atoms.column(j).iter().map(|v| v * norm).collect()
    }

    /// Restricts the dictionary to a sorted set of rows, re-normalizing each
    /// surviving column. Recorded norms compose with the existing ones so
    /// coefficients from coding against the restriction apply directly to the
    /// full raw columns. Columns that vanish under the mask are kept in place
    /// but marked unusable.
    pub fn restrict_rows(&self, rows: &[usize]) -> Result<StackedDictionary> {
        if rows.is_empty() {
            return Err(Error::Config("row mask must be nonempty".into()));
        }
        if rows.windows(2).any(|w| w[0] >= w[1]) || *rows.last().unwrap() >= self.rows() {
            return Err(Error::Config(
                "row mask must be strictly increasing and in range".into(),
            ));
        }
        let l = self.len();
        let mut atoms = Array2::zeros((rows.len(), l));
        let mut column_norms = Vec::with_capacity(l);
        let mut usable = Vec::with_capacity(l);
        let mut any_usable = false;
        for j in 0..l {
            let col = self.atoms.column(j);
            let mut norm2 = 0.0;
            for (i, &r) in rows.iter().enumerate() {
                let v = col[r];
                atoms[(i, j)] = v;
                norm2 += v * v;
            }
            let norm = norm2.sqrt();
            if self.usable[j] && norm >= MASKED_NORM_FLOOR {
                atoms.column_mut(j).mapv_inplace(|v| v / norm);
                column_norms.push(self.column_norms[j] * norm);
                usable.push(true);
                any_usable = true;
            } else {
                atoms.column_mut(j).fill(0.0);
                column_norms.push(1.0);
                usable.push(false);
            }
        }
        if !any_usable {
            return Err(Error::NoUsableAtom);
        }
        Ok(StackedDictionary {
            atoms,
            column_norms,
            usable,
            group_size: self.group_size,
        })
    }
}

/// Stopping criteria for pursuit: a sparsity budget, a squared-residual
/// threshold, or both (whichever triggers first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    max_sparsity: Option<usize>,
    residual_tol: Option<f64>,
}

impl StopRule {
    pub fn new(max_sparsity: Option<usize>, residual_tol: Option<f64>) -> Result<Self> {
        if max_sparsity.is_none() && residual_tol.is_none() {
            return Err(Error::InvalidStopRule);
        }
        if let Some(tol) = residual_tol {
            if !(tol >= 0.0) {
                return Err(Error::Config(format!(
                    "residual tolerance must be nonnegative, got {tol}"
                )));
            }
        }
        Ok(Self {
            max_sparsity,
            residual_tol,
        })
    }

    pub fn sparsity(s: usize) -> Self {
        Self {
            max_sparsity: Some(s),
            residual_tol: None,
        }
    }

    pub fn residual(tol_sq: f64) -> Self {
        Self {
            max_sparsity: None,
            residual_tol: Some(tol_sq),
        }
    }

    pub fn max_sparsity(&self) -> Option<usize> {
        self.max_sparsity
    }

    pub fn residual_tol(&self) -> Option<f64> {
        self.residual_tol
    }
}

/// Sparse code of one stacked signal: common (z), target-specific (u) and
/// guidance-specific (v) coefficients, reported against the raw dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCodeTriple {
    /// (stacked column index, coefficient), in selection order.
    entries: Vec<(usize, f64)>,
    group_size: usize,
}

impl SparseCodeTriple {
    pub fn empty(group_size: usize) -> Self {
        Self {
            entries: Vec::new(),
            group_size,
        }
    }

    pub(crate) fn from_entries(entries: Vec<(usize, f64)>, group_size: usize) -> Self {
        debug_assert!({
            let mut idx: Vec<usize> = entries.iter().map(|e| e.0).collect();
            idx.sort_unstable();
            idx.windows(2).all(|w| w[0] != w[1])
        });
        Self {
            entries,
            group_size,
        }
    }

    /// Selected stacked-column indices in selection order.
    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn group(&self, which: usize) -> Vec<(usize, f64)> {
        let k = self.group_size;
        self.entries
            .iter()
            .filter(|(j, _)| j / k == which)
            .map(|&(j, c)| (j - which * k, c))
            .collect()
    }

    /// Common coefficients, indexed within the z group.
    pub fn z(&self) -> Vec<(usize, f64)> {
        self.group(0)
    }

    /// Target-specific coefficients, indexed within the u group.
    pub fn u(&self) -> Vec<(usize, f64)> {
        self.group(1)
    }

    /// Guidance-specific coefficients, indexed within the v group.
    pub fn v(&self) -> Vec<(usize, f64)> {
        self.group(2)
    }

    /// Dense coefficient vector of length `len`.
    pub fn dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(j, c) in &self.entries {
            out[j] = c;
        }
        out
    }

    pub(crate) fn set_entry(&mut self, j: usize, value: f64) {
        for e in &mut self.entries {
            if e.0 == j {
                e.1 = value;
            }
        }
    }
}

/// Multiplies the raw (un-normalized) dictionary by a sparse code.
pub fn synthesize(dict: &StackedDictionary, code: &SparseCodeTriple) -> Vec<f64> {
    let mut out = vec![0.0; dict.rows()];
    for &(j, c) in code.entries() {
        let scale = c * dict.column_norms[j];
        for (o, a) in out.iter_mut().zip(dict.atoms.column(j)) {
            *o += scale * a;
        }
    }
    out
}

/// Growing Cholesky factor of the support Gram matrix, packed row-major.
struct IncrementalCholesky {
    k: usize,
    l: Vec<f64>,
}

impl IncrementalCholesky {
    fn new() -> Self {
        Self { k: 0, l: Vec::new() }
    }

    fn forward_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.k];
        for i in 0..self.k {
            let row = &self.l[i * (i + 1) / 2..];
            let mut acc = rhs[i];
            for j in 0..i {
                acc -= row[j] * w[j];
            }
            w[i] = acc / row[i];
        }
        w
    }

    /// Appends an atom given its inner products with the selected atoms and
    /// its squared norm. Returns false when the Gram matrix would become
    /// numerically singular.
    fn try_push(&mut self, cross: &[f64], diag: f64) -> bool {
        let w = self.forward_solve(cross);
        let d2 = diag - w.iter().map(|v| v * v).sum::<f64>();
        if d2 <= GRAM_PIVOT_FLOOR {
            return false;
        }
        self.l.extend_from_slice(&w);
        self.l.push(d2.sqrt());
        self.k += 1;
        true
    }

    /// Solves L L^T x = rhs.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.forward_solve(rhs);
        for i in (0..self.k).rev() {
            let mut acc = x[i];
            for j in (i + 1)..self.k {
                acc -= self.l[j * (j + 1) / 2 + i] * x[j];
            }
            x[i] = acc / self.l[i * (i + 1) / 2 + i];
        }
        x
    }
}

/// Greedy pursuit over unit-norm atoms. Returns (support, coefficients
/// against the unit atoms).
fn omp_core(
    signal: ArrayView1<'_, f64>,
    atoms: &Array2<f64>,
    usable: &[bool],
    stop: &StopRule,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let d = atoms.nrows();
    let l = atoms.ncols();
    if signal.len() != d {
        return Err(Error::Dimension(format!(
            "signal length {} != dictionary rows {}",
            signal.len(),
            d
        )));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("signal contains non-finite values".into()));
    }

    let usable_count = usable.iter().filter(|&&u| u).count();
    let budget = stop.max_sparsity.unwrap_or(usize::MAX).min(d).min(usable_count);
    let corr_floor = 1e-13 * signal.dot(&signal).sqrt().max(1.0);

    let mut residual = signal.to_owned();
    let mut support: Vec<usize> = Vec::new();
    let mut selected = vec![false; l];
    let mut coeffs: Vec<f64> = Vec::new();
    let mut chol = IncrementalCholesky::new();
    // A_S^T x, grown as atoms are selected.
    let mut proj_rhs: Vec<f64> = Vec::new();

    loop {
        if let Some(tol) = stop.residual_tol {
            if residual.dot(&residual) <= tol {
                break;
            }
        }
        if support.len() >= budget {
            break;
        }

        // Most-correlated usable atom; ties go to the lowest column index.
        let mut best = None;
        let mut best_abs = 0.0;
        for j in 0..l {
            if !usable[j] || selected[j] {
                continue;
            }
            let c = atoms.column(j).dot(&residual).abs();
            if c > best_abs {
                best_abs = c;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        if best_abs <= corr_floor {
            break;
        }

        let cross: Vec<f64> = support
            .iter()
            .map(|&s| atoms.column(s).dot(&atoms.column(j)))
            .collect();
        if !chol.try_push(&cross, atoms.column(j).dot(&atoms.column(j))) {
            // Candidate numerically inside the selected span: stop with the
            // truncated support.
            break;
        }
        support.push(j);
        selected[j] = true;
        proj_rhs.push(atoms.column(j).dot(&signal));

        coeffs = chol.solve(&proj_rhs);
        residual.assign(&signal);
        for (idx, &s) in support.iter().enumerate() {
            let c = coeffs[idx];
            residual.zip_mut_with(&atoms.column(s), |r, a| *r -= c * a);
        }
    }

    Ok((support, coeffs))
}

/// Orthogonal matching pursuit of `signal` over a normalized dictionary.
///
/// Coefficients are reported against the raw (un-normalized) columns; the
/// residual on return satisfies whichever stopping rule triggered and is
/// orthogonal to every selected atom up to least-squares accuracy.
pub fn omp(
    signal: &[f64],
    dict: &StackedDictionary,
    stop: &StopRule,
) -> Result<SparseCodeTriple> {
    let view = ArrayView1::from(signal);
    let (support, coeffs) = omp_core(view, &dict.atoms, &dict.usable, stop)?;
    let entries = support
        .into_iter()
        .zip(coeffs)
        .map(|(j, c)| (j, c / dict.column_norms[j]))
        .collect();
    Ok(SparseCodeTriple::from_entries(entries, dict.group_size))
}

/// OMP on the row-restricted dictionary: the columns are re-normalized under
/// the mask and coefficients are rescaled to apply against the full raw
/// dictionary. `signal` carries one entry per kept row, in mask order.
pub fn masked_omp(
    signal: &[f64],
    dict: &StackedDictionary,
    mask_rows: &[usize],
    stop: &StopRule,
) -> Result<SparseCodeTriple> {
    if signal.len() != mask_rows.len() {
        return Err(Error::Dimension(format!(
            "masked signal length {} != mask size {}",
            signal.len(),
            mask_rows.len()
        )));
    }
    let restricted = dict.restrict_rows(mask_rows)?;
    omp(signal, &restricted, stop)
}

/// Codes every column of `signals` independently. Output order matches input
/// order regardless of how the work is scheduled.
pub fn batch_code(
    signals: &Array2<f64>,
    dict: &StackedDictionary,
    stop: &StopRule,
) -> Result<Vec<SparseCodeTriple>> {
    let results: Vec<Result<SparseCodeTriple>> = (0..signals.ncols())
        .into_par_iter()
        .map(|i| {
            let col = signals.column(i);
            omp_core(col, &dict.atoms, &dict.usable, stop).map(|(support, coeffs)| {
                let entries = support
                    .into_iter()
                    .zip(coeffs)
                    .map(|(j, c)| (j, c / dict.column_norms[j]))
                    .collect();
                SparseCodeTriple::from_entries(entries, dict.group_size)
            })
        })
        .collect();
    collect_columns(results)
}

/// Codes every column with its own row mask (inpainting). `signals` has full
/// height; only the masked rows of each column are read.
pub fn batch_code_masked(
    signals: &Array2<f64>,
    dict: &StackedDictionary,
    masks: &[Vec<usize>],
    stop: &StopRule,
) -> Result<Vec<SparseCodeTriple>> {
    if masks.len() != signals.ncols() {
        return Err(Error::Dimension(format!(
            "mask count {} != signal count {}",
            masks.len(),
            signals.ncols()
        )));
    }
    let results: Vec<Result<SparseCodeTriple>> = (0..signals.ncols())
        .into_par_iter()
        .map(|i| {
            let col = signals.column(i);
            let gathered: Vec<f64> = masks[i].iter().map(|&r| col[r]).collect();
            masked_omp(&gathered, dict, &masks[i], stop)
        })
        .collect();
    collect_columns(results)
}

fn collect_columns(results: Vec<Result<SparseCodeTriple>>) -> Result<Vec<SparseCodeTriple>> {
    let mut out = Vec::with_capacity(results.len());
    for (column, r) in results.into_iter().enumerate() {
        match r {
            Ok(code) => out.push(code),
            Err(source) => {
                return Err(Error::Coding {
                    column,
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(out)
}
