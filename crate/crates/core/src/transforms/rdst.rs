//! Regularity-constrained DST.
//!
//! The modified DST swaps the DST's Nyquist row for the constant row, which
//! leaves it rank deficient. The odd rows are then replaced one at a time by
//! the null vector of the matrix with that row removed; after `M/2` steps
//! the matrix is orthogonal and maps constants onto row 0 only.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ORTHOGONALITY_TOLERANCE;
use super::{dst_entries, validate_size, TransformKind, TransformMatrix};
use crate::error::{Error, Result};

/// A singular value counts as zero when it is below this fraction of the
/// largest one.
pub const NULL_SPACE_TOLERANCE: f64 = 1e-8;

const GAMMA_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Constant first row, DST rows elsewhere. Rank `M - 1`.
pub fn build_modified_dst(m: usize) -> Result<TransformMatrix> {
    validate_size(m, 4)?;
    TransformMatrix::from_entries(TransformKind::ModifiedDst, modified_dst_entries(m))
}

fn modified_dst_entries(m: usize) -> DMatrix<f64> {
    let mut s = dst_entries(m);
    let c = 1.0 / (m as f64).sqrt();
    s.row_mut(0).fill(c);
    s
}

/// One pass of the design loop.
#[derive(Debug, Clone)]
pub struct RdstStep {
    pub step: usize,
    /// Index of the row that was zeroed and replaced (`2 * step + 1`).
    pub row: usize,
    /// The rank-deficient matrix with `row` zeroed.
    pub deficient: DMatrix<f64>,
    /// Singular values of `deficient`, largest first.
    pub singular_values: Vec<f64>,
    /// Unit null vector installed as the new row.
    pub null_vector: Vec<f64>,
    /// Matrix after installing the null vector.
    pub updated: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct RdstDesign {
    pub modified_dst: DMatrix<f64>,
    pub steps: Vec<RdstStep>,
    pub rdst: TransformMatrix,
}

pub fn build_rdst(m: usize) -> Result<TransformMatrix> {
    Ok(design_rdst(m)?.rdst)
}

/// Runs the full design loop and keeps every intermediate matrix.
pub fn design_rdst(m: usize) -> Result<RdstDesign> {
    validate_size(m, 4)?;
    let modified = modified_dst_entries(m);
    let mut current = modified.clone();
    let mut steps = Vec::with_capacity(m / 2);

    for step in 0..m / 2 {
        let row = 2 * step + 1;
        let mut deficient = current.clone();
        deficient.row_mut(row).fill(0.0);

        let svd = deficient.clone().svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
        let sv = &svd.singular_values;
        let (min_idx, min_val) =
            sv.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
            );
        let max_val = sv.iter().copied().fold(0.0, f64::max);
        let ratio = if max_val > 0.0 {
            min_val / max_val
        } else {
            1.0
        };
        if ratio >= NULL_SPACE_TOLERANCE {
            return Err(Error::NullSpace { step, ratio });
        }

        let mut null_vector: Vec<f64> = v_t.row(min_idx).iter().copied().collect();
        let norm = null_vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        null_vector.iter_mut().for_each(|v| *v /= norm);
        fix_sign(&mut null_vector);

        let mut updated = deficient.clone();
        for (n, &v) in null_vector.iter().enumerate() {
            updated[(row, n)] = v;
        }

        let mut singular_values: Vec<f64> = sv.iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));

        current = updated.clone();
        steps.push(RdstStep {
            step,
            row,
            deficient,
            singular_values,
            null_vector,
            updated,
        });
    }

    Ok(RdstDesign {
        modified_dst: modified,
        steps,
        rdst: TransformMatrix::from_entries(TransformKind::Rdst, current)?,
    })
}

/// Gram-level passband bounds for one design step: `T = S^-1` of the
/// matrix after the step, `G = T^T T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramBound {
    pub step: usize,
    /// Largest `|G[i][j]|`, `i != j`.
    pub max_off_diagonal: f64,
    /// Smallest `G[r][r]` over rows replaced so far.
    pub min_updated_diagonal: f64,
}

/// Bounds for every intermediate matrix of the design loop.
pub fn gram_bounds(design: &RdstDesign) -> Result<Vec<GramBound>> {
    design
        .steps
        .iter()
        .map(|st| {
            let t = st.updated.clone().try_inverse().ok_or_else(|| {
                Error::InvalidArgument(format!("step {} matrix is singular", st.step))
            })?;
            let g = t.transpose() * &t;
            let n = g.nrows();
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off.max(g[(i, j)].abs());
                    }
                }
            }
            let diag = (0..=st.step)
                .map(|j| g[(2 * j + 1, 2 * j + 1)])
                .fold(f64::INFINITY, f64::min);
            Ok(GramBound {
                step: st.step,
                max_off_diagonal: off,
                min_updated_diagonal: diag,
            })
        })
        .collect()
}

/// First entry that is not numerically zero is made positive.
fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// RDST rows that coincide with DST even rows, paired with the DST row index.
fn kept_rows(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m / 2).map(|j| (if j == 0 { 1 } else { 2 * j }, 2 * j))
}

/// RDST rows spanned by the DST odd rows, in the order used for `Gamma`.
fn replaced_rows(m: usize) -> impl Iterator<Item = usize> {
    (0..m / 2).map(|i| if i == 0 { 0 } else { 2 * i + 1 })
}

/// Orthogonal `M/2 x M/2` matrix `Gamma` mapping the DST odd rows onto the
/// RDST's new rows.
pub fn extract_gamma(rdst: &TransformMatrix, dst: &TransformMatrix) -> Result<DMatrix<f64>> {
    let m = rdst.size();
    if dst.size() != m {
        return Err(Error::DimensionMismatch(format!(
            "RDST is {m}x{m} but DST is {0}x{0}",
            dst.size()
        )));
    }
    validate_size(m, 4)?;
    for t in [rdst, dst] {
        let err = t.orthogonality_error();
        if err > ORTHOGONALITY_TOLERANCE {
            return Err(Error::NotOrthogonal(err));
        }
    }
    let half = m / 2;
    let r = rdst.entries();
    let s = dst.entries();
    let replaced: Vec<usize> = replaced_rows(m).collect();
    let gamma = DMatrix::from_fn(half, half, |i, l| {
        let odd = 2 * l + 1;
        (0..m).map(|n| r[(replaced[i], n)] * s[(odd, n)]).sum()
    });

    let residual = (reconstruct_rdst(&gamma, dst)? - r).amax();
    if residual > GAMMA_RESIDUAL_TOLERANCE {
        return Err(Error::Inconsistent(residual));
    }
    Ok(gamma)
}

/// Reassembles the RDST from the DST and `Gamma`: even DST rows pass
/// through, odd rows are mixed by `Gamma`, and rows are put back in RDST
/// order.
pub fn reconstruct_rdst(gamma: &DMatrix<f64>, dst: &TransformMatrix) -> Result<DMatrix<f64>> {
    let m = dst.size();
    let half = m / 2;
    if gamma.shape() != (half, half) {
        return Err(Error::DimensionMismatch(format!(
            "Gamma must be {half}x{half}, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    let s = dst.entries();
    let mut out = DMatrix::zeros(m, m);
    for (dest, src) in kept_rows(m) {
        out.row_mut(dest).copy_from(&s.row(src));
    }
    for (i, dest) in replaced_rows(m).enumerate() {
        for n in 0..m {
            out[(dest, n)] = (0..half).map(|l| gamma[(i, l)] * s[(2 * l + 1, n)]).sum();
        }
    }
    Ok(out)
}
