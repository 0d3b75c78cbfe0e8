//! Factorization of an orthogonal matrix into plane rotations.
//!
//! Elimination runs column by column, zeroing each sub-diagonal entry
//! against the diagonal pivot. The result satisfies
//! `Q = diag(trailing_signs) * R_1 * R_2 * ... * R_K`, where `R_k` is the
//! standard rotation by `angle` in the `(i, j)` plane:
//! `R[i][i] = R[j][j] = cos`, `R[i][j] = -sin`, `R[j][i] = sin`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{orthogonality_error, ORTHOGONALITY_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneRotation {
    pub i: usize,
    pub j: usize,
    /// Radians.
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GivensCascade {
    pub size: usize,
    pub rotations: Vec<PlaneRotation>,
    pub trailing_signs: Vec<i8>,
}

impl GivensCascade {
    pub fn rotation_count(&self) -> usize {
        self.rotations.len()
    }

    /// Multiplies the cascade back into a dense matrix.
    pub fn recompose(&self) -> DMatrix<f64> {
        let n = self.size;
        let mut q = DMatrix::<f64>::identity(n, n);
        // Apply R_K first and R_1 last on the left: Q = S R_1 ... R_K.
        for rot in self.rotations.iter().rev() {
            rotate_rows(&mut q, rot.i, rot.j, rot.angle.cos(), rot.angle.sin(), true);
        }
        for (r, &s) in self.trailing_signs.iter().enumerate() {
            if s < 0 {
                q.row_mut(r).neg_mut();
            }
        }
        q
    }
}

/// Left-multiplies rows `i`, `j` by the rotation (or its transpose).
fn rotate_rows(q: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64, forward: bool) {
    let s = if forward { s } else { -s };
    for col in 0..q.ncols() {
        let a = q[(i, col)];
        let b = q[(j, col)];
        q[(i, col)] = c * a - s * b;
        q[(j, col)] = s * a + c * b;
    }
}

pub fn factor_givens(q: &DMatrix<f64>) -> Result<GivensCascade> {
    if !q.is_square() || q.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    let err = orthogonality_error(q);
    if err > ORTHOGONALITY_TOLERANCE {
        return Err(Error::NotOrthogonal(err));
    }
    let n = q.nrows();
    let mut work = q.clone();
    let mut trailing_signs = vec![1i8; n];
    if work.clone().determinant() < 0.0 {
        trailing_signs[n - 1] = -1;
        work.row_mut(n - 1).neg_mut();
    }

    let mut rotations = Vec::with_capacity(n * (n - 1) / 2);
    for col in 0..n {
        for row in col + 1..n {
            let a = work[(col, col)];
            let b = work[(row, col)];
            let angle = b.atan2(a);
            // Apply R^T so that the (row, col) entry vanishes.
            rotate_rows(&mut work, col, row, angle.cos(), angle.sin(), false);
            work[(row, col)] = 0.0;
            rotations.push(PlaneRotation {
                i: col,
                j: row,
                angle,
            });
        }
    }

    Ok(GivensCascade {
        size: n,
        rotations,
        trailing_signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{build_dst, build_rdst, extract_gamma};

    #[test]
    fn identity_gives_zero_angles() {
        let c = factor_givens(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(c.rotation_count(), 6);
        assert!(c.rotations.iter().all(|r| r.angle == 0.0));
        assert!(c.trailing_signs.iter().all(|&s| s == 1));
    }

    #[test]
    fn single_plane_rotation() {
        let t: f64 = 0.3;
        let q = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let c = factor_givens(&q).unwrap();
        assert_eq!(c.rotation_count(), 1);
        assert!((c.rotations[0].angle - 0.3).abs() < 1e-14);
        assert!((c.recompose() - q).amax() < 1e-14);
    }

    #[test]
    fn reflection_uses_trailing_sign() {
        let q = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let c = factor_givens(&q).unwrap();
        assert_eq!(c.trailing_signs, vec![1, 1, -1]);
        assert!((c.recompose() - q).amax() < 1e-12);
    }

    #[test]
    fn rdst_gamma_rotation_count() {
        for m in [4usize, 8, 16, 32] {
            let gamma = extract_gamma(&build_rdst(m).unwrap(), &build_dst(m).unwrap()).unwrap();
            let c = factor_givens(&gamma).unwrap();
            assert_eq!(c.rotation_count(), m * (m - 2) / 8);
            assert!((c.recompose() - &gamma).amax() < 1e-10);
        }
    }

    #[test]
    fn non_orthogonal_rejected() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(factor_givens(&q), Err(Error::NotOrthogonal(_))));
    }
}
