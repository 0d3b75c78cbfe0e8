//! One-dimensional block transforms: DCT-II, the row-permuted DST, the
//! modified DST, the regularity-constrained DST (RDST) and the DFT/DHT
//! comparators.
//!
//! All transforms are `M x M` with `M = 2^m` and stored densely. Rows are
//! subbands, columns are time samples.

mod givens;
mod rdst;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use givens::{factor_givens, GivensCascade, PlaneRotation};
pub use rdst::{
    build_modified_dst, build_rdst, design_rdst, extract_gamma, gram_bounds, reconstruct_rdst,
    GramBound, RdstDesign, RdstStep, NULL_SPACE_TOLERANCE,
};

/// Tolerance used when a transform is required to be orthogonal on input.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Dct,
    Dst,
    ModifiedDst,
    Rdst,
    Dht,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TransformKind::Dct => "dct",
            TransformKind::Dst => "dst",
            TransformKind::ModifiedDst => "modified_dst",
            TransformKind::Rdst => "rdst",
            TransformKind::Dht => "dht",
        };
        f.write_str(s)
    }
}

/// A dense square block transform together with what it is.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    kind: TransformKind,
    entries: DMatrix<f64>,
}

impl TransformMatrix {
    /// Wraps raw entries. The caller vouches for `kind`; nothing is checked
    /// beyond squareness.
    pub fn from_entries(kind: TransformKind, entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "transform must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { kind, entries })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        self.entries.row(k).iter().copied().collect()
    }

    /// `F x` for a length-`M` signal.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.size();
        assert_eq!(x.len(), m, "signal length must equal the transform size");
        (0..m)
            .map(|k| (0..m).map(|n| self.entries[(k, n)] * x[n]).sum())
            .collect()
    }

    /// `max |F F^T - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(&self.entries)
    }

    /// Response to the all-ones signal, `F 1`.
    pub fn dc_response(&self) -> Vec<f64> {
        self.apply(&vec![1.0; self.size()])
    }
}

/// `max |Q Q^T - I|` for a square matrix.
pub fn orthogonality_error(q: &DMatrix<f64>) -> f64 {
    let gram = q * q.transpose();
    max_identity_deviation(&gram)
}

pub(crate) fn max_identity_deviation(g: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((g[(r, c)] - target).abs());
        }
    }
    worst
}

pub(crate) fn validate_size(m: usize, min: usize) -> Result<()> {
    if m < min || !m.is_power_of_two() {
        return Err(Error::InvalidSize(m, min));
    }
    Ok(())
}

/// Orthonormal DCT-II.
pub fn build_dct(m: usize) -> Result<TransformMatrix> {
    validate_size(m, 2)?;
    let mf = m as f64;
    let entries = DMatrix::from_fn(m, m, |k, n| {
        let alpha = if k == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
        alpha * (2.0 / mf).sqrt() * (PI * k as f64 * (n as f64 + 0.5) / mf).cos()
    });
    Ok(TransformMatrix {
        kind: TransformKind::Dct,
        entries,
    })
}

/// Row-permuted DST-II: row 0 carries the highest-frequency (Nyquist) sine
/// `sqrt(1/M) (-1)^n`, row `k >= 1` is the ordinary `k`-th sine row.
pub fn build_dst(m: usize) -> Result<TransformMatrix> {
    validate_size(m, 2)?;
    Ok(TransformMatrix {
        kind: TransformKind::Dst,
        entries: dst_entries(m),
    })
}

pub(crate) fn dst_entries(m: usize) -> DMatrix<f64> {
    let mf = m as f64;
    DMatrix::from_fn(m, m, |k, n| {
        if k == 0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign / mf.sqrt()
        } else {
            (2.0 / mf).sqrt() * (PI * k as f64 * (n as f64 + 0.5) / mf).sin()
        }
    })
}

/// Derives the DST from the DCT by index negation of the rows
/// (`k -> (M - k) mod M`) and alternating column signs.
pub fn dst_from_dct(dct: &TransformMatrix) -> Result<TransformMatrix> {
    if dct.kind != TransformKind::Dct {
        return Err(Error::KindMismatch {
            expected: TransformKind::Dct.to_string(),
            found: dct.kind.to_string(),
        });
    }
    let err = dct.orthogonality_error();
    if err > ORTHOGONALITY_TOLERANCE {
        return Err(Error::NotOrthogonal(err));
    }
    let m = dct.size();
    let entries = DMatrix::from_fn(m, m, |k, n| {
        let src = (m - k) % m;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        dct.entries[(src, n)] * sign
    });
    Ok(TransformMatrix {
        kind: TransformKind::Dst,
        entries,
    })
}

/// Orthonormal discrete Hartley transform, `(1/sqrt(M)) cas(2 pi k n / M)`.
pub fn build_dht(m: usize) -> Result<TransformMatrix> {
    validate_size(m, 2)?;
    let mf = m as f64;
    let entries = DMatrix::from_fn(m, m, |k, n| {
        let phi = 2.0 * PI * (k * n) as f64 / mf;
        (phi.cos() + phi.sin()) / mf.sqrt()
    });
    Ok(TransformMatrix {
        kind: TransformKind::Dht,
        entries,
    })
}

/// Unitary DFT `(1/sqrt(M)) exp(-j 2 pi k n / M)` split into real and
/// imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DftMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl DftMatrix {
    pub fn size(&self) -> usize {
        self.re.nrows()
    }

    /// `max |U U^H - I|` over real and imaginary parts.
    pub fn unitarity_error(&self) -> f64 {
        // U U^H = (R + jI)(R^T - jI^T) = (R R^T + I I^T) + j(I R^T - R I^T)
        let real = &self.re * self.re.transpose() + &self.im * self.im.transpose();
        let imag = &self.im * self.re.transpose() - &self.re * self.im.transpose();
        max_identity_deviation(&real).max(imag.amax())
    }
}

pub fn build_dft(m: usize) -> Result<DftMatrix> {
    validate_size(m, 2)?;
    let mf = m as f64;
    let scale = 1.0 / mf.sqrt();
    let phase = |k: usize, n: usize| 2.0 * PI * ((k * n) % m) as f64 / mf;
    Ok(DftMatrix {
        re: DMatrix::from_fn(m, m, |k, n| scale * phase(k, n).cos()),
        im: DMatrix::from_fn(m, m, |k, n| -scale * phase(k, n).sin()),
    })
}
