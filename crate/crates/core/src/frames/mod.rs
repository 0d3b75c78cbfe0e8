//! Block frames on `M x M` blocks.
//!
//! A block is handled as `vec(X)` with the column-major convention
//! `x[M * n + m] = X[m][n]` (`m` vertical, `n` horizontal). Every family is
//! described by a set of separable branches `A_v X A_h^T` plus a list of
//! output slots; each slot is a weighted combination of at most two branch
//! coefficients. The scaling/butterfly network and the output permutation
//! are both encoded in that slot list.
//!
//! Output ordering for the directional families: unpaired (scaled)
//! coefficients first in raster order of `(k_v, k_h)`, cosine branch then
//! sine branch; then the `+1` directional outputs in raster order; then the
//! `-1` directional outputs. The pyramid prepends the block mean.

mod spectrum;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::{build_dct, build_dft, build_dht, build_dst, build_rdst, validate_size};

pub use spectrum::{analyticity_ratio, row_spectrum, SpectrumSample, DEFAULT_GRID_SIZE};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparableKind {
    Dct,
    Dft,
    Dht,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameFamily {
    Dadcf,
    Rdadcf,
    DadcfPyramid,
    Separable(SeparableKind),
}

impl FrameFamily {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "dadcf" => FrameFamily::Dadcf,
            "rdadcf" => FrameFamily::Rdadcf,
            "pyramid" | "dadcf_pyramid" | "dadcfp" => FrameFamily::DadcfPyramid,
            "dct" => FrameFamily::Separable(SeparableKind::Dct),
            "dft" => FrameFamily::Separable(SeparableKind::Dft),
            "dht" => FrameFamily::Separable(SeparableKind::Dht),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown frame family `{other}`"
                )))
            }
        })
    }

    /// Smallest supported block size.
    pub fn min_size(self) -> usize {
        match self {
            FrameFamily::Rdadcf => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for FrameFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrameFamily::Dadcf => "dadcf",
            FrameFamily::Rdadcf => "rdadcf",
            FrameFamily::DadcfPyramid => "pyramid",
            FrameFamily::Separable(SeparableKind::Dct) => "dct",
            FrameFamily::Separable(SeparableKind::Dft) => "dft",
            FrameFamily::Separable(SeparableKind::Dht) => "dht",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Cos,
    Sin,
    Mixed,
    Lowpass,
}

/// What a single output coefficient measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subband {
    pub branch: Branch,
    pub k_v: usize,
    pub k_h: usize,
    /// `Some(1)` / `Some(-1)` for directional outputs.
    pub orientation: Option<i8>,
}

impl Subband {
    /// Outputs meant to carry the block's DC content.
    pub fn is_dc(&self) -> bool {
        match self.branch {
            Branch::Lowpass => true,
            Branch::Cos | Branch::Sin => self.k_v == 0 && self.k_h == 0,
            Branch::Mixed => false,
        }
    }
}

/// One output as `sum weight * branch_coefficient`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Slot {
    terms: [(usize, f64); 2],
    len: usize,
}

impl Slot {
    fn single(coef: usize, weight: f64) -> Self {
        Slot {
            terms: [(coef, weight), (0, 0.0)],
            len: 1,
        }
    }

    fn pair(a: (usize, f64), b: (usize, f64)) -> Self {
        Slot {
            terms: [a, b],
            len: 2,
        }
    }

    fn terms(&self) -> &[(usize, f64)] {
        &self.terms[..self.len]
    }
}

/// `A_v X A_h^T`, with both matrices stored row-major for the fast path.
#[derive(Debug, Clone)]
struct SeparableBranch {
    vertical: DMatrix<f64>,
    horizontal: DMatrix<f64>,
    v_rows: Vec<f64>,
    h_rows: Vec<f64>,
}

impl SeparableBranch {
    fn new(vertical: DMatrix<f64>, horizontal: DMatrix<f64>) -> Self {
        let v_rows = row_major(&vertical);
        let h_rows = row_major(&horizontal);
        SeparableBranch {
            vertical,
            horizontal,
            v_rows,
            h_rows,
        }
    }

    /// Column-major block in, column-major coefficient plane out. `out[k_h * M + k_v]`.
    fn forward(&self, m: usize, x: &[f64], tmp: &mut [f64], out: &mut [f64]) {
        let a = &self.v_rows;
        let b = &self.h_rows;
        // tmp[n_h * M + k_v] = sum_nv A_v[k_v][n_v] X[n_v][n_h]
        for nh in 0..m {
            let col = &x[nh * m..(nh + 1) * m];
            for kv in 0..m {
                let arow = &a[kv * m..(kv + 1) * m];
                tmp[nh * m + kv] = arow.iter().zip(col).map(|(p, q)| p * q).sum();
            }
        }
        // out[k_h * M + k_v] = sum_nh tmp[n_h][k_v] A_h[k_h][n_h]
        for kh in 0..m {
            let brow = &b[kh * m..(kh + 1) * m];
            let dst = &mut out[kh * m..(kh + 1) * m];
            dst.iter_mut().for_each(|v| *v = 0.0);
            for nh in 0..m {
                let w = brow[nh];
                let src = &tmp[nh * m..(nh + 1) * m];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }

    /// Accumulates `A_v^T C A_h` into `acc`.
    fn adjoint_accumulate(&self, m: usize, c: &[f64], tmp: &mut [f64], acc: &mut [f64]) {
        let a = &self.v_rows;
        let b = &self.h_rows;
        // tmp[k_h * M + n_v] = sum_kv A_v[k_v][n_v] C[k_v][k_h]
        for kh in 0..m {
            let col = &c[kh * m..(kh + 1) * m];
            let dst = &mut tmp[kh * m..(kh + 1) * m];
            dst.iter_mut().for_each(|v| *v = 0.0);
            for kv in 0..m {
                let w = col[kv];
                if w == 0.0 {
                    continue;
                }
                for (d, s) in dst.iter_mut().zip(&a[kv * m..(kv + 1) * m]) {
                    *d += w * s;
                }
            }
        }
        // acc[n_h * M + n_v] += sum_kh tmp[k_h][n_v] A_h[k_h][n_h]
        for kh in 0..m {
            let src = &tmp[kh * m..(kh + 1) * m];
            let brow = &b[kh * m..(kh + 1) * m];
            for nh in 0..m {
                let w = brow[nh];
                for (d, s) in acc[nh * m..(nh + 1) * m].iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }

    /// Dense `A_h ⊗ A_v`, acting on `vec(X)`.
    fn kronecker(&self) -> DMatrix<f64> {
        self.horizontal.kronecker(&self.vertical)
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        out.extend(m.row(r).iter());
    }
    out
}

/// Analysis operator of a block frame, materialized densely and with a fast
/// separable path.
#[derive(Debug, Clone)]
pub struct FrameOperator {
    block_size: usize,
    family: FrameFamily,
    branches: Vec<SeparableBranch>,
    slots: Vec<Slot>,
    subbands: Vec<Subband>,
    remove_dc: bool,
    analysis: DMatrix<f64>,
}

impl FrameOperator {
    pub fn build(family: FrameFamily, m: usize) -> Result<Self> {
        match family {
            FrameFamily::Dadcf => build_dadcf(m),
            FrameFamily::Rdadcf => build_rdadcf(m),
            FrameFamily::DadcfPyramid => build_pyramid(m),
            FrameFamily::Separable(kind) => build_separable(kind, m),
        }
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn family(&self) -> FrameFamily {
        self.family
    }

    pub fn input_dim(&self) -> usize {
        self.block_size * self.block_size
    }

    pub fn output_dim(&self) -> usize {
        self.subbands.len()
    }

    pub fn subband_map(&self) -> &[Subband] {
        &self.subbands
    }

    /// Dense analysis matrix, `output_dim x input_dim`.
    pub fn analysis(&self) -> &DMatrix<f64> {
        &self.analysis
    }

    /// True when `analysis^T analysis = I`.
    pub fn is_parseval(&self) -> bool {
        !self.remove_dc
    }

    /// `max |F^T F - I|`.
    pub fn parseval_error(&self) -> f64 {
        let g = self.analysis.transpose() * &self.analysis;
        crate::transforms::max_identity_deviation(&g)
    }

    fn coef_len(&self) -> usize {
        self.branches.len() * self.input_dim()
    }

    /// Fast analysis of one column-major block.
    pub fn analyze_block(&self, block: &[f64], out: &mut [f64]) {
        let n = self.input_dim();
        assert_eq!(block.len(), n, "block length");
        assert_eq!(out.len(), self.output_dim(), "coefficient length");
        let m = self.block_size;
        let mut tmp = vec![0.0; n];
        let mut coefs = vec![0.0; self.coef_len()];

        let (dc_out, slots_out) = if self.remove_dc {
            let (head, tail) = out.split_at_mut(1);
            (Some(&mut head[0]), tail)
        } else {
            (None, out)
        };

        let centered;
        let input = if let Some(dc) = dc_out {
            let mean = block.iter().sum::<f64>() / n as f64;
            *dc = mean;
            centered = block.iter().map(|v| v - mean).collect::<Vec<_>>();
            &centered[..]
        } else {
            block
        };

        for (b, branch) in self.branches.iter().enumerate() {
            branch.forward(m, input, &mut tmp, &mut coefs[b * n..(b + 1) * n]);
        }
        for (o, slot) in slots_out.iter_mut().zip(&self.slots) {
            *o = slot.terms().iter().map(|&(c, w)| w * coefs[c]).sum();
        }
    }

    /// Fast adjoint `F^T y` for one block.
    pub fn adjoint_block(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.input_dim();
        assert_eq!(coeffs.len(), self.output_dim(), "coefficient length");
        assert_eq!(out.len(), n, "block length");
        let m = self.block_size;
        let (dc, body) = if self.remove_dc {
            (Some(coeffs[0]), &coeffs[1..])
        } else {
            (None, coeffs)
        };

        let mut coefs = vec![0.0; self.coef_len()];
        for (y, slot) in body.iter().zip(&self.slots) {
            for &(c, w) in slot.terms() {
                coefs[c] += w * y;
            }
        }
        let mut tmp = vec![0.0; n];
        out.iter_mut().for_each(|v| *v = 0.0);
        for (b, branch) in self.branches.iter().enumerate() {
            branch.adjoint_accumulate(m, &coefs[b * n..(b + 1) * n], &mut tmp, out);
        }
        if let Some(dc) = dc {
            // (I - J) on the frame part, J^T-like spreading of the mean.
            let mean = out.iter().sum::<f64>() / n as f64;
            let lift = dc / n as f64;
            out.iter_mut().for_each(|v| *v += lift - mean);
        }
    }

    /// Left inverse: reconstructs the block from its coefficients. For
    /// Parseval families this is the adjoint.
    pub fn synthesize_block(&self, coeffs: &[f64], out: &mut [f64]) {
        if !self.remove_dc {
            self.adjoint_block(coeffs, out);
            return;
        }
        let n = self.input_dim();
        assert_eq!(coeffs.len(), self.output_dim(), "coefficient length");
        assert_eq!(out.len(), n, "block length");
        let m = self.block_size;
        let mut coefs = vec![0.0; self.coef_len()];
        for (y, slot) in coeffs[1..].iter().zip(&self.slots) {
            for &(c, w) in slot.terms() {
                coefs[c] += w * y;
            }
        }
        let mut tmp = vec![0.0; n];
        out.iter_mut().for_each(|v| *v = 0.0);
        for (b, branch) in self.branches.iter().enumerate() {
            branch.adjoint_accumulate(m, &coefs[b * n..(b + 1) * n], &mut tmp, out);
        }
        out.iter_mut().for_each(|v| *v += coeffs[0]);
    }

    /// Dense analysis, for cross-checking the fast path.
    pub fn analyze_dense(&self, block: &[f64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_column_slice(block);
        (&self.analysis * x).iter().copied().collect()
    }

    /// Response of every output to a constant block of ones.
    pub fn constant_response(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim()];
        self.analyze_block(&vec![1.0; self.input_dim()], &mut out);
        out
    }

    /// Frame element `index`, normalized to unit norm.
    pub fn atom(&self, index: usize) -> Result<Atom2D> {
        let row = self.checked_row(index)?;
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        Ok(self.grid_atom(index, &row, scale))
    }

    /// Element `index` with the scaling/butterfly weights removed: the plain
    /// cosine or sine tensor atom for unpaired outputs and `C ± S` for the
    /// directional ones. Separable families return the row unchanged.
    pub fn directional_atom(&self, index: usize) -> Result<Atom2D> {
        let row = self.checked_row(index)?;
        let scale = match self.family {
            FrameFamily::Separable(_) => 1.0,
            _ => match self.subbands[index].branch {
                Branch::Mixed => 2.0,
                Branch::Cos | Branch::Sin => 2f64.sqrt(),
                Branch::Lowpass => 1.0,
            },
        };
        Ok(self.grid_atom(index, &row, scale))
    }

    fn checked_row(&self, index: usize) -> Result<Vec<f64>> {
        if index >= self.output_dim() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.output_dim(),
            });
        }
        Ok(self.analysis.row(index).iter().copied().collect())
    }

    fn grid_atom(&self, index: usize, row: &[f64], scale: f64) -> Atom2D {
        let m = self.block_size;
        Atom2D {
            grid: DMatrix::from_column_slice(m, m, row).map(|v| v * scale),
            subband: self.subbands[index],
        }
    }

    /// Output indices whose subband is directional.
    pub fn directional_count(&self) -> usize {
        self.subbands
            .iter()
            .filter(|s| s.branch == Branch::Mixed)
            .count()
    }
}

/// A frame element viewed as an `M x M` patch, `grid[(n_v, n_h)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom2D {
    pub grid: DMatrix<f64>,
    pub subband: Subband,
}

impl Atom2D {
    pub fn norm(&self) -> f64 {
        self.grid.norm()
    }
}

/// Builds the slot list and subband map for a DCT/sine-branch pair where
/// `(k_v, k_h)` is unpaired when `unpaired(k_v, k_h)` holds.
fn directional_layout(
    m: usize,
    unpaired: impl Fn(usize, usize) -> bool,
) -> (Vec<Slot>, Vec<Subband>) {
    let n = m * m;
    let coef = |kv: usize, kh: usize| kh * m + kv;
    let mut slots = Vec::with_capacity(2 * n);
    let mut subbands = Vec::with_capacity(2 * n);

    for (b, branch) in [Branch::Cos, Branch::Sin].into_iter().enumerate() {
        for kv in 0..m {
            for kh in 0..m {
                if unpaired(kv, kh) {
                    slots.push(Slot::single(b * n + coef(kv, kh), FRAC_1_SQRT_2));
                    subbands.push(Subband {
                        branch,
                        k_v: kv,
                        k_h: kh,
                        orientation: None,
                    });
                }
            }
        }
    }
    for orientation in [1i8, -1] {
        let sin_weight = 0.5 * orientation as f64;
        for kv in 0..m {
            for kh in 0..m {
                if !unpaired(kv, kh) {
                    slots.push(Slot::pair(
                        (coef(kv, kh), 0.5),
                        (n + coef(kv, kh), sin_weight),
                    ));
                    subbands.push(Subband {
                        branch: Branch::Mixed,
                        k_v: kv,
                        k_h: kh,
                        orientation: Some(orientation),
                    });
                }
            }
        }
    }
    (slots, subbands)
}

fn dense_from_slots(branches: &[SeparableBranch], slots: &[Slot], n: usize) -> DMatrix<f64> {
    let krons: Vec<DMatrix<f64>> = branches.iter().map(SeparableBranch::kronecker).collect();
    let mut out = DMatrix::zeros(slots.len(), n);
    for (r, slot) in slots.iter().enumerate() {
        for &(c, w) in slot.terms() {
            let (b, k) = (c / n, c % n);
            for j in 0..n {
                out[(r, j)] += w * krons[b][(k, j)];
            }
        }
    }
    out
}

fn directional_operator(
    family: FrameFamily,
    m: usize,
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
    unpaired: impl Fn(usize, usize) -> bool,
) -> FrameOperator {
    let (slots, subbands) = directional_layout(m, unpaired);
    let branches = vec![
        SeparableBranch::new(cos.clone(), cos),
        SeparableBranch::new(sin.clone(), sin),
    ];
    let analysis = dense_from_slots(&branches, &slots, m * m);
    FrameOperator {
        block_size: m,
        family,
        branches,
        slots,
        subbands,
        remove_dc: false,
        analysis,
    }
}

pub fn build_dadcf(m: usize) -> Result<FrameOperator> {
    validate_size(m, 2)?;
    let op = directional_operator(
        FrameFamily::Dadcf,
        m,
        build_dct(m)?.into_entries(),
        build_dst(m)?.into_entries(),
        |kv, kh| kv == 0 || kh == 0,
    );
    debug_assert_eq!(op.directional_count(), 2 * (m - 1) * (m - 1));
    assert_eq!(
        2 * (m - 1) * (m - 1) + 2 * (2 * m - 1),
        op.output_dim(),
        "DADCF subband bookkeeping"
    );
    Ok(op)
}

pub fn build_rdadcf(m: usize) -> Result<FrameOperator> {
    validate_size(m, 4)?;
    let op = directional_operator(
        FrameFamily::Rdadcf,
        m,
        build_dct(m)?.into_entries(),
        build_rdst(m)?.into_entries(),
        |kv, kh| kv <= 1 || kh <= 1,
    );
    assert_eq!(
        2 * (m - 2) * (m - 2) + 2 * (4 * m - 4),
        op.output_dim(),
        "RDADCF subband bookkeeping"
    );
    Ok(op)
}

/// Block mean followed by the DADCF of the mean-removed block.
pub fn build_pyramid(m: usize) -> Result<FrameOperator> {
    let mut op = build_dadcf(m)?;
    let n = m * m;
    let inner = op.analysis.clone();
    let inv = 1.0 / n as f64;
    // F (I - J) with J = 11^T / n: subtract each row's mean from the row.
    let mut centered = inner;
    for r in 0..centered.nrows() {
        let row_mean = centered.row(r).sum() * inv;
        centered.row_mut(r).add_scalar_mut(-row_mean);
    }
    let mut analysis = DMatrix::zeros(centered.nrows() + 1, n);
    analysis.row_mut(0).fill(inv);
    analysis.rows_mut(1, centered.nrows()).copy_from(&centered);

    let mut subbands = Vec::with_capacity(op.subbands.len() + 1);
    subbands.push(Subband {
        branch: Branch::Lowpass,
        k_v: 0,
        k_h: 0,
        orientation: None,
    });
    subbands.extend(op.subbands.iter().copied());

    op.family = FrameFamily::DadcfPyramid;
    op.analysis = analysis;
    op.subbands = subbands;
    op.remove_dc = true;
    Ok(op)
}

pub fn build_separable(kind: SeparableKind, m: usize) -> Result<FrameOperator> {
    validate_size(m, 2)?;
    let n = m * m;
    let coef = |kv: usize, kh: usize| kh * m + kv;
    let raster = || (0..m).flat_map(move |kv| (0..m).map(move |kh| (kv, kh)));
    let (branches, slots, subbands) = match kind {
        SeparableKind::Dct | SeparableKind::Dht => {
            let f = if kind == SeparableKind::Dct {
                build_dct(m)?
            } else {
                build_dht(m)?
            }
            .into_entries();
            let slots = raster()
                .map(|(kv, kh)| Slot::single(coef(kv, kh), 1.0))
                .collect();
            let subbands = raster()
                .map(|(kv, kh)| Subband {
                    branch: Branch::Cos,
                    k_v: kv,
                    k_h: kh,
                    orientation: None,
                })
                .collect();
            (vec![SeparableBranch::new(f.clone(), f)], slots, subbands)
        }
        SeparableKind::Dft => {
            let u = build_dft(m)?;
            // Branch order: RXR^T, IXI^T, RXI^T, IXR^T.
            let branches = vec![
                SeparableBranch::new(u.re.clone(), u.re.clone()),
                SeparableBranch::new(u.im.clone(), u.im.clone()),
                SeparableBranch::new(u.re.clone(), u.im.clone()),
                SeparableBranch::new(u.im.clone(), u.re.clone()),
            ];
            let mut slots: Vec<Slot> = raster()
                .map(|(kv, kh)| Slot::pair((coef(kv, kh), 1.0), (n + coef(kv, kh), -1.0)))
                .collect();
            slots.extend(raster().map(|(kv, kh)| {
                Slot::pair((2 * n + coef(kv, kh), 1.0), (3 * n + coef(kv, kh), 1.0))
            }));
            let mut subbands: Vec<Subband> = Vec::with_capacity(2 * n);
            for branch in [Branch::Cos, Branch::Sin] {
                subbands.extend(raster().map(|(kv, kh)| Subband {
                    branch,
                    k_v: kv,
                    k_h: kh,
                    orientation: None,
                }));
            }
            (branches, slots, subbands)
        }
    };
    let analysis = dense_from_slots(&branches, &slots, n);
    Ok(FrameOperator {
        block_size: m,
        family: FrameFamily::Separable(kind),
        branches,
        slots,
        subbands,
        remove_dc: false,
        analysis,
    })
}

/// Applies the frame to every block of a row-major `height x width` image.
/// Output is block-raster ordered, one contiguous coefficient vector per
/// block.
pub fn analyze_image(op: &FrameOperator, pixels: &[f64], height: usize, width: usize) -> Vec<f64> {
    let mut out = vec![0.0; image_coef_len(op, height, width)];
    analyze_image_into(op, pixels, height, width, &mut out);
    out
}

pub fn image_coef_len(op: &FrameOperator, height: usize, width: usize) -> usize {
    let m = op.block_size();
    (height / m) * (width / m) * op.output_dim()
}

pub fn analyze_image_into(
    op: &FrameOperator,
    pixels: &[f64],
    height: usize,
    width: usize,
    out: &mut [f64],
) {
    let m = op.block_size();
    assert!(
        height % m == 0 && width % m == 0,
        "image not divisible by block size"
    );
    assert_eq!(pixels.len(), height * width);
    let d = op.output_dim();
    let mut block = vec![0.0; m * m];
    let mut b = 0;
    for bi in 0..height / m {
        for bj in 0..width / m {
            gather_block(pixels, width, m, bi, bj, &mut block);
            op.analyze_block(&block, &mut out[b * d..(b + 1) * d]);
            b += 1;
        }
    }
}

/// Adjoint of [`analyze_image`].
pub fn adjoint_image_into(
    op: &FrameOperator,
    coeffs: &[f64],
    height: usize,
    width: usize,
    out: &mut [f64],
) {
    image_inverse_like(op, coeffs, height, width, out, false)
}

/// Left inverse of [`analyze_image`] (differs from the adjoint only for the
/// pyramid).
pub fn synthesize_image_into(
    op: &FrameOperator,
    coeffs: &[f64],
    height: usize,
    width: usize,
    out: &mut [f64],
) {
    image_inverse_like(op, coeffs, height, width, out, true)
}

fn image_inverse_like(
    op: &FrameOperator,
    coeffs: &[f64],
    height: usize,
    width: usize,
    out: &mut [f64],
    inverse: bool,
) {
    let m = op.block_size();
    assert!(
        height % m == 0 && width % m == 0,
        "image not divisible by block size"
    );
    assert_eq!(out.len(), height * width);
    assert_eq!(coeffs.len(), image_coef_len(op, height, width));
    let d = op.output_dim();
    let mut block = vec![0.0; m * m];
    let mut b = 0;
    for bi in 0..height / m {
        for bj in 0..width / m {
            let c = &coeffs[b * d..(b + 1) * d];
            if inverse {
                op.synthesize_block(c, &mut block);
            } else {
                op.adjoint_block(c, &mut block);
            }
            scatter_block(&block, width, m, bi, bj, out);
            b += 1;
        }
    }
}

fn gather_block(pixels: &[f64], width: usize, m: usize, bi: usize, bj: usize, block: &mut [f64]) {
    for nh in 0..m {
        for nv in 0..m {
            block[nh * m + nv] = pixels[(bi * m + nv) * width + bj * m + nh];
        }
    }
}

fn scatter_block(block: &[f64], width: usize, m: usize, bi: usize, bj: usize, pixels: &mut [f64]) {
    for nh in 0..m {
        for nv in 0..m {
            pixels[(bi * m + nv) * width + bj * m + nh] = block[nh * m + nv];
        }
    }
}

/// Energy that the block-mean component of an image sends into outputs not
/// designated as DC carriers, summed over all blocks.
pub fn dc_leakage_energy(op: &FrameOperator, pixels: &[f64], height: usize, width: usize) -> f64 {
    let m = op.block_size();
    let n = m * m;
    let mut block = vec![0.0; n];
    let mut out = vec![0.0; op.output_dim()];
    let mut total = 0.0;
    for bi in 0..height / m {
        for bj in 0..width / m {
            gather_block(pixels, width, m, bi, bj, &mut block);
            let mean = block.iter().sum::<f64>() / n as f64;
            block.iter_mut().for_each(|v| *v = mean);
            op.analyze_block(&block, &mut out);
            total += out
                .iter()
                .zip(op.subband_map())
                .filter(|(_, s)| !s.is_dc())
                .map(|(v, _)| v * v)
                .sum::<f64>();
        }
    }
    total
}

#[cfg(test)]
mod tests;
