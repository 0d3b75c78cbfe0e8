//! Grayscale images on `[0, 1]`, block partitioning and quality metrics.
//!
//! Pixels are stored row-major. Blocks are vectorized column-major,
//! `vec(X)[M * n + m] = X[m][n]`, and `bvec` concatenates the block vectors
//! in raster block order.

mod pgm;
pub mod synthetic;

use crate::error::{Error, Result};

pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, PgmFormat};

/// Returned by [`psnr`] for identical images.
pub const PSNR_CAP_DB: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    /// Rejects pixels outside `[0, 1]` or non-finite values.
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        Self::check_shape(height, width, pixels.len())?;
        if let Some((i, v)) = pixels
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidArgument(format!(
                "pixel {i} has value {v} outside [0, 1]"
            )));
        }
        Ok(ImageGrid {
            height,
            width,
            pixels,
        })
    }

    /// Clips into `[0, 1]`; NaN becomes 0.
    pub fn from_clipped(height: usize, width: usize, mut pixels: Vec<f64>) -> Result<Self> {
        Self::check_shape(height, width, pixels.len())?;
        for p in &mut pixels {
            *p = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
        }
        Ok(ImageGrid {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    fn check_shape(height: usize, width: usize, len: usize) -> Result<()> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if len != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{height}x{width} image needs {} pixels, got {len}",
                height * width
            )));
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.len() as f64
    }

    /// Centered crop to `height x width`.
    pub fn center_crop(&self, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 || height > self.height || width > self.width {
            return Err(Error::DimensionMismatch(format!(
                "cannot crop {}x{} to {height}x{width}",
                self.height, self.width
            )));
        }
        let r0 = (self.height - height) / 2;
        let c0 = (self.width - width) / 2;
        let mut pixels = Vec::with_capacity(height * width);
        for r in r0..r0 + height {
            pixels
                .extend_from_slice(&self.pixels[r * self.width + c0..r * self.width + c0 + width]);
        }
        Ok(ImageGrid {
            height,
            width,
            pixels,
        })
    }

    /// Largest centered crop whose sides are multiples of `m`.
    pub fn crop_to_multiple(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.height || m > self.width {
            return Err(Error::InvalidArgument(format!(
                "block size {m} does not fit a {}x{} image",
                self.height, self.width
            )));
        }
        self.center_crop(self.height / m * m, self.width / m * m)
    }
}

/// `vec` of a row-major `rows x cols` matrix (column-major stacking).
pub fn vec_column_major(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    assert_eq!(data.len(), rows * cols);
    let mut out = Vec::with_capacity(data.len());
    for c in 0..cols {
        for r in 0..rows {
            out.push(data[r * cols + c]);
        }
    }
    out
}

/// An image split into `M x M` blocks, each stored as its column-major `vec`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    block_size: usize,
    blocks_v: usize,
    blocks_h: usize,
    blocks: Vec<Vec<f64>>,
}

pub fn check_divisible(height: usize, width: usize, m: usize) -> Result<()> {
    if m == 0 || height % m != 0 || width % m != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{height}x{width} is not divisible into {m}x{m} blocks"
        )));
    }
    Ok(())
}

pub fn to_blocks(img: &ImageGrid, m: usize) -> Result<BlockGrid> {
    check_divisible(img.height, img.width, m)?;
    let (bv, bh) = (img.height / m, img.width / m);
    let mut blocks = Vec::with_capacity(bv * bh);
    for i in 0..bv {
        for j in 0..bh {
            let mut b = Vec::with_capacity(m * m);
            for n in 0..m {
                for r in 0..m {
                    b.push(img.pixels[(i * m + r) * img.width + j * m + n]);
                }
            }
            blocks.push(b);
        }
    }
    Ok(BlockGrid {
        block_size: m,
        blocks_v: bv,
        blocks_h: bh,
        blocks,
    })
}

pub fn from_blocks(grid: &BlockGrid) -> ImageGrid {
    let m = grid.block_size;
    let (h, w) = (grid.blocks_v * m, grid.blocks_h * m);
    let mut pixels = vec![0.0; h * w];
    for i in 0..grid.blocks_v {
        for j in 0..grid.blocks_h {
            let b = &grid.blocks[i * grid.blocks_h + j];
            for n in 0..m {
                for r in 0..m {
                    pixels[(i * m + r) * w + j * m + n] = b[n * m + r];
                }
            }
        }
    }
    ImageGrid {
        height: h,
        width: w,
        pixels,
    }
}

impl BlockGrid {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// `(blocks_v, blocks_h)`.
    pub fn layout(&self) -> (usize, usize) {
        (self.blocks_v, self.blocks_h)
    }

    pub fn block(&self, i: usize, j: usize) -> &[f64] {
        &self.blocks[i * self.blocks_h + j]
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn bvec(&self) -> Vec<f64> {
        self.blocks.concat()
    }

    pub fn from_bvec(
        block_size: usize,
        blocks_v: usize,
        blocks_h: usize,
        data: &[f64],
    ) -> Result<Self> {
        let n = block_size * block_size;
        if data.len() != n * blocks_v * blocks_h {
            return Err(Error::DimensionMismatch(format!(
                "bvec of {blocks_v}x{blocks_h} blocks of size {block_size} needs {} values, got {}",
                n * blocks_v * blocks_h,
                data.len()
            )));
        }
        Ok(BlockGrid {
            block_size,
            blocks_v,
            blocks_h,
            blocks: data.chunks(n).map(<[f64]>::to_vec).collect(),
        })
    }
}

pub fn mse(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if a.height != b.height || a.width != b.width {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.height, a.width, b.height, b.width
        )));
    }
    Ok(mse_slices(&a.pixels, &b.pixels))
}

pub(crate) fn mse_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// `10 log10(1 / MSE)` for peak 1.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse <= 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB)
    }
}

pub fn psnr(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// `(1 + cos(pi (r^2 + c^2) / N)) / 2`.
pub fn zoneplate(n: usize) -> Result<ImageGrid> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!(
            "zoneplate size {n} is below 16"
        )));
    }
    let kappa = std::f64::consts::PI / n as f64;
    let mut pixels = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let v = 0.5 * (1.0 + (kappa * (r * r + c * c) as f64).cos());
            pixels.push(v.clamp(0.0, 1.0));
        }
    }
    ImageGrid::new(n, n, pixels)
}
