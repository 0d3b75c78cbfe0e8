//! Block-boundary weighted difference operator.

use crate::error::Result;
use crate::imagegrid::check_divisible;

/// `W_b D_hv` on a row-major `height x width` image.
///
/// Output is `(vertical; horizontal)` forward differences, each image-sized,
/// with a zero difference on the last row / column. Both channels are
/// multiplied by the mask, which is zero at pixels whose in-block position
/// is `1..=M-2` in both directions.
#[derive(Debug, Clone)]
pub struct DiffOperator {
    height: usize,
    width: usize,
    block_size: usize,
    mask: Vec<f64>,
}

impl DiffOperator {
    pub fn new(height: usize, width: usize, block_size: usize) -> Result<Self> {
        check_divisible(height, width, block_size)?;
        let m = block_size;
        let interior = |i: usize| m > 2 && (1..=m - 2).contains(&(i % m));
        let mask = (0..height * width)
            .map(|p| {
                let (r, c) = (p / width, p % width);
                if interior(r) && interior(c) {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        Ok(DiffOperator {
            height,
            width,
            block_size,
            mask,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.height * self.width
    }

    pub fn output_dim(&self) -> usize {
        2 * self.height * self.width
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let (dv, dh) = out.split_at_mut(n);
        for r in 0..h {
            for c in 0..w {
                let p = r * w + c;
                let m = self.mask[p];
                dv[p] = if r + 1 < h {
                    m * (x[p + w] - x[p])
                } else {
                    0.0
                };
                dh[p] = if c + 1 < w {
                    m * (x[p + 1] - x[p])
                } else {
                    0.0
                };
            }
        }
    }

    pub fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.input_dim()];
        self.adjoint_into(z, &mut out);
        out
    }

    pub fn adjoint_into(&self, z: &[f64], out: &mut [f64]) {
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let (zv, zh) = z.split_at(n);
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..h {
            for c in 0..w {
                let p = r * w + c;
                let m = self.mask[p];
                if r + 1 < h {
                    let t = m * zv[p];
                    out[p + w] += t;
                    out[p] -= t;
                }
                if c + 1 < w {
                    let t = m * zh[p];
                    out[p + 1] += t;
                    out[p] -= t;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_image_vanishes() {
        let d = DiffOperator::new(16, 8, 4).unwrap();
        assert!(d.apply(&vec![0.4; 128]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn adjoint_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = DiffOperator::new(16, 24, 8).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..d.input_dim())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let z: Vec<f64> = (0..d.output_dim())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let lhs: f64 = d.apply(&x).iter().zip(&z).map(|(a, b)| a * b).sum();
            let rhs: f64 = x.iter().zip(&d.adjoint(&z)).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn mask_selects_block_ring() {
        let m = 4;
        let d = DiffOperator::new(8, 8, m).unwrap();
        // Impulse at an interior pixel of block (0, 0): its own differences
        // are masked, the neighbours' differences towards it survive only on
        // the ring.
        let mut x = vec![0.0; 64];
        x[8 + 1] = 1.0;
        let y = d.apply(&x);
        assert_eq!(y[8 + 1], 0.0);
        assert_eq!(y[64 + 8 + 1], 0.0);
        assert_eq!(y[1], 1.0);
        assert_eq!(y[64 + 8], 1.0);
        // Block-edge pixel (r=3, c=1): vertical difference crosses into the
        // next block and passes.
        let mut e = vec![0.0; 64];
        e[4 * 8 + 1] = 1.0;
        assert_eq!(d.apply(&e)[3 * 8 + 1], 1.0);
        let interior = d.mask().iter().filter(|v| **v == 0.0).count();
        assert_eq!(interior, 4 * (m - 2) * (m - 2));
    }

    #[test]
    fn indivisible_rejected() {
        assert!(DiffOperator::new(10, 8, 4).is_err());
    }
}
