//! Deterministic synthetic test images.
//!
//! `texture` is a stand-in for photographs dominated by oriented stripes
//! (fabric folds, tablecloths): a shaded background carrying several soft
//! edged patches of diagonal gratings. `smooth` is a stand-in for images made
//! of large smooth regions: overlapping Gaussian blobs and soft-edged
//! shapes over a gentle gradient.

use std::f64::consts::PI;

use super::ImageGrid;
use crate::error::{Error, Result};

const MIN_SIZE: usize = 16;

fn check(n: usize) -> Result<()> {
    if n < MIN_SIZE {
        return Err(Error::InvalidArgument(format!(
            "synthetic image size {n} is below {MIN_SIZE}"
        )));
    }
    Ok(())
}

/// Smooth step from 0 to 1 across `width` around `t = 0`.
fn soft(t: f64, width: f64) -> f64 {
    0.5 * (1.0 + (t / width).tanh())
}

struct Patch {
    /// Center and semi-axes, in units of the image size.
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    /// Stripe direction in degrees and period in pixels (at 512 px).
    angle_deg: f64,
    period: f64,
    amplitude: f64,
    base: f64,
}

const PATCHES: [Patch; 5] = [
    Patch {
        cx: 0.28,
        cy: 0.30,
        rx: 0.22,
        ry: 0.18,
        angle_deg: 35.0,
        period: 14.0,
        amplitude: 0.28,
        base: 0.45,
    },
    Patch {
        cx: 0.72,
        cy: 0.26,
        rx: 0.20,
        ry: 0.20,
        angle_deg: 120.0,
        period: 18.0,
        amplitude: 0.25,
        base: 0.35,
    },
    Patch {
        cx: 0.30,
        cy: 0.74,
        rx: 0.24,
        ry: 0.18,
        angle_deg: 150.0,
        period: 12.0,
        amplitude: 0.22,
        base: 0.50,
    },
    Patch {
        cx: 0.74,
        cy: 0.72,
        rx: 0.19,
        ry: 0.22,
        angle_deg: 60.0,
        period: 22.0,
        amplitude: 0.30,
        base: 0.40,
    },
    Patch {
        cx: 0.52,
        cy: 0.50,
        rx: 0.10,
        ry: 0.10,
        angle_deg: 10.0,
        period: 16.0,
        amplitude: 0.20,
        base: 0.55,
    },
];

/// Oriented-grating texture image of size `n x n`.
pub fn texture(n: usize) -> Result<ImageGrid> {
    check(n)?;
    let nf = n as f64;
    let scale = nf / 512.0;
    let mut pixels = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let (y, x) = (r as f64 / nf, c as f64 / nf);
            let mut v = 0.22 + 0.12 * x + 0.08 * (2.0 * PI * y).cos() * (PI * x).sin();
            for p in &PATCHES {
                let d = ((x - p.cx) / p.rx).powi(2) + ((y - p.cy) / p.ry).powi(2);
                let w = soft(1.0 - d.sqrt(), 0.04);
                let a = p.angle_deg.to_radians();
                let t = (c as f64 * a.cos() + r as f64 * a.sin()) / (p.period * scale);
                let stripes = p.base + p.amplitude * (2.0 * PI * t).cos();
                v = (1.0 - w) * v + w * stripes;
            }
            pixels.push(v);
        }
    }
    ImageGrid::from_clipped(n, n, pixels)
}

struct Blob {
    cx: f64,
    cy: f64,
    sigma: f64,
    amplitude: f64,
}

const BLOBS: [Blob; 6] = [
    Blob {
        cx: 0.30,
        cy: 0.35,
        sigma: 0.12,
        amplitude: 0.35,
    },
    Blob {
        cx: 0.70,
        cy: 0.30,
        sigma: 0.09,
        amplitude: 0.25,
    },
    Blob {
        cx: 0.55,
        cy: 0.70,
        sigma: 0.15,
        amplitude: -0.15,
    },
    Blob {
        cx: 0.20,
        cy: 0.80,
        sigma: 0.07,
        amplitude: 0.30,
    },
    Blob {
        cx: 0.85,
        cy: 0.75,
        sigma: 0.10,
        amplitude: 0.20,
    },
    Blob {
        cx: 0.50,
        cy: 0.45,
        sigma: 0.05,
        amplitude: 0.25,
    },
];

/// Smooth, piecewise-smooth image of size `n x n`.
pub fn smooth(n: usize) -> Result<ImageGrid> {
    check(n)?;
    let nf = n as f64;
    let mut pixels = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let (y, x) = (r as f64 / nf, c as f64 / nf);
            let mut v = 0.25 + 0.15 * y - 0.05 * x;
            for b in &BLOBS {
                let d2 = (x - b.cx).powi(2) + (y - b.cy).powi(2);
                v += b.amplitude * (-d2 / (2.0 * b.sigma * b.sigma)).exp();
            }
            // A soft-edged disc and a tilted band.
            let disc = ((x - 0.68).powi(2) + (y - 0.55).powi(2)).sqrt();
            v += 0.15 * soft(0.12 - disc, 0.01);
            let band = (x - 0.15) * 0.8 - (y - 0.1) * 0.6;
            v -= 0.10 * soft(0.05 - band.abs(), 0.01);
            pixels.push(v);
        }
    }
    ImageGrid::from_clipped(n, n, pixels)
}
