//! Dense DTFT sampling of 1D filter rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 1024;
const MIN_GRID_SIZE: usize = 256;

/// `|H(omega_i)|` on `omega_i = -pi + 2 pi i / G`, `i = 0..G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub omega: Vec<f64>,
    pub magnitude: Vec<f64>,
}

fn grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::InvalidArgument(format!(
            "grid size {grid_size} is below {MIN_GRID_SIZE}"
        )));
    }
    let step = 2.0 * std::f64::consts::PI / grid_size as f64;
    Ok((0..grid_size)
        .map(|i| -std::f64::consts::PI + step * i as f64)
        .collect())
}

/// Complex DTFT `sum_n h[n] e^{-j omega n}`.
fn dtft(row: &[f64], omega: f64) -> (f64, f64) {
    row.iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (n, &h)| {
            let phase = omega * n as f64;
            (re + h * phase.cos(), im - h * phase.sin())
        })
}

pub fn row_spectrum(row: &[f64], grid_size: usize) -> Result<SpectrumSample> {
    if row.is_empty() {
        return Err(Error::InvalidArgument("empty row".into()));
    }
    let omega = grid(grid_size)?;
    let magnitude = omega
        .iter()
        .map(|&w| {
            let (re, im) = dtft(row, w);
            re.hypot(im)
        })
        .collect();
    Ok(SpectrumSample { omega, magnitude })
}

/// Fraction of the energy of `H + jG` that falls on negative frequencies.
///
/// The bins at `-pi` and `0` sit on the boundary and count half on each
/// side, so a real filter (`G = 0`) gives exactly one half.
pub fn analyticity_ratio(cos_row: &[f64], sin_row: &[f64], grid_size: usize) -> Result<f64> {
    if cos_row.len() != sin_row.len() {
        return Err(Error::DimensionMismatch(format!(
            "rows have lengths {} and {}",
            cos_row.len(),
            sin_row.len()
        )));
    }
    if cos_row.is_empty() {
        return Err(Error::InvalidArgument("empty row".into()));
    }
    let omega = grid(grid_size)?;
    let half = grid_size / 2;
    let (mut negative, mut total) = (0.0, 0.0);
    for (i, &w) in omega.iter().enumerate() {
        let (hr, hi) = dtft(cos_row, w);
        let (gr, gi) = dtft(sin_row, w);
        // H + jG
        let re = hr - gi;
        let im = hi + gr;
        let e = re * re + im * im;
        total += e;
        if i == 0 || (grid_size % 2 == 0 && i == half) {
            negative += 0.5 * e;
        } else if w < 0.0 {
            negative += e;
        }
    }
    if total <= f64::MIN_POSITIVE {
        return Err(Error::InvalidArgument("zero-energy input".into()));
    }
    Ok(negative / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{build_dct, build_dst, build_rdst};

    #[test]
    fn delta_is_flat() {
        let s = row_spectrum(&[1.0, 0.0, 0.0, 0.0], 256).unwrap();
        assert!(s.magnitude.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(s.omega.len(), 256);
        assert!((s.omega[0] + std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn constant_peaks_at_dc() {
        let m = 8;
        let row = vec![1.0 / (m as f64).sqrt(); m];
        let s = row_spectrum(&row, DEFAULT_GRID_SIZE).unwrap();
        let (imax, vmax) =
            s.magnitude
                .iter()
                .enumerate()
                .fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        assert!(s.omega[imax].abs() < 1e-12);
        assert!((vmax - (m as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn real_row_symmetric() {
        let c = build_dct(8).unwrap();
        let s = row_spectrum(&c.row(1), DEFAULT_GRID_SIZE).unwrap();
        let g = s.omega.len();
        for i in 1..g {
            assert!((s.magnitude[i] - s.magnitude[g - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn small_grid_and_empty_rejected() {
        assert!(row_spectrum(&[1.0], 128).is_err());
        assert!(row_spectrum(&[], 256).is_err());
        assert!(analyticity_ratio(&[1.0], &[1.0, 2.0], 256).is_err());
        assert!(analyticity_ratio(&[0.0; 4], &[0.0; 4], 256).is_err());
    }

    #[test]
    fn real_filter_splits_evenly() {
        let c = build_dct(8).unwrap();
        for k in 0..8 {
            let r = analyticity_ratio(&c.row(k), &[0.0; 8], DEFAULT_GRID_SIZE).unwrap();
            assert!((r - 0.5).abs() < 1e-12, "k={k}: {r}");
        }
    }

    #[test]
    fn matched_pairs_are_one_sided() {
        let c = build_dct(8).unwrap();
        let s = build_dst(8).unwrap();
        for k in 1..8 {
            let r = analyticity_ratio(&c.row(k), &s.row(k), DEFAULT_GRID_SIZE).unwrap();
            assert!(r < 0.15, "k={k}: {r}");
            let neg: Vec<f64> = s.row(k).iter().map(|v| -v).collect();
            let q = analyticity_ratio(&c.row(k), &neg, DEFAULT_GRID_SIZE).unwrap();
            assert!(q > 0.85, "k={k}: {q}");
        }
    }

    #[test]
    fn rdst_pairs_stay_one_sided() {
        let c = build_dct(8).unwrap();
        let s = build_rdst(8).unwrap();
        for k in 2..8 {
            let r = analyticity_ratio(&c.row(k), &s.row(k), DEFAULT_GRID_SIZE).unwrap();
            assert!(r < 0.15, "k={k}: {r}");
        }
    }
}
