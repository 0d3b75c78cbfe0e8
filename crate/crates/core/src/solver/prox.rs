//! Proximal operators and projections.

use crate::error::{Error, Result};

/// Componentwise soft-thresholding `sign(v) max(|v| - gamma, 0)`.
pub fn prox_l1(v: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    prox_l1_in_place(&mut out, gamma);
    out
}

pub fn prox_l1_in_place(v: &mut [f64], gamma: f64) {
    for x in v {
        let a = x.abs() - gamma;
        *x = if a > 0.0 { a.copysign(*x) } else { 0.0 };
    }
}

/// Group soft-thresholding over consecutive groups of `group_size`.
pub fn prox_l12(v: &[f64], gamma: f64, group_size: usize) -> Result<Vec<f64>> {
    if group_size == 0 || v.len() % group_size != 0 {
        return Err(Error::DimensionMismatch(format!(
            "length {} is not divisible by group size {group_size}",
            v.len()
        )));
    }
    let mut out = v.to_vec();
    for g in out.chunks_mut(group_size) {
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = if norm > gamma {
            1.0 - gamma / norm
        } else {
            0.0
        };
        g.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(out)
}

/// Group soft-thresholding where group `i` is `{v[i], v[i + len / 2]}`.
/// This is the layout produced by stacking vertical and horizontal
/// differences.
pub fn prox_l12_split_in_place(v: &mut [f64], gamma: f64) {
    let half = v.len() / 2;
    let (a, b) = v.split_at_mut(half);
    for (p, q) in a.iter_mut().zip(b.iter_mut()) {
        let norm = p.hypot(*q);
        let scale = if norm > gamma {
            1.0 - gamma / norm
        } else {
            0.0
        };
        *p *= scale;
        *q *= scale;
    }
}

/// Clip into `[0, 1]`.
pub fn prox_box01(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.clamp(0.0, 1.0)).collect()
}

pub fn prox_box01_in_place(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
}

/// Projection onto `{u : ||u - y|| <= epsilon}`.
pub fn project_ball(v: &[f64], center: &[f64], epsilon: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    project_ball_in_place(&mut out, center, epsilon);
    out
}

pub fn project_ball_in_place(v: &mut [f64], center: &[f64], epsilon: f64) {
    let dist = v
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if dist <= epsilon {
        return;
    }
    let s = epsilon / dist;
    for (a, b) in v.iter_mut().zip(center) {
        *a = b + s * (*a - b);
    }
}

/// Prox of the indicator of `{y}`: always `y`.
pub fn project_point(_v: &[f64], y: &[f64]) -> Vec<f64> {
    y.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        assert_eq!(prox_l1(&[2.0, -0.5, 1.0], 1.0), vec![1.0, 0.0, 0.0]);
        let v = [0.3, -2.0, 5.5];
        assert_eq!(prox_l1(&v, 0.0), v.to_vec());
    }

    #[test]
    fn l12_examples() {
        let out = prox_l12(&[3.0, 4.0], 1.0, 2).unwrap();
        assert!((out[0] - 2.4).abs() < 1e-12 && (out[1] - 3.2).abs() < 1e-12);
        assert_eq!(prox_l12(&[0.3, 0.4], 0.5, 2).unwrap(), vec![0.0, 0.0]);
        let v = [2.0, -0.5, 1.0, -3.0];
        assert_eq!(prox_l12(&v, 1.0, 1).unwrap(), prox_l1(&v, 1.0));
        assert!(prox_l12(&v, 1.0, 3).is_err());
    }

    #[test]
    fn split_layout_pairs_halves() {
        let mut v = vec![3.0, 0.0, 4.0, 1.0];
        prox_l12_split_in_place(&mut v, 1.0);
        assert!((v[0] - 2.4).abs() < 1e-12 && (v[2] - 3.2).abs() < 1e-12);
        assert_eq!(v[1], 0.0);
        assert_eq!(v[3], 0.0);
    }

    #[test]
    fn projections() {
        assert_eq!(prox_box01(&[-0.2, 0.5, 1.3]), vec![0.0, 0.5, 1.0]);
        let y = [1.0, 1.0];
        assert_eq!(project_ball(&[1.1, 0.9], &y, 0.5), vec![1.1, 0.9]);
        let p = project_ball(&[4.0, 5.0], &y, 1.0);
        assert!(((p[0] - 1.0).hypot(p[1] - 1.0) - 1.0).abs() < 1e-12);
        assert_eq!(project_point(&[7.0, 8.0], &y), y.to_vec());
    }
}
