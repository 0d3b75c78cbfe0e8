//! Unnormalized fast transforms on power-of-two lengths.

/// In-place Walsh-Hadamard butterfly (natural order, no scaling).
pub fn fwht(x: &mut [f64]) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (x[i], x[i + h]);
                x[i] = a + b;
                x[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Unitary complex noiselet transform of a real or complex signal given as
/// separate real and imaginary parts.
///
/// Length one is the identity; otherwise with `u`, `w` the transforms of the
/// first and second halves,
/// `out[2j] = ((1 - i) u_j + (1 + i) w_j) / 2` and
/// `out[2j + 1] = ((1 + i) u_j + (1 - i) w_j) / 2`.
pub fn noiselet(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert_eq!(n, im.len());
    debug_assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    let half = n / 2;
    {
        let (rl, rr) = re.split_at_mut(half);
        let (il, ir) = im.split_at_mut(half);
        noiselet(rl, il);
        noiselet(rr, ir);
    }
    let (ur, ui) = (re[..half].to_vec(), im[..half].to_vec());
    let (wr, wi) = (re[half..].to_vec(), im[half..].to_vec());
    for j in 0..half {
        // (1 - i)(a + ib) = (a + b) + i(b - a); (1 + i)(a + ib) = (a - b) + i(a + b)
        let (umr, umi) = (ur[j] + ui[j], ui[j] - ur[j]);
        let (upr, upi) = (ur[j] - ui[j], ur[j] + ui[j]);
        let (wmr, wmi) = (wr[j] + wi[j], wi[j] - wr[j]);
        let (wpr, wpi) = (wr[j] - wi[j], wr[j] + wi[j]);
        re[2 * j] = 0.5 * (umr + wpr);
        im[2 * j] = 0.5 * (umi + wpi);
        re[2 * j + 1] = 0.5 * (upr + wmr);
        im[2 * j + 1] = 0.5 * (upi + wmi);
    }
}

/// Adjoint (inverse) of [`noiselet`].
pub fn noiselet_adjoint(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    if n == 1 {
        return;
    }
    let half = n / 2;
    let (ar, ai) = (re.to_vec(), im.to_vec());
    for j in 0..half {
        let (er, ei) = (ar[2 * j], ai[2 * j]);
        let (or, oi) = (ar[2 * j + 1], ai[2 * j + 1]);
        // u_j = ((1 + i) e + (1 - i) o) / 2, w_j = ((1 - i) e + (1 + i) o) / 2
        let (epr, epi) = (er - ei, er + ei);
        let (emr, emi) = (er + ei, ei - er);
        let (opr, opi) = (or - oi, or + oi);
        let (omr, omi) = (or + oi, oi - or);
        re[j] = 0.5 * (epr + omr);
        im[j] = 0.5 * (epi + omi);
        re[half + j] = 0.5 * (emr + opr);
        im[half + j] = 0.5 * (emi + opi);
    }
    let (rl, rr) = re.split_at_mut(half);
    let (il, ir) = im.split_at_mut(half);
    noiselet_adjoint(rl, il);
    noiselet_adjoint(rr, ir);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn popcount_parity(v: usize) -> f64 {
        if v.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn fwht_matches_sylvester() {
        let n = 16;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = x.clone();
        fwht(&mut y);
        for (k, yk) in y.iter().enumerate() {
            let expect: f64 = (0..n).map(|j| popcount_parity(k & j) * x[j]).sum();
            assert!((yk - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn noiselet_unitary_and_inverse() {
        let n = 32;
        let re0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let im0: Vec<f64> = (0..n).map(|i| (i as f64 * 1.3).sin()).collect();
        let (mut re, mut im) = (re0.clone(), im0.clone());
        noiselet(&mut re, &mut im);
        let e0: f64 = re0.iter().chain(&im0).map(|v| v * v).sum();
        let e1: f64 = re.iter().chain(&im).map(|v| v * v).sum();
        assert!((e0 - e1).abs() < 1e-10);
        noiselet_adjoint(&mut re, &mut im);
        for i in 0..n {
            assert!((re[i] - re0[i]).abs() < 1e-12 && (im[i] - im0[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn noiselet_entries_have_constant_modulus() {
        let n = 16;
        for j in 0..n {
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            re[j] = 1.0;
            noiselet(&mut re, &mut im);
            for k in 0..n {
                let m = re[k].hypot(im[k]);
                assert!((m - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
            }
        }
    }
}
