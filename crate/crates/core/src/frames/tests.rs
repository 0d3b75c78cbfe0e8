use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

const SIZES: [usize; 4] = [4, 8, 16, 32];

fn random_block(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn all_parseval_families() -> Vec<FrameFamily> {
    vec![
        FrameFamily::Dadcf,
        FrameFamily::Rdadcf,
        FrameFamily::Separable(SeparableKind::Dct),
        FrameFamily::Separable(SeparableKind::Dft),
        FrameFamily::Separable(SeparableKind::Dht),
    ]
}

#[test]
fn parseval_all_sizes() {
    for family in all_parseval_families() {
        for m in SIZES {
            let op = FrameOperator::build(family, m).unwrap();
            assert!(op.is_parseval());
            let err = op.parseval_error();
            assert!(err < 1e-10, "{family} M={m}: {err}");
        }
    }
}

#[test]
fn output_dimensions() {
    for m in SIZES {
        for family in [FrameFamily::Dadcf, FrameFamily::Rdadcf] {
            let op = FrameOperator::build(family, m).unwrap();
            assert_eq!(op.output_dim(), 2 * m * m);
        }
        let p = FrameOperator::build(FrameFamily::DadcfPyramid, m).unwrap();
        assert_eq!(p.output_dim(), 2 * m * m + 1);
        let dft = FrameOperator::build(FrameFamily::Separable(SeparableKind::Dft), m).unwrap();
        assert_eq!(dft.output_dim(), 2 * m * m);
        let dct = FrameOperator::build(FrameFamily::Separable(SeparableKind::Dct), m).unwrap();
        assert_eq!(dct.output_dim(), m * m);
    }
}

#[test]
fn directional_counts() {
    for m in SIZES {
        let d = build_dadcf(m).unwrap();
        assert_eq!(d.directional_count(), 2 * (m - 1) * (m - 1));
        let r = build_rdadcf(m).unwrap();
        assert_eq!(r.directional_count(), 2 * (m - 2) * (m - 2));
    }
}

#[test]
fn size_validation() {
    assert!(build_rdadcf(2).is_err());
    assert!(build_dadcf(6).is_err());
    assert!(build_dadcf(2).is_ok());
    assert!(build_pyramid(0).is_err());
}

#[test]
fn fast_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut families = all_parseval_families();
    families.push(FrameFamily::DadcfPyramid);
    for family in families {
        for m in SIZES {
            let op = FrameOperator::build(family, m).unwrap();
            let x = random_block(&mut rng, m * m);
            let mut fast = vec![0.0; op.output_dim()];
            op.analyze_block(&x, &mut fast);
            let dense = op.analyze_dense(&x);
            let diff = fast
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "{family} M={m}: {diff}");

            let y = random_block(&mut rng, op.output_dim());
            let mut adj = vec![0.0; m * m];
            op.adjoint_block(&y, &mut adj);
            let yv = nalgebra::DVector::from_column_slice(&y);
            let dense_adj = op.analysis().transpose() * yv;
            let diff = adj
                .iter()
                .zip(dense_adj.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "{family} M={m} adjoint: {diff}");
        }
    }
}

#[test]
fn rows_have_equal_norm() {
    for family in [FrameFamily::Dadcf, FrameFamily::Rdadcf] {
        let op = FrameOperator::build(family, 8).unwrap();
        for r in 0..op.output_dim() {
            let n = op.analysis().row(r).norm();
            assert!((n - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }
}

fn theta(k: usize, n: usize, m: usize) -> f64 {
    PI * (k * (2 * n + 1)) as f64 / (2 * m) as f64
}

#[test]
fn directional_atoms_closed_form() {
    for m in SIZES {
        let op = build_dadcf(m).unwrap();
        let mut checked = 0;
        for (idx, sb) in op.subband_map().iter().enumerate() {
            let Some(o) = sb.orientation else { continue };
            let atom = op.directional_atom(idx).unwrap();
            for nv in 0..m {
                for nh in 0..m {
                    let tv = theta(sb.k_v, nv, m);
                    let th = theta(sb.k_h, nh, m);
                    let expected = 2.0 / m as f64 * (tv - o as f64 * th).cos();
                    assert!((atom.grid[(nv, nh)] - expected).abs() < 1e-12);
                }
            }
            checked += 1;
        }
        assert_eq!(checked, 2 * (m - 1) * (m - 1));
    }
}

#[test]
fn dc_atom_is_constant() {
    let m = 8;
    let op = build_dadcf(m).unwrap();
    let idx = op
        .subband_map()
        .iter()
        .position(|s| s.branch == Branch::Cos && s.k_v == 0 && s.k_h == 0)
        .unwrap();
    assert_eq!(idx, 0);
    let atom = op.atom(idx).unwrap();
    assert!(atom.grid.iter().all(|v| (v - 1.0 / m as f64).abs() < 1e-12));
}

#[test]
fn atoms_unit_norm_and_bounds() {
    for family in [
        FrameFamily::Dadcf,
        FrameFamily::Rdadcf,
        FrameFamily::DadcfPyramid,
    ] {
        let op = FrameOperator::build(family, 4).unwrap();
        for i in 0..op.output_dim() {
            assert!((op.atom(i).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            op.atom(op.output_dim()),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}

#[test]
fn dht_pair_identity() {
    let m = 8;
    let op = build_separable(SeparableKind::Dht, m).unwrap();
    let row = |kv: usize, kh: usize| op.analysis().row(kv * m + kh).clone_owned();
    for kv in 1..m {
        for kh in 1..m {
            if kv == m / 2 || kh == m / 2 {
                continue;
            }
            let a = row(kv, kh);
            let b = row(m - kv, m - kh);
            for nh in 0..m {
                for nv in 0..m {
                    let fv = 2.0 * PI * (kv * nv) as f64 / m as f64;
                    let fh = 2.0 * PI * (kh * nh) as f64 / m as f64;
                    let j = nh * m + nv;
                    let sum = 0.5 * (a[j] + b[j]);
                    let diff = 0.5 * (a[j] - b[j]);
                    assert!((sum - (fv - fh).cos() / m as f64).abs() < 1e-12);
                    assert!((diff - (fv + fh).sin() / m as f64).abs() < 1e-12);
                }
            }
        }
    }
}

fn l0(v: &[f64]) -> usize {
    v.iter().filter(|x| x.abs() > 1e-10).count()
}

#[test]
fn constant_block_sparsity() {
    for m in SIZES {
        let r = build_rdadcf(m).unwrap().constant_response();
        assert!(l0(&r) <= 2, "RDADCF M={m}: {}", l0(&r));
        let d = build_dadcf(m).unwrap().constant_response();
        assert!(l0(&d) > 2, "DADCF M={m}");
        let p = build_pyramid(m).unwrap().constant_response();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[1..].iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn pyramid_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in SIZES {
        let op = build_pyramid(m).unwrap();
        assert!(!op.is_parseval());
        for _ in 0..20 {
            let x = random_block(&mut rng, m * m);
            let mut c = vec![0.0; op.output_dim()];
            op.analyze_block(&x, &mut c);
            let mean = x.iter().sum::<f64>() / (m * m) as f64;
            assert!((c[0] - mean).abs() < 1e-14);
            let mut back = vec![0.0; m * m];
            op.synthesize_block(&c, &mut back);
            let err = x
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }
}

#[test]
fn pyramid_image_coefficient_count() {
    let n = 32;
    let m = 8;
    let op = build_pyramid(m).unwrap();
    assert_eq!(image_coef_len(&op, n, n), 2 * n * n + (n / m) * (n / m));
}

#[test]
fn image_adjoint_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (h, w) = (16, 24);
    for family in [FrameFamily::Rdadcf, FrameFamily::DadcfPyramid] {
        let op = FrameOperator::build(family, 8).unwrap();
        let x = random_block(&mut rng, h * w);
        let y = random_block(&mut rng, image_coef_len(&op, h, w));
        let ax = analyze_image(&op, &x, h, w);
        let mut aty = vec![0.0; h * w];
        adjoint_image_into(&op, &y, h, w, &mut aty);
        let lhs: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&aty).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));

        let mut back = vec![0.0; h * w];
        synthesize_image_into(&op, &ax, h, w, &mut back);
        let err = x
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}

#[test]
fn dc_leakage_reference_values() {
    let m = 8;
    let (h, w) = (16, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..h * w).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut expected = 0.0;
    for bi in 0..2 {
        for bj in 0..2 {
            let mut s = 0.0;
            for r in 0..m {
                for c in 0..m {
                    s += x[(bi * m + r) * w + bj * m + c];
                }
            }
            let mean = s / (m * m) as f64;
            expected += (m * m) as f64 / 2.0 * mean * mean;
        }
    }
    let d = dc_leakage_energy(&build_dadcf(m).unwrap(), &x, h, w);
    assert!((d - expected).abs() < 1e-10, "{d} vs {expected}");
    let p = dc_leakage_energy(&build_pyramid(m).unwrap(), &x, h, w);
    assert!(p < 1e-20);
    let r = dc_leakage_energy(&build_rdadcf(m).unwrap(), &x, h, w);
    assert!(r < 1e-20);
}

#[test]
fn family_names_round_trip() {
    let mut families = all_parseval_families();
    families.push(FrameFamily::DadcfPyramid);
    for f in families {
        assert_eq!(FrameFamily::parse(&f.to_string()).unwrap(), f);
    }
    assert!(FrameFamily::parse("wavelet").is_err());
}
