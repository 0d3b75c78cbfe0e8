use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::frames::{FrameFamily, FrameOperator};
use crate::imagegrid::{psnr, synthetic};
use crate::sensing::{add_noise, MeasurementMode};

/// Minimum of `gamma f(u) + |u - v|^2 / 2` over a grid around `v`.
fn grid_min(v: &[f64], f: &dyn Fn(&[f64]) -> f64, gamma: f64) -> f64 {
    let steps: usize = if v.len() <= 3 { 81 } else { 31 };
    let radius = 3.0;
    let mut best = f64::INFINITY;
    let mut u = vec![0.0; v.len()];
    let total = steps.pow(v.len() as u32);
    for idx in 0..total {
        let mut k = idx;
        for (j, uj) in u.iter_mut().enumerate() {
            *uj = v[j] - radius + 2.0 * radius * (k % steps) as f64 / (steps - 1) as f64;
            k /= steps;
        }
        let val =
            gamma * f(&u) + 0.5 * u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        best = best.min(val);
    }
    best
}

fn prox_objective(u: &[f64], v: &[f64], f: &dyn Fn(&[f64]) -> f64, gamma: f64) -> f64 {
    gamma * f(u) + 0.5 * u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

fn l1(u: &[f64]) -> f64 {
    u.iter().map(|x| x.abs()).sum()
}

fn l12_pairs(u: &[f64]) -> f64 {
    u.chunks(2).map(|g| g[0].hypot(g[1])).sum()
}

#[test]
fn prox_l1_beats_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let gamma = rng.gen_range(0.1..1.5);
        let p = prox_l1(&v, gamma);
        let ours = prox_objective(&p, &v, &l1, gamma);
        let oracle = grid_min(&v, &l1, gamma);
        assert!(ours <= oracle + 1e-3, "{ours} vs {oracle}");
    }
}

#[test]
fn prox_l12_beats_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let gamma = rng.gen_range(0.1..1.5);
        let p = prox_l12(&v, gamma, 2).unwrap();
        let ours = prox_objective(&p, &v, &l12_pairs, gamma);
        let oracle = grid_min(&v, &l12_pairs, gamma);
        assert!(ours <= oracle + 1e-3, "{ours} vs {oracle}");
    }
}

#[test]
fn projections_are_nearest_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let eps = rng.gen_range(0.2..1.0);
        for (proj, inside) in [
            (
                prox_box01(&v),
                Box::new(|u: &[f64]| u.iter().all(|x| (0.0..=1.0).contains(x)))
                    as Box<dyn Fn(&[f64]) -> bool>,
            ),
            (
                project_ball(&v, &c, eps),
                Box::new(|u: &[f64]| {
                    u.iter()
                        .zip(&c)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        <= eps
                }),
            ),
        ] {
            let indicator = |u: &[f64]| if inside(u) { 0.0 } else { 1e9 };
            let ours = prox_objective(&proj, &v, &|_| 0.0, 1.0);
            let oracle = grid_min(&v, &indicator, 1.0);
            assert!(ours <= oracle + 1e-3, "{ours} vs {oracle}");
        }
    }
}

fn problem(
    n: usize,
    family: FrameFamily,
    rate: f64,
    sigma: f64,
    rho: f64,
    fidelity: FidelityMode,
) -> ProblemSpec {
    let img = synthetic::smooth(n).unwrap();
    let op = MeasurementOperator::new(n * n, MeasurementMode::ScrambledHadamard, 11, rate).unwrap();
    let obs = add_noise(&op.forward(img.pixels()).unwrap(), sigma, 12).unwrap();
    let epsilon = oracle_epsilon(&op, img.pixels(), &obs.y).unwrap();
    ProblemSpec {
        frame: FrameOperator::build(family, 8).unwrap(),
        measurement: op,
        y: obs.y,
        height: n,
        width: n,
        rho,
        epsilon,
        fidelity,
        ground_truth: Some(img.into_pixels()),
    }
}

#[test]
fn stack_adjoint_consistent() {
    let p = problem(32, FrameFamily::Rdadcf, 0.5, 0.0, 1.0, FidelityMode::L2Ball);
    let stack = Stack::new(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<f64> = (0..stack.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w1: Vec<f64> = (0..stack.n1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w2: Vec<f64> = (0..stack.n2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w3: Vec<f64> = (0..stack.n3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (mut a1, mut a2, mut a3) = (
        vec![0.0; stack.n1],
        vec![0.0; stack.n2],
        vec![0.0; stack.n3],
    );
    stack.apply(&x, &mut a1, &mut a2, &mut a3);
    let lhs = dot(&a1, &w1) + dot(&a2, &w2) + dot(&a3, &w3);
    let mut back = vec![0.0; stack.n];
    let mut scratch = vec![0.0; stack.n];
    stack.adjoint(&w1, &w2, &w3, &mut back, &mut scratch);
    assert!((lhs - dot(&x, &back)).abs() < 1e-10);
}

#[test]
fn operator_norm_within_bound() {
    let p1 = problem(32, FrameFamily::Rdadcf, 0.5, 0.0, 0.0, FidelityMode::L2Ball);
    let s1 = Stack::new(&p1).unwrap().norm_sq(50);
    assert!(s1 <= 2.0 + 1e-9 && s1 > 1.5, "{s1}");
    let p2 = problem(
        32,
        FrameFamily::DadcfPyramid,
        0.5,
        0.0,
        1.0,
        FidelityMode::L2Ball,
    );
    let s2 = Stack::new(&p2).unwrap().norm_sq(50);
    assert!(s2 <= 10.0 && s2 > 2.0, "{s2}");
}

#[test]
fn full_sampling_recovers_exactly() {
    let mut p = problem(32, FrameFamily::Rdadcf, 1.0, 0.0, 0.0, FidelityMode::L2Ball);
    p.epsilon = 0.0;
    let cfg = SolverConfig {
        init: Initialization::Zero,
        stop_tol: 1e-6,
        max_iters: 499,
        ..SolverConfig::default()
    };
    let (img, report) = solve(&p, &cfg).unwrap();
    let truth = ImageGrid::new(32, 32, p.ground_truth.clone().unwrap()).unwrap();
    let q = psnr(&img, &truth).unwrap();
    let h = report.psnr_history.as_ref().unwrap();
    assert!(
        q > 60.0,
        "{q} dB after {} iterations: {:?}",
        report.iterations,
        h.iter().step_by(25).collect::<Vec<_>>()
    );
}

#[test]
fn solve_is_bit_reproducible() {
    let p = problem(32, FrameFamily::Dadcf, 0.4, 0.1, 1.0, FidelityMode::L2Ball);
    let cfg = SolverConfig {
        max_iters: 50,
        ..SolverConfig::default()
    };
    let (a, ra) = solve(&p, &cfg).unwrap();
    let (b, rb) = solve(&p, &cfg).unwrap();
    let bits = |g: &ImageGrid| g.pixels().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(ra, rb);
    assert_eq!(ra.residuals.len(), 50);
    assert_eq!(ra.psnr_history.as_ref().unwrap().len(), 50);
}

#[test]
fn equality_mode_runs() {
    let p = problem(
        32,
        FrameFamily::Rdadcf,
        0.5,
        0.0,
        0.0,
        FidelityMode::Equality,
    );
    let cfg = SolverConfig {
        max_iters: 300,
        ..SolverConfig::default()
    };
    let (_, r) = solve(&p, &cfg).unwrap();
    assert!(r.data_residual < 0.5, "{}", r.data_residual);
}

#[test]
fn step_size_check() {
    let p = problem(32, FrameFamily::Rdadcf, 0.5, 0.0, 1.0, FidelityMode::L2Ball);
    let cfg = SolverConfig {
        gamma2: 1.0,
        gamma1: 1.0,
        ..SolverConfig::default()
    };
    assert!(matches!(solve(&p, &cfg), Err(Error::StepSize(_))));
}

#[test]
fn invalid_problems() {
    let mut p = problem(32, FrameFamily::Rdadcf, 0.5, 0.0, 0.0, FidelityMode::L2Ball);
    p.rho = 0.5;
    assert!(p.validate().is_err());
    p.rho = 0.0;
    p.y.pop();
    assert!(p.validate().is_err());
}

#[test]
fn config_json_defaults() {
    let cfg: SolverConfig = serde_json::from_str(r#"{"max_iters": 5}"#).unwrap();
    assert_eq!(cfg.max_iters, 5);
    assert_eq!(cfg.gamma1, 0.01);
    assert!((cfg.gamma2 - 1.0 / 0.12).abs() < 1e-12);
    assert_eq!(cfg.stop_tol, 0.01);
    assert_eq!(SolverConfig::default().max_iters, 3000);
}

#[test]
fn report_csv() {
    let r = ConvergenceReport {
        iterations: 2,
        converged: false,
        residuals: vec![0.5, 0.25],
        psnr_history: Some(vec![10.0, 11.0]),
        final_psnr: Some(11.0),
        operator_norm_sq: 2.0,
        step_product: 0.1,
        objective: 1.0,
        data_residual: 0.0,
        epsilon: 0.0,
    };
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("iteration,residual,psnr\n1,"));
}
