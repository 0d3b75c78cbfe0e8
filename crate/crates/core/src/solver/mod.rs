//! Primal-dual splitting recovery.
//!
//! Minimizes `||F bvec(x)||_1 + rho ||W_b D x||_{1,2}` over `x` in `[0, 1]`
//! subject to a data-fidelity constraint on `Phi~ x`, with
//! `L = [F bvec; W_b D; Phi~]`. The primal step is the box projection and
//! each dual block is updated through the Moreau identity
//! `z = t - gamma2 prox_{g / gamma2}(t / gamma2)`.

mod prox;
mod wtv;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{adjoint_image_into, analyze_image_into, image_coef_len, FrameOperator};
use crate::imagegrid::{mse_slices, psnr_from_mse, ImageGrid};
use crate::sensing::{stream_rng, MeasurementOperator};

pub use prox::{
    project_ball, project_ball_in_place, project_point, prox_box01, prox_box01_in_place, prox_l1,
    prox_l12, prox_l12_split_in_place, prox_l1_in_place,
};
pub use wtv::DiffOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMode {
    /// `||Phi~ x - y|| <= epsilon`.
    L2Ball,
    /// `Phi~ x = y`.
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    Zero,
    /// Clipped `Phi~^T y`.
    PseudoInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub stop_tol: f64,
    pub max_iters: usize,
    /// The stopping test is skipped before this many iterations. With zero
    /// dual variables the first primal step is exactly zero.
    pub min_iters: usize,
    pub init: Initialization,
    pub power_iters: usize,
    /// Record PSNR per iteration when ground truth is available.
    pub track_psnr: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let gamma1 = 0.01;
        SolverConfig {
            gamma1,
            gamma2: 1.0 / (12.0 * gamma1),
            stop_tol: 0.01,
            max_iters: 3000,
            min_iters: 10,
            init: Initialization::PseudoInverse,
            power_iters: 30,
            track_psnr: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step sizes must be positive, got {} and {}",
                self.gamma1, self.gamma2
            )));
        }
        if !(self.stop_tol >= 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument("invalid stopping parameters".into()));
        }
        Ok(())
    }
}

/// One recovery problem. `rho = 0` is Problem 1, `rho = 1` Problem 2.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub frame: FrameOperator,
    pub measurement: MeasurementOperator,
    pub y: Vec<f64>,
    pub height: usize,
    pub width: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub fidelity: FidelityMode,
    pub ground_truth: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.height * self.width;
        if self.measurement.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "measurement length {} does not match {}x{} image",
                self.measurement.n(),
                self.height,
                self.width
            )));
        }
        crate::imagegrid::check_divisible(self.height, self.width, self.frame.block_size())?;
        if self.y.len() != self.measurement.measurement_count() {
            return Err(Error::DimensionMismatch(format!(
                "observation has {} values, operator produces {}",
                self.y.len(),
                self.measurement.measurement_count()
            )));
        }
        if self.rho != 0.0 && self.rho != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "rho must be 0 or 1, got {}",
                self.rho
            )));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} is negative",
                self.epsilon
            )));
        }
        if let Some(t) = &self.ground_truth {
            if t.len() != n {
                return Err(Error::DimensionMismatch("ground truth size".into()));
            }
        }
        Ok(())
    }
}

/// `||Phi~ x_o - y||` for a known original.
pub fn oracle_epsilon(op: &MeasurementOperator, truth: &[f64], y: &[f64]) -> Result<f64> {
    let ax = op.forward(truth)?;
    if ax.len() != y.len() {
        return Err(Error::DimensionMismatch("observation length".into()));
    }
    Ok(ax
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub converged: bool,
    /// `||x(n+1) - x(n)||` per iteration.
    pub residuals: Vec<f64>,
    pub psnr_history: Option<Vec<f64>>,
    pub final_psnr: Option<f64>,
    /// Power-iteration estimate of `||L||^2`.
    pub operator_norm_sq: f64,
    pub step_product: f64,
    pub objective: f64,
    pub data_residual: f64,
    pub epsilon: f64,
}

impl ConvergenceReport {
    /// `iteration,residual[,psnr]` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.psnr_history.is_some() {
            "iteration,residual,psnr\n"
        } else {
            "iteration,residual\n"
        });
        for (i, r) in self.residuals.iter().enumerate() {
            match &self.psnr_history {
                Some(p) => out.push_str(&format!("{},{r:e},{}\n", i + 1, p[i])),
                None => out.push_str(&format!("{},{r:e}\n", i + 1)),
            }
        }
        out
    }
}

/// The stacked linear operator `L` and its adjoint.
struct Stack<'a> {
    problem: &'a ProblemSpec,
    diff: Option<DiffOperator>,
    n: usize,
    n1: usize,
    n2: usize,
    n3: usize,
}

impl<'a> Stack<'a> {
    fn new(problem: &'a ProblemSpec) -> Result<Self> {
        let (h, w) = (problem.height, problem.width);
        let diff = if problem.rho > 0.0 {
            Some(DiffOperator::new(h, w, problem.frame.block_size())?)
        } else {
            None
        };
        Ok(Stack {
            n: h * w,
            n1: image_coef_len(&problem.frame, h, w),
            n2: diff.as_ref().map_or(0, DiffOperator::output_dim),
            n3: problem.measurement.measurement_count(),
            diff,
            problem,
        })
    }

    fn apply(&self, x: &[f64], z1: &mut [f64], z2: &mut [f64], z3: &mut [f64]) {
        let p = self.problem;
        analyze_image_into(&p.frame, x, p.height, p.width, z1);
        if let Some(d) = &self.diff {
            d.apply_into(x, z2);
        }
        p.measurement.forward_into(x, z3);
    }

    fn adjoint(&self, z1: &[f64], z2: &[f64], z3: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let p = self.problem;
        adjoint_image_into(&p.frame, z1, p.height, p.width, out);
        if let Some(d) = &self.diff {
            d.adjoint_into(z2, scratch);
            out.iter_mut()
                .zip(scratch.iter())
                .for_each(|(o, s)| *o += s);
        }
        p.measurement.adjoint_into(z3, scratch);
        out.iter_mut()
            .zip(scratch.iter())
            .for_each(|(o, s)| *o += s);
    }

    /// Power iteration on `L^T L` from a fixed pseudo-random start.
    fn norm_sq(&self, iters: usize) -> f64 {
        use rand::Rng;
        let mut rng = stream_rng(0x5eed, 0);
        let mut x: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut z1, mut z2, mut z3) = (vec![0.0; self.n1], vec![0.0; self.n2], vec![0.0; self.n3]);
        let mut next = vec![0.0; self.n];
        let mut scratch = vec![0.0; self.n];
        let mut estimate = 0.0;
        for _ in 0..iters.max(1) {
            let norm = l2(&x);
            if norm == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            self.apply(&x, &mut z1, &mut z2, &mut z3);
            self.adjoint(&z1, &z2, &z3, &mut next, &mut scratch);
            estimate = dot(&x, &next);
            std::mem::swap(&mut x, &mut next);
        }
        estimate
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Safety margin on the power-iteration estimate, which approaches
/// `||L||^2` from below.
const NORM_MARGIN: f64 = 1.01;

const DIVERGENCE_WINDOW: usize = 100;
const DIVERGENCE_FACTOR: f64 = 10.0;
const DIVERGENCE_WARMUP: usize = 200;

/// `||F bvec x||_1 + rho ||W_b D x||_{1,2}`; indicator terms are not included.
pub fn objective(problem: &ProblemSpec, x: &[f64]) -> Result<f64> {
    problem.validate()?;
    let stack = Stack::new(problem)?;
    let (mut z1, mut z2, mut z3) = (
        vec![0.0; stack.n1],
        vec![0.0; stack.n2],
        vec![0.0; stack.n3],
    );
    stack.apply(x, &mut z1, &mut z2, &mut z3);
    Ok(objective_from(&z1, &z2, problem.rho))
}

fn objective_from(z1: &[f64], z2: &[f64], rho: f64) -> f64 {
    let l1: f64 = z1.iter().map(|v| v.abs()).sum();
    if rho == 0.0 || z2.is_empty() {
        return l1;
    }
    let half = z2.len() / 2;
    let l12: f64 = (0..half).map(|i| z2[i].hypot(z2[half + i])).sum();
    l1 + rho * l12
}

pub fn solve(
    problem: &ProblemSpec,
    config: &SolverConfig,
) -> Result<(ImageGrid, ConvergenceReport)> {
    problem.validate()?;
    config.validate()?;
    let stack = Stack::new(problem)?;
    let (g1, g2) = (config.gamma1, config.gamma2);

    let norm_sq = stack.norm_sq(config.power_iters);
    let step_product = g1 * g2 * norm_sq * NORM_MARGIN;
    if step_product > 1.0 {
        return Err(Error::StepSize(step_product));
    }

    let n = stack.n;
    let mut x = match config.init {
        Initialization::Zero => vec![0.0; n],
        Initialization::PseudoInverse => {
            let mut x0 = problem.measurement.adjoint(&problem.y)?;
            prox_box01_in_place(&mut x0);
            x0
        }
    };

    let (mut z1, mut z2, mut z3) = (
        vec![0.0; stack.n1],
        vec![0.0; stack.n2],
        vec![0.0; stack.n3],
    );
    let (mut t1, mut t2, mut t3) = (
        vec![0.0; stack.n1],
        vec![0.0; stack.n2],
        vec![0.0; stack.n3],
    );
    let mut lt = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut extrap = vec![0.0; n];

    let truth = problem.ground_truth.as_deref();
    let mut residuals = Vec::new();
    let mut psnr_history = truth.filter(|_| config.track_psnr).map(|_| Vec::new());
    let mut converged = false;

    for iter in 0..config.max_iters {
        // Primal step.
        stack.adjoint(&z1, &z2, &z3, &mut lt, &mut scratch);
        for i in 0..n {
            x_next[i] = (x[i] - g1 * lt[i]).clamp(0.0, 1.0);
            extrap[i] = 2.0 * x_next[i] - x[i];
        }

        // Dual steps.
        stack.apply(&extrap, &mut t1, &mut t2, &mut t3);
        for (t, z) in t1.iter_mut().zip(&z1) {
            *t = z + g2 * *t;
        }
        for (t, z) in t2.iter_mut().zip(&z2) {
            *t = z + g2 * *t;
        }
        for (t, z) in t3.iter_mut().zip(&z3) {
            *t = z + g2 * *t;
        }
        moreau_update(&mut z1, &t1, g2, |v| prox_l1_in_place(v, 1.0 / g2));
        if stack.diff.is_some() {
            let rho = problem.rho;
            moreau_update(&mut z2, &t2, g2, |v| prox_l12_split_in_place(v, rho / g2));
        }
        match problem.fidelity {
            FidelityMode::L2Ball => moreau_update(&mut z3, &t3, g2, |v| {
                project_ball_in_place(v, &problem.y, problem.epsilon)
            }),
            FidelityMode::Equality => {
                for ((z, t), y) in z3.iter_mut().zip(&t3).zip(&problem.y) {
                    *z = t - g2 * y;
                }
            }
        }

        let residual = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut x_next);
        residuals.push(residual);
        if let (Some(h), Some(t)) = (psnr_history.as_mut(), truth) {
            h.push(psnr_from_mse(mse_slices(&x, t)));
        }

        if !residual.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                iteration: iter + 1,
                reason: "non-finite iterate".into(),
            });
        }
        if iter >= DIVERGENCE_WARMUP {
            let past = residuals[iter - DIVERGENCE_WINDOW];
            if residual > config.stop_tol && residual > DIVERGENCE_FACTOR * past {
                return Err(Error::Diverged {
                    iteration: iter + 1,
                    reason: format!(
                        "primal increment grew from {past:e} to {residual:e} over {DIVERGENCE_WINDOW} iterations"
                    ),
                });
            }
        }
        if iter + 1 >= config.min_iters && residual <= config.stop_tol {
            converged = true;
            break;
        }
    }

    stack.apply(&x, &mut z1, &mut z2, &mut z3);
    let objective = objective_from(&z1, &z2, problem.rho);
    let data_residual = z3
        .iter()
        .zip(&problem.y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let final_psnr = truth.map(|t| psnr_from_mse(mse_slices(&x, t)));
    let report = ConvergenceReport {
        iterations: residuals.len(),
        converged,
        residuals,
        psnr_history,
        final_psnr,
        operator_norm_sq: norm_sq,
        step_product,
        objective,
        data_residual,
        epsilon: problem.epsilon,
    };
    Ok((
        ImageGrid::from_clipped(problem.height, problem.width, x)?,
        report,
    ))
}

/// `z = t - gamma2 prox(t / gamma2)`, with `prox` applied in place.
fn moreau_update(z: &mut [f64], t: &[f64], gamma2: f64, prox: impl FnOnce(&mut [f64])) {
    for (zi, ti) in z.iter_mut().zip(t) {
        *zi = ti / gamma2;
    }
    prox(z);
    for (zi, ti) in z.iter_mut().zip(t) {
        *zi = ti - gamma2 * *zi;
    }
}

#[cfg(test)]
mod tests;
