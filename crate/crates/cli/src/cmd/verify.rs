use std::f64::consts::PI;
use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use dadcf::frames::{
    analyticity_ratio, build_dadcf, Branch, FrameFamily, FrameOperator, SeparableKind,
    DEFAULT_GRID_SIZE,
};
use dadcf::matrix_io::read_matrix_csv;
use dadcf::transforms::{
    build_dct, build_dst, build_modified_dst, design_rdst, extract_gamma, factor_givens,
    gram_bounds, TransformMatrix,
};
use nalgebra::DMatrix;
use serde::Serialize;

use super::build_frame;
use crate::error::{CliError, CliResult};
use crate::manifest::write_json;

const TIGHT: f64 = 1e-10;
const ANALYTICITY_LIMIT: f64 = 0.15;

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "rdadcf")]
    pub family: String,
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    /// Check this analysis matrix (CSV) instead of the built one.
    #[arg(long)]
    pub analysis: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    /// `le`, `ge` or `eq`.
    pub relation: &'static str,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    version: u32,
    family: String,
    block_size: usize,
    source: String,
    checks: Vec<Check>,
    failed: Vec<String>,
    pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn le(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        let pass = measured <= bound;
        self.push(name, measured, bound, "le", pass);
    }

    fn ge(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        let pass = measured >= bound;
        self.push(name, measured, bound, "ge", pass);
    }

    fn eq(&mut self, name: impl Into<String>, measured: usize, expected: usize) {
        self.push(
            name,
            measured as f64,
            expected as f64,
            "eq",
            measured == expected,
        );
    }

    fn push(
        &mut self,
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        relation: &'static str,
        pass: bool,
    ) {
        // NaN never passes.
        let pass = pass && !measured.is_nan();
        self.0.push(Check {
            name: name.into(),
            measured,
            bound,
            relation,
            pass,
        });
    }
}

pub fn run(args: VerifyArgs, _argv: &[String]) -> CliResult<()> {
    let op = build_frame(&args.family, args.size)?;
    let mut checks = Checks::default();

    let source = match &args.analysis {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| CliError::io(path.display(), e))?;
            let f = read_matrix_csv(BufReader::new(file))?;
            if f.shape() != op.analysis().shape() {
                checks.push(
                    "analysis_shape",
                    f.nrows() as f64,
                    op.output_dim() as f64,
                    "eq",
                    false,
                );
            } else {
                parseval_check(&mut checks, &op, &f);
                checks.le(
                    "analysis_matches_reference",
                    (&f - op.analysis()).amax(),
                    TIGHT,
                );
            }
            path.display().to_string()
        }
        None => {
            parseval_check(&mut checks, &op, op.analysis());
            "built".to_string()
        }
    };
    operator_checks(&mut checks, &op)?;

    let failed: Vec<String> = checks
        .0
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    let report = Report {
        version: 1,
        family: op.family().to_string(),
        block_size: op.block_size(),
        source,
        pass: failed.is_empty(),
        failed: failed.clone(),
        checks: checks.0,
    };
    match &args.out {
        Some(p) => write_json(p, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(failed.join(", ")))
    }
}

fn parseval_check(checks: &mut Checks, op: &FrameOperator, f: &DMatrix<f64>) {
    let n = f.ncols();
    let dev = (f.transpose() * f - DMatrix::<f64>::identity(n, n)).amax();
    if op.family() == FrameFamily::DadcfPyramid {
        // Not Parseval; a left inverse is what matters.
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let c: Vec<f64> = (f * DMatrix::from_column_slice(n, 1, &e))
                .iter()
                .copied()
                .collect();
            let mut back = vec![0.0; n];
            op.synthesize_block(&c, &mut back);
            for (i, v) in back.iter().enumerate() {
                worst = worst.max((v - e[i]).abs());
            }
        }
        checks.le("pyramid_round_trip", worst, TIGHT);
    } else {
        checks.le("parseval", dev, TIGHT);
    }
}

/// Deterministic test vector in `[-1, 1)`.
fn probe(len: usize, salt: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = ((i * 31 + salt * 977) as f64 * 12.9898).sin() * 43758.5453;
            2.0 * (t - t.floor()) - 1.0
        })
        .collect()
}

fn operator_checks(checks: &mut Checks, op: &FrameOperator) -> CliResult<()> {
    let m = op.block_size();
    let family = op.family();

    let mut fast_err = 0.0f64;
    let mut adj_err = 0.0f64;
    for salt in 0..8 {
        let x = probe(op.input_dim(), salt);
        let mut c = vec![0.0; op.output_dim()];
        op.analyze_block(&x, &mut c);
        for (a, b) in c.iter().zip(op.analyze_dense(&x)) {
            fast_err = fast_err.max((a - b).abs());
        }
        let z = probe(op.output_dim(), salt + 100);
        let mut back = vec![0.0; op.input_dim()];
        op.adjoint_block(&z, &mut back);
        let dense = op.analysis().transpose() * DMatrix::from_column_slice(z.len(), 1, &z);
        for (a, b) in back.iter().zip(dense.iter()) {
            adj_err = adj_err.max((a - b).abs());
        }
    }
    checks.le("fast_matches_dense", fast_err, 1e-12);
    checks.le("adjoint_matches_dense", adj_err, 1e-12);

    let expected_dim = match family {
        FrameFamily::DadcfPyramid => 2 * m * m + 1,
        FrameFamily::Dadcf | FrameFamily::Rdadcf => 2 * m * m,
        FrameFamily::Separable(SeparableKind::Dft) => 2 * m * m,
        FrameFamily::Separable(_) => m * m,
    };
    checks.eq("output_dim", op.output_dim(), expected_dim);

    match family {
        FrameFamily::Dadcf | FrameFamily::DadcfPyramid => {
            checks.eq(
                "directional_count",
                op.directional_count(),
                2 * (m - 1) * (m - 1),
            );
        }
        FrameFamily::Rdadcf => {
            checks.eq(
                "directional_count",
                op.directional_count(),
                2 * (m - 2) * (m - 2),
            );
        }
        FrameFamily::Separable(_) => {}
    }

    if matches!(family, FrameFamily::Rdadcf | FrameFamily::DadcfPyramid) {
        let resp = op.constant_response();
        let leak = op
            .subband_map()
            .iter()
            .zip(&resp)
            .filter(|(s, _)| !s.is_dc())
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        checks.le("constant_block_non_dc_response", leak, TIGHT);
    }

    if matches!(
        family,
        FrameFamily::Dadcf | FrameFamily::Rdadcf | FrameFamily::DadcfPyramid
    ) {
        checks.le(
            "mixed_atom_closed_form",
            closed_form_error(&build_dadcf(m)?, |_, _| true)?,
            1e-12,
        );
        let dct = build_dct(m)?;
        let dst = build_dst(m)?;
        checks.le(
            "analyticity_dct_dst_max",
            max_ratio(&dct, &dst, 1)?,
            ANALYTICITY_LIMIT,
        );
    }

    if family == FrameFamily::Rdadcf {
        let even = |kv: usize, kh: usize| kv >= 2 && kh >= 2 && kv % 2 == 0 && kh % 2 == 0;
        checks.le(
            "mixed_atom_closed_form_rdst_even_rows",
            closed_form_error(op, even)?,
            1e-12,
        );
        rdst_checks(checks, m)?;
    }

    if family == FrameFamily::Separable(SeparableKind::Dht) {
        checks.le("dht_pair_identity", dht_pair_error(op), 1e-12);
    }
    Ok(())
}

fn theta(k: usize, n: usize, m: usize) -> f64 {
    PI * (k * (2 * n + 1)) as f64 / (2 * m) as f64
}

/// Largest deviation of the directional atoms from `(2/M) cos(theta_v - o theta_h)`.
fn closed_form_error(op: &FrameOperator, select: impl Fn(usize, usize) -> bool) -> CliResult<f64> {
    let m = op.block_size();
    let mut worst = 0.0f64;
    for (idx, sb) in op.subband_map().iter().enumerate() {
        let Some(o) = sb.orientation else { continue };
        if sb.branch != Branch::Mixed || !select(sb.k_v, sb.k_h) {
            continue;
        }
        let atom = op.directional_atom(idx)?;
        for nv in 0..m {
            for nh in 0..m {
                let expected =
                    2.0 / m as f64 * (theta(sb.k_v, nv, m) - o as f64 * theta(sb.k_h, nh, m)).cos();
                worst = worst.max((atom.grid[(nv, nh)] - expected).abs());
            }
        }
    }
    Ok(worst)
}

fn max_ratio(c: &TransformMatrix, s: &TransformMatrix, first: usize) -> CliResult<f64> {
    let mut worst = 0.0f64;
    for k in first..c.size() {
        worst = worst.max(analyticity_ratio(&c.row(k), &s.row(k), DEFAULT_GRID_SIZE)?);
    }
    Ok(worst)
}

fn dht_pair_error(op: &FrameOperator) -> f64 {
    let m = op.block_size();
    let row = |kv: usize, kh: usize| op.analysis().row(kv * m + kh).clone_owned();
    let mut worst = 0.0f64;
    for kv in 1..m {
        for kh in 1..m {
            let a = row(kv, kh);
            let b = row((m - kv) % m, (m - kh) % m);
            for nh in 0..m {
                for nv in 0..m {
                    let fv = 2.0 * PI * (kv * nv) as f64 / m as f64;
                    let fh = 2.0 * PI * (kh * nh) as f64 / m as f64;
                    let j = nh * m + nv;
                    let sum = 0.5 * (a[j] + b[j]) - (fv - fh).cos() / m as f64;
                    let diff = 0.5 * (a[j] - b[j]) - (fv + fh).sin() / m as f64;
                    worst = worst.max(sum.abs()).max(diff.abs());
                }
            }
        }
    }
    worst
}

fn rank(sv: &[f64]) -> usize {
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}

fn rdst_checks(checks: &mut Checks, m: usize) -> CliResult<()> {
    let dst = build_dst(m)?;
    let dct = build_dct(m)?;
    let design = design_rdst(m)?;
    let f = &design.rdst;
    let fe = f.entries();
    let c = 1.0 / (m as f64).sqrt();

    checks.le("rdst_orthogonality", f.orthogonality_error(), TIGHT);
    let dc = f.dc_response();
    let reg = dc
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 {
                (v - (m as f64).sqrt()).abs()
            } else {
                v.abs()
            }
        })
        .fold(0.0, f64::max);
    checks.le("rdst_regularity", reg, TIGHT);

    let mut rows = 0.0f64;
    for n in 0..m {
        rows = rows.max((fe[(0, n)] - c).abs());
        rows = rows.max((fe[(1, n)] - dst.entries()[(0, n)]).abs());
        for l in 1..m / 2 {
            rows = rows.max((fe[(2 * l, n)] - dst.entries()[(2 * l, n)]).abs());
        }
    }
    checks.le("rdst_fixed_rows", rows, 1e-12);

    let v0 = &design.steps[0].null_vector;
    let sign = if v0[0] < 0.0 { -1.0 } else { 1.0 };
    let nyq = v0
        .iter()
        .enumerate()
        .map(|(n, x)| (sign * x - if n % 2 == 0 { c } else { -c }).abs())
        .fold(0.0, f64::max);
    checks.le("first_null_vector_alternating", nyq, 1e-12);

    let s = build_modified_dst(m)?;
    let sv: Vec<f64> = s
        .entries()
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    checks.eq("modified_dst_rank", rank(&sv), m - 1);
    checks.eq(
        "first_deficient_rank",
        rank(&design.steps[0].singular_values),
        m - 1,
    );

    let g = s.entries() * s.entries().transpose();
    let mut gram = 0.0f64;
    for l in 1..m / 2 {
        let k = 2 * l + 1;
        let expected = 2f64.sqrt() / (m as f64 * (PI * k as f64 / (2 * m) as f64).sin());
        gram = gram.max((g[(0, k)] - expected).abs());
    }
    checks.le("modified_dst_gram_closed_form", gram, 1e-12);
    let total: f64 = (1..m).map(|k| g[(0, k)] * g[(0, k)]).sum();
    checks.le("modified_dst_gram_energy", (total - 1.0).abs(), 1e-12);
    if m == 4 {
        checks.le("modified_dst_gram_0_1", (g[(0, 1)] - 0.9239).abs(), 5e-4);
        checks.le("modified_dst_gram_0_3", (g[(0, 3)] - 0.3827).abs(), 5e-4);
    }

    let bounds = gram_bounds(&design)?;
    let off = bounds
        .iter()
        .map(|b| b.max_off_diagonal)
        .fold(0.0, f64::max);
    let diag = bounds
        .iter()
        .map(|b| b.min_updated_diagonal)
        .fold(f64::INFINITY, f64::min);
    checks.le("inverse_gram_off_diagonal_max", off, 0.5 + 1e-9);
    checks.ge("inverse_gram_updated_diagonal_min", diag, 1.0 - 1e-9);

    let gamma = extract_gamma(f, &dst)?;
    let cascade = factor_givens(&gamma)?;
    checks.eq(
        "givens_rotation_count",
        cascade.rotation_count(),
        m * (m - 2) / 8,
    );
    checks.le(
        "givens_recompose",
        (cascade.recompose() - &gamma).amax(),
        TIGHT,
    );

    checks.le(
        "analyticity_dct_rdst_max",
        max_ratio(&dct, f, 2)?,
        ANALYTICITY_LIMIT,
    );
    Ok(())
}
