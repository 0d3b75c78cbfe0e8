//! `sense` and `recover`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dadcf::imagegrid::{psnr, read_pgm, write_pgm, PgmFormat};
use dadcf::sensing::{
    add_noise, read_observation, sidecar_path, write_observation, MeasurementMode,
    MeasurementOperator, ObservationFile,
};
use dadcf::solver::{
    oracle_epsilon, solve, ConvergenceReport, FidelityMode, ProblemSpec, SolverConfig,
};
use serde::{Deserialize, Serialize};

use super::build_frame;
use crate::error::{CliError, CliResult};
use crate::manifest::{with_suffix, write_json, Recorder};

pub const RECOVER_REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Args, Serialize)]
pub struct SenseArgs {
    /// Input PGM image; side lengths must multiply to a power of two.
    #[arg(long)]
    pub image: PathBuf,
    /// Sampling rate in (0, 1].
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Seed for the scrambling and the sample mask.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed for the noise; defaults to `seed`.
    #[arg(long)]
    pub seed_noise: Option<u64>,
    /// hadamard or noiselet.
    #[arg(long, default_value = "hadamard")]
    pub mode: String,
    #[arg(long, default_value = "obs.bin")]
    pub out: PathBuf,
}

pub fn sense(args: SenseArgs, argv: &[String]) -> CliResult<()> {
    if !(args.rate > 0.0 && args.rate <= 1.0) {
        return Err(CliError::BadArgs(format!(
            "rate {} is outside (0, 1]",
            args.rate
        )));
    }
    let mode = MeasurementMode::parse(&args.mode)?;
    let img = read_pgm(&args.image)?;
    let seed_noise = args.seed_noise.unwrap_or(args.seed);
    let op = MeasurementOperator::new(img.len(), mode, args.seed, args.rate)?;
    let obs = add_noise(&op.forward(img.pixels())?, args.sigma, seed_noise)?;
    let file = ObservationFile::new(&op, &obs, img.height(), img.width());

    let mut rec = Recorder::new("sense", argv, &args)?;
    rec.seed("seed", args.seed);
    rec.seed("seed_noise", seed_noise);
    rec.input(&args.image);
    write_observation(&file, &args.out)?;
    rec.output(&args.out);
    rec.output(sidecar_path(&args.out));
    rec.finish(with_suffix(&args.out, "manifest.json"))?;
    println!(
        "wrote {} measurements to {}",
        obs.y.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    Ball,
    Equality,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RecoverArgs {
    #[arg(long)]
    pub obs: PathBuf,
    #[arg(long, default_value = "rdadcf")]
    pub family: String,
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    /// 1: frame sparsity only. 2: adds the block-boundary weighted TV term.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub problem: u8,
    /// Solver configuration JSON; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Original image, for PSNR and the oracle radius.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Fidelity radius. Defaults to sigma * sqrt(m).
    #[arg(long, conflicts_with = "epsilon_oracle")]
    pub epsilon: Option<f64>,
    /// Use `||Phi~ x_o - y||` with the `--truth` image as the radius.
    #[arg(long, requires = "truth")]
    pub epsilon_oracle: bool,
    #[arg(long, value_enum, default_value = "ball")]
    pub fidelity: Fidelity,
    /// Name used in aggregated tables; defaults to the truth file stem.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value = "recovered.pgm")]
    pub out: PathBuf,
}

/// Everything `report` needs from one recovery run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoverReport {
    pub version: u32,
    pub label: String,
    pub family: String,
    pub block_size: usize,
    pub problem: u8,
    pub rate: f64,
    pub sigma: f64,
    pub mode: MeasurementMode,
    pub seed: u64,
    pub seed_noise: u64,
    pub height: usize,
    pub width: usize,
    pub epsilon: f64,
    pub epsilon_source: String,
    pub psnr: Option<f64>,
    pub pinv_psnr: Option<f64>,
    pub config: SolverConfig,
    pub convergence: ConvergenceReport,
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn recover(args: RecoverArgs, argv: &[String]) -> CliResult<()> {
    let frame = build_frame(&args.family, args.size)?;
    let config: SolverConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::BadArgs(format!("{}: {e}", p.display())))?
        }
        None => SolverConfig::default(),
    };
    config.validate()?;

    let file = read_observation(&args.obs)?;
    let op = file.operator()?;
    let obs = file.observation();
    let (h, w) = (file.header.height, file.header.width);
    let truth = match &args.truth {
        Some(p) => {
            let t = read_pgm(p)?;
            if (t.height(), t.width()) != (h, w) {
                return Err(CliError::BadArgs(format!(
                    "truth is {}x{}, observation is {h}x{w}",
                    t.height(),
                    t.width()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let (epsilon, epsilon_source) = match (args.epsilon, args.epsilon_oracle, &truth) {
        (_, true, Some(t)) => (oracle_epsilon(&op, t.pixels(), &obs.y)?, "oracle"),
        (Some(e), _, _) => (e, "given"),
        _ => (obs.default_epsilon(), "sigma_sqrt_m"),
    };

    let mut rec = Recorder::new("recover", argv, &args)?;
    rec.seed("seed", file.header.seed);
    rec.seed("seed_noise", file.header.seed_noise);
    rec.input(&args.obs);
    if let Some(p) = &args.config {
        rec.input(p);
    }
    if let Some(p) = &args.truth {
        rec.input(p);
    }

    let pinv_psnr = match &truth {
        Some(t) => Some(psnr(&op.pseudo_inverse_estimate(&obs.y, h, w)?, t)?),
        None => None,
    };
    let problem = ProblemSpec {
        frame,
        measurement: op,
        y: obs.y.clone(),
        height: h,
        width: w,
        rho: if args.problem == 2 { 1.0 } else { 0.0 },
        epsilon,
        fidelity: match args.fidelity {
            Fidelity::Ball => FidelityMode::L2Ball,
            Fidelity::Equality => FidelityMode::Equality,
        },
        ground_truth: truth.as_ref().map(|t| t.pixels().to_vec()),
    };
    let (img, convergence) = solve(&problem, &config)?;
    let quality = match &truth {
        Some(t) => Some(psnr(&img, t)?),
        None => None,
    };

    write_pgm(&img, &args.out, PgmFormat::Binary)?;
    rec.output(&args.out);
    let csv = with_suffix(&args.out, "convergence.csv");
    fs::write(&csv, convergence.to_csv()).map_err(|e| CliError::io(csv.display(), e))?;
    rec.output(&csv);

    let report = RecoverReport {
        version: RECOVER_REPORT_VERSION,
        label: args
            .label
            .clone()
            .or_else(|| args.truth.as_deref().map(stem))
            .unwrap_or_else(|| stem(&args.obs)),
        family: problem.frame.family().to_string(),
        block_size: args.size,
        problem: args.problem,
        rate: file.header.rate,
        sigma: file.header.sigma,
        mode: file.header.mode,
        seed: file.header.seed,
        seed_noise: file.header.seed_noise,
        height: h,
        width: w,
        epsilon,
        epsilon_source: epsilon_source.to_string(),
        psnr: quality,
        pinv_psnr,
        config,
        convergence,
    };
    let rp = with_suffix(&args.out, "report.json");
    write_json(&rp, &report)?;
    rec.output(&rp);
    rec.finish(with_suffix(&args.out, "manifest.json"))?;

    let c = &report.convergence;
    print!(
        "{} M={} problem {}: {} iterations (converged: {})",
        report.family, report.block_size, report.problem, c.iterations, c.converged
    );
    match (quality, pinv_psnr) {
        (Some(q), Some(b)) => println!(", PSNR {q:.2} dB (pseudo-inverse {b:.2} dB)"),
        _ => println!(),
    }
    Ok(())
}
