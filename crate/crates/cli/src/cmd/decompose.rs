use std::path::PathBuf;

use clap::Args;
use dadcf::frames::{analyze_image, dc_leakage_energy, Branch, Subband};
use dadcf::imagegrid::{check_divisible, read_pgm, write_pgm, ImageGrid, PgmFormat};
use nalgebra::DMatrix;
use serde::Serialize;

use super::{build_frame, ensure_dir, write_csv};
use crate::error::CliResult;
use crate::manifest::{write_json, Recorder};

/// Planes whose peak magnitude is at or below this count as empty.
const ZERO_PLANE: f64 = 1e-10;

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    /// Input PGM image.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value = "rdadcf")]
    pub family: String,
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    #[arg(long, default_value = "decompose")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct PlaneEnergy {
    index: usize,
    #[serde(flatten)]
    subband: Subband,
    energy: f64,
    fraction: f64,
    peak: f64,
}

#[derive(Serialize)]
struct EnergyReport {
    version: u32,
    family: String,
    block_size: usize,
    height: usize,
    width: usize,
    total_energy: f64,
    dc_energy: f64,
    /// Energy the block means send into non-DC outputs, relative to the total.
    dc_leakage_relative: f64,
    /// Non-DC outputs that respond to a constant block.
    leakage_subbands: Vec<usize>,
    /// Share of the total energy held by `leakage_subbands`.
    leakage_subband_fraction: f64,
    nonzero_planes: usize,
    planes: Vec<PlaneEnergy>,
}

pub fn run(args: DecomposeArgs, argv: &[String]) -> CliResult<()> {
    let op = build_frame(&args.family, args.size)?;
    let img = read_pgm(&args.image)?;
    let (h, w, m) = (img.height(), img.width(), args.size);
    check_divisible(h, w, m)?;
    ensure_dir(&args.out)?;
    let planes_dir = args.out.join("planes");
    ensure_dir(&planes_dir)?;
    let mut rec = Recorder::new("decompose", argv, &args)?;
    rec.input(&args.image);

    let d = op.output_dim();
    let (bv, bh) = (h / m, w / m);
    let blocks = bv * bh;
    let coeffs = analyze_image(&op, img.pixels(), h, w);
    // planes[(j, b)]: output j of block b, blocks in raster order.
    let planes = DMatrix::from_fn(d, blocks, |j, b| coeffs[b * d + j]);

    let csv = args.out.join("coefficients.csv");
    write_csv(&csv, &planes)?;
    rec.output(&csv);

    let global = planes.amax();
    let scale = if global > 0.0 { 1.0 / global } else { 0.0 };
    let plane_image = |j: usize| -> CliResult<ImageGrid> {
        let px = (0..blocks).map(|b| planes[(j, b)].abs() * scale).collect();
        Ok(ImageGrid::from_clipped(bv, bh, px)?)
    };
    for j in 0..d {
        let p = planes_dir.join(format!("plane_{j:04}.pgm"));
        write_pgm(&plane_image(j)?, &p, PgmFormat::Binary)?;
        rec.output(&p);
    }

    // Mosaic: non-lowpass outputs tiled column by column, M tiles per column.
    let body: Vec<usize> = (0..d)
        .filter(|&j| op.subband_map()[j].branch != Branch::Lowpass)
        .collect();
    let cols = body.len().div_ceil(m);
    let mut mosaic = vec![0.0; m * bv * cols * bh];
    let mw = cols * bh;
    for (t, &j) in body.iter().enumerate() {
        let (tr, tc) = (t % m, t / m);
        for r in 0..bv {
            for c in 0..bh {
                mosaic[(tr * bv + r) * mw + tc * bh + c] = planes[(j, r * bh + c)].abs() * scale;
            }
        }
    }
    let p = args.out.join("mosaic.pgm");
    write_pgm(
        &ImageGrid::from_clipped(m * bv, mw, mosaic)?,
        &p,
        PgmFormat::Binary,
    )?;
    rec.output(&p);

    let energies: Vec<f64> = (0..d)
        .map(|j| planes.row(j).iter().map(|v| v * v).sum())
        .collect();
    let total: f64 = energies.iter().sum();
    let frac = |e: f64| if total > 0.0 { e / total } else { 0.0 };
    let subbands = op.subband_map();
    let response = op.constant_response();
    let leakage_subbands: Vec<usize> = (0..d)
        .filter(|&j| !subbands[j].is_dc() && response[j].abs() > ZERO_PLANE)
        .collect();
    let report = EnergyReport {
        version: 1,
        family: op.family().to_string(),
        block_size: m,
        height: h,
        width: w,
        total_energy: total,
        dc_energy: (0..d)
            .filter(|&j| subbands[j].is_dc())
            .map(|j| energies[j])
            .sum(),
        dc_leakage_relative: frac(dc_leakage_energy(&op, img.pixels(), h, w)),
        leakage_subband_fraction: frac(leakage_subbands.iter().fold(0.0, |a, &j| a + energies[j])),
        leakage_subbands,
        nonzero_planes: (0..d)
            .filter(|&j| planes.row(j).amax() > ZERO_PLANE)
            .count(),
        planes: (0..d)
            .map(|j| PlaneEnergy {
                index: j,
                subband: subbands[j],
                energy: energies[j],
                fraction: frac(energies[j]),
                peak: planes.row(j).amax(),
            })
            .collect(),
    };
    let p = args.out.join("energy.json");
    write_json(&p, &report)?;
    rec.output(&p);
    rec.finish(args.out.join("manifest.json"))?;
    println!(
        "{} {}x{} M={m}: {} nonzero planes, leakage {:.3e} of total energy",
        report.family, h, w, report.nonzero_planes, report.dc_leakage_relative
    );
    Ok(())
}
