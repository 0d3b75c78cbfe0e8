use std::path::PathBuf;

use clap::Args;
use dadcf::frames::{FrameFamily, SeparableKind};
use dadcf::transforms::{
    build_dct, build_dft, build_dht, build_dst, build_modified_dst, design_rdst, extract_gamma,
    factor_givens,
};
use serde::Serialize;

use super::{build_frame, ensure_dir, write_csv};
use crate::error::CliResult;
use crate::manifest::{write_json, Recorder};

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignArgs {
    /// dadcf, rdadcf, pyramid, dct, dft or dht.
    #[arg(long, default_value = "rdadcf")]
    pub family: String,
    /// Block size M (power of two).
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SubbandEntry {
    index: usize,
    #[serde(flatten)]
    subband: dadcf::frames::Subband,
}

#[derive(Serialize)]
struct SubbandFile {
    version: u32,
    family: String,
    block_size: usize,
    output_dim: usize,
    directional_count: usize,
    subbands: Vec<SubbandEntry>,
}

pub fn run(args: DesignArgs, argv: &[String]) -> CliResult<()> {
    let op = build_frame(&args.family, args.size)?;
    let m = args.size;
    let family = op.family();
    ensure_dir(&args.out)?;
    let mut rec = Recorder::new("design", argv, &args)?;

    let analysis = args.out.join(format!("{family}_{m}_analysis.csv"));
    write_csv(&analysis, op.analysis())?;
    rec.output(&analysis);

    let subbands = args.out.join("subbands.json");
    write_json(
        &subbands,
        &SubbandFile {
            version: 1,
            family: family.to_string(),
            block_size: m,
            output_dim: op.output_dim(),
            directional_count: op.directional_count(),
            subbands: op
                .subband_map()
                .iter()
                .enumerate()
                .map(|(index, &subband)| SubbandEntry { index, subband })
                .collect(),
        },
    )?;
    rec.output(&subbands);

    let mut mats: Vec<(String, nalgebra::DMatrix<f64>)> = Vec::new();
    let mut givens = None;
    match family {
        FrameFamily::Dadcf | FrameFamily::DadcfPyramid => {
            mats.push((format!("dct_{m}.csv"), build_dct(m)?.into_entries()));
            mats.push((format!("dst_{m}.csv"), build_dst(m)?.into_entries()));
        }
        FrameFamily::Rdadcf => {
            let dst = build_dst(m)?;
            let design = design_rdst(m)?;
            let gamma = extract_gamma(&design.rdst, &dst)?;
            givens = Some(factor_givens(&gamma)?);
            mats.push((format!("dct_{m}.csv"), build_dct(m)?.into_entries()));
            mats.push((format!("dst_{m}.csv"), dst.into_entries()));
            mats.push((
                format!("modified_dst_{m}.csv"),
                build_modified_dst(m)?.into_entries(),
            ));
            mats.push((format!("rdst_{m}.csv"), design.rdst.into_entries()));
            mats.push((format!("rdst_gamma_{m}.csv"), gamma));
        }
        FrameFamily::Separable(SeparableKind::Dct) => {
            mats.push((format!("dct_{m}.csv"), build_dct(m)?.into_entries()));
        }
        FrameFamily::Separable(SeparableKind::Dht) => {
            mats.push((format!("dht_{m}.csv"), build_dht(m)?.into_entries()));
        }
        FrameFamily::Separable(SeparableKind::Dft) => {
            let dft = build_dft(m)?;
            mats.push((format!("dft_{m}_re.csv"), dft.re));
            mats.push((format!("dft_{m}_im.csv"), dft.im));
        }
    }
    for (name, mat) in &mats {
        let p = args.out.join(name);
        write_csv(&p, mat)?;
        rec.output(&p);
    }
    if let Some(g) = givens {
        let p = args.out.join(format!("rdst_givens_{m}.json"));
        write_json(&p, &g)?;
        rec.output(&p);
    }

    let manifest = rec.finish(args.out.join("manifest.json"))?;
    println!(
        "wrote {} files for {family} M={m} to {}",
        manifest.outputs.len(),
        args.out.display()
    );
    Ok(())
}
