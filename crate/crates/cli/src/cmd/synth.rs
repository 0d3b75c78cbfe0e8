use std::path::PathBuf;

use clap::{Args, ValueEnum};
use dadcf::imagegrid::{synthetic, write_pgm, zoneplate, PgmFormat};
use serde::Serialize;

use crate::error::CliResult;
use crate::manifest::{with_suffix, Recorder};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Zoneplate,
    Texture,
    Smooth,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Side length in pixels.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: SynthArgs, argv: &[String]) -> CliResult<()> {
    let img = match args.kind {
        SynthKind::Zoneplate => zoneplate(args.size)?,
        SynthKind::Texture => synthetic::texture(args.size)?,
        SynthKind::Smooth => synthetic::smooth(args.size)?,
    };
    let mut rec = Recorder::new("synth", argv, &args)?;
    write_pgm(&img, &args.out, PgmFormat::Binary)?;
    rec.output(&args.out);
    rec.finish(with_suffix(&args.out, "manifest.json"))?;
    println!("wrote {}", args.out.display());
    Ok(())
}
