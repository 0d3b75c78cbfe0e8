pub mod decompose;
pub mod design;
pub mod pipeline;
pub mod replay;
pub mod report;
pub mod synth;
pub mod verify;

use std::fs;
use std::path::Path;

use dadcf::frames::{FrameFamily, FrameOperator};
use dadcf::matrix_io::write_matrix_csv;
use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

pub fn parse_family(name: &str) -> CliResult<FrameFamily> {
    Ok(FrameFamily::parse(name)?)
}

pub fn build_frame(family: &str, size: usize) -> CliResult<FrameOperator> {
    Ok(FrameOperator::build(parse_family(family)?, size)?)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))
}

pub fn write_csv(path: &Path, m: &DMatrix<f64>) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    write_matrix_csv(m, std::io::BufWriter::new(file))?;
    Ok(())
}
