//! Binary observation container with a JSON sidecar.
//!
//! Layout (little-endian): magic `DADCFOBS`, `u32` version, `u64 n`,
//! `u64 height`, `u64 width`, `f64 rate`, `u8 mode`, `u64 seed`,
//! `u64 seed_noise`, `f64 sigma`, `u64 count`, then `count` `f64` values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{MeasurementMode, MeasurementOperator, Observation};
use crate::error::{format_err, Result};

const MAGIC: &[u8; 8] = b"DADCFOBS";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 * 3 + 8 + 1 + 8 * 2 + 8 + 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationHeader {
    pub version: u32,
    pub n: usize,
    pub height: usize,
    pub width: usize,
    pub rate: f64,
    pub mode: MeasurementMode,
    pub seed: u64,
    pub seed_noise: u64,
    pub sigma: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationFile {
    pub header: ObservationHeader,
    pub y: Vec<f64>,
}

impl ObservationFile {
    pub fn new(op: &MeasurementOperator, obs: &Observation, height: usize, width: usize) -> Self {
        ObservationFile {
            header: ObservationHeader {
                version: VERSION,
                n: op.n(),
                height,
                width,
                rate: op.rate(),
                mode: op.mode(),
                seed: op.seed(),
                seed_noise: obs.seed_noise,
                sigma: obs.sigma,
                count: obs.y.len(),
            },
            y: obs.y.clone(),
        }
    }

    /// Rebuilds the operator that produced the measurements.
    pub fn operator(&self) -> Result<MeasurementOperator> {
        let h = &self.header;
        let op = MeasurementOperator::new(h.n, h.mode, h.seed, h.rate)?;
        if op.measurement_count() != h.count {
            return Err(format_err(
                "observation",
                format!(
                    "header count {} does not match operator count {}",
                    h.count,
                    op.measurement_count()
                ),
            ));
        }
        Ok(op)
    }

    pub fn observation(&self) -> Observation {
        Observation {
            y: self.y.clone(),
            sigma: self.header.sigma,
            seed_noise: self.header.seed_noise,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.y.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&h.version.to_le_bytes());
        for v in [h.n, h.height, h.width] {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
        out.extend_from_slice(&h.rate.to_le_bytes());
        out.push(match h.mode {
            MeasurementMode::ScrambledHadamard => 0,
            MeasurementMode::ComplexNoiselet => 1,
        });
        out.extend_from_slice(&h.seed.to_le_bytes());
        out.extend_from_slice(&h.seed_noise.to_le_bytes());
        out.extend_from_slice(&h.sigma.to_le_bytes());
        out.extend_from_slice(&(self.y.len() as u64).to_le_bytes());
        for v in &self.y {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(format_err(
                "observation",
                "missing magic or truncated header",
            ));
        }
        let mut r = Reader { bytes, pos: 8 };
        let version = u32::from_le_bytes(r.take::<4>());
        if version != VERSION {
            return Err(format_err(
                "observation",
                format!("unsupported version {version}"),
            ));
        }
        let n = r.u64() as usize;
        let height = r.u64() as usize;
        let width = r.u64() as usize;
        let rate = f64::from_bits(r.u64());
        let mode = match r.take::<1>()[0] {
            0 => MeasurementMode::ScrambledHadamard,
            1 => MeasurementMode::ComplexNoiselet,
            m => return Err(format_err("observation", format!("unknown mode byte {m}"))),
        };
        let seed = r.u64();
        let seed_noise = r.u64();
        let sigma = f64::from_bits(r.u64());
        let count = r.u64() as usize;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != 8 * count {
            return Err(format_err(
                "observation",
                format!(
                    "expected {} payload bytes, found {}",
                    8 * count,
                    payload.len()
                ),
            ));
        }
        if height * width != n {
            return Err(format_err("observation", "image shape does not match n"));
        }
        let y = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(ObservationFile {
            header: ObservationHeader {
                version,
                n,
                height,
                width,
                rate,
                mode,
                seed,
                seed_noise,
                sigma,
                count,
            },
            y,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out = self.bytes[self.pos..self.pos + N].try_into().unwrap();
        self.pos += N;
        out
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take::<8>())
    }
}

/// `obs.bin` -> `obs.bin.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the container and its JSON sidecar.
pub fn write_observation(file: &ObservationFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, file.to_bytes())?;
    fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&file.header)?,
    )?;
    Ok(())
}

pub fn read_observation(path: impl AsRef<Path>) -> Result<ObservationFile> {
    ObservationFile::from_bytes(&fs::read(path)?)
}
