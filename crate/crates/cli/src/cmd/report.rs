use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use super::pipeline::{RecoverReport, RECOVER_REPORT_VERSION};
use crate::error::{CliError, CliResult};
use crate::manifest::{with_suffix, Recorder};

const FAMILY_ORDER: [&str; 6] = ["dct", "dft", "dht", "pyramid", "rdadcf", "dadcf"];

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Recovery report files, or directories searched for `*.report.json`.
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "table.csv")]
    pub out: PathBuf,
}

/// Explicit files are always taken; directories contribute `*.report.json`.
fn collect(path: &Path, explicit: bool, out: &mut Vec<PathBuf>) -> CliResult<()> {
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| CliError::io(path.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for p in entries {
            collect(&p, false, out)?;
        }
    } else if path.is_file() {
        if explicit || path.to_string_lossy().ends_with(".report.json") {
            out.push(path.to_path_buf());
        }
    } else {
        return Err(CliError::io(path.display(), "no such file or directory"));
    }
    Ok(())
}

/// Row key: image, problem, rate in per-mille (exact grouping).
type RowKey = (String, u8, u64);

fn column(family: &str, m: usize) -> (usize, usize, String) {
    let rank = FAMILY_ORDER
        .iter()
        .position(|f| *f == family)
        .unwrap_or(FAMILY_ORDER.len());
    (m, rank, format!("{family}_M{m}"))
}

#[derive(Default)]
struct Cell {
    sum: f64,
    count: usize,
}

impl Cell {
    fn add(&mut self, v: f64) {
        self.sum += v;
        self.count += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

pub fn run(args: ReportArgs, argv: &[String]) -> CliResult<()> {
    let mut files = Vec::new();
    for p in &args.inputs {
        collect(p, true, &mut files)?;
    }
    if files.is_empty() {
        return Err(CliError::BadArgs("no recovery reports found".into()));
    }
    let mut rec = Recorder::new("report", argv, &args)?;

    let mut columns: BTreeSet<(usize, usize, String)> = BTreeSet::new();
    let mut cells: BTreeMap<(RowKey, String), Cell> = BTreeMap::new();
    let mut baseline: BTreeMap<RowKey, Cell> = BTreeMap::new();
    let mut runs: BTreeMap<RowKey, usize> = BTreeMap::new();
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| CliError::io(f.display(), e))?;
        let r: RecoverReport =
            serde_json::from_str(&text).map_err(|e| CliError::io(f.display(), e))?;
        if r.version != RECOVER_REPORT_VERSION {
            return Err(CliError::BadArgs(format!(
                "{}: report version {}",
                f.display(),
                r.version
            )));
        }
        let Some(q) = r.psnr else {
            return Err(CliError::BadArgs(format!(
                "{}: no PSNR (run recover with --truth)",
                f.display()
            )));
        };
        rec.input(f);
        let key = (r.label.clone(), r.problem, (r.rate * 1000.0).round() as u64);
        let col = column(&r.family, r.block_size);
        cells
            .entry((key.clone(), col.2.clone()))
            .or_default()
            .add(q);
        columns.insert(col);
        if let Some(b) = r.pinv_psnr {
            baseline.entry(key.clone()).or_default().add(b);
        }
        *runs.entry(key).or_default() += 1;
    }

    let mut rows: Vec<&RowKey> = runs.keys().collect();
    // Highest rate first within an image and problem.
    rows.sort_by(|a, b| {
        (&a.0, a.1, std::cmp::Reverse(a.2)).cmp(&(&b.0, b.1, std::cmp::Reverse(b.2)))
    });

    let mut csv = String::from("image,problem,rate,pseudo_inverse");
    for c in &columns {
        write!(csv, ",{}", c.2).unwrap();
    }
    csv.push_str(",runs\n");
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for key in rows {
        write!(
            csv,
            "{},{},{:.3},{}",
            key.0,
            key.1,
            key.2 as f64 / 1000.0,
            fmt(baseline.get(key).and_then(Cell::mean))
        )
        .unwrap();
        for c in &columns {
            write!(
                csv,
                ",{}",
                fmt(cells.get(&(key.clone(), c.2.clone())).and_then(Cell::mean))
            )
            .unwrap();
        }
        writeln!(csv, ",{}", runs[key]).unwrap();
    }
    fs::write(&args.out, &csv).map_err(|e| CliError::io(args.out.display(), e))?;
    rec.output(&args.out);
    rec.finish(with_suffix(&args.out, "manifest.json"))?;
    print!("{csv}");
    Ok(())
}
