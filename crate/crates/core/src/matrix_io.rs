//! Plain-text CSV exchange for dense matrices and vectors.
//!
//! One matrix row per line, comma separated, every value printed with 17
//! significant digits so a write/read cycle is lossless for `f64`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{format_err, Result};

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    let mut line = String::new();
    for r in 0..m.nrows() {
        line.clear();
        for c in 0..m.ncols() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format_value(m[(r, c)]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|e| {
                    format_err("csv", format!("line {}: `{}`: {e}", lineno + 1, tok.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format_err(
                    "csv",
                    format!(
                        "line {} has {} columns, expected {}",
                        lineno + 1,
                        row.len(),
                        first.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err("csv", "no rows"));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let m = DMatrix::from_fn(3, 4, |r, c| ((r * 7 + c) as f64).sin() / 3.0);
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        let back = read_matrix_csv(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = "1,2,3\n4,5\n";
        assert!(read_matrix_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn garbage_rejected() {
        assert!(read_matrix_csv("1,x\n".as_bytes()).is_err());
        assert!(read_matrix_csv("".as_bytes()).is_err());
    }
}
