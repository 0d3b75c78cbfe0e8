//! 8-bit PGM (P5 binary and P2 ASCII).

use std::fs;
use std::path::Path;

use super::ImageGrid;
use crate::error::{format_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Binary,
    Ascii,
}

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(format_err("pgm", "file too short"));
    }
    let magic = [bytes[0], bytes[1]];
    if magic != *b"P5" && magic != *b"P2" {
        return Err(format_err("pgm", "missing P5/P2 magic"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // Skip whitespace and comments.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(format_err("pgm", "malformed header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err("pgm", "header value out of range"))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(format_err("pgm", "zero dimension"));
    }
    if maxval != 255 {
        return Err(format_err(
            "pgm",
            format!("unsupported depth {maxval}, expected 255"),
        ));
    }
    // Exactly one whitespace byte separates the header from binary data.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(format_err("pgm", "no separator after header")),
    }
    Ok(Header {
        magic,
        width,
        height,
        data_start: pos,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ImageGrid> {
    let h = parse_header(bytes)?;
    let count = h.width * h.height;
    let body = &bytes[h.data_start..];
    let values: Vec<f64> = if h.magic == *b"P5" {
        if body.len() < count {
            return Err(format_err(
                "pgm",
                format!("expected {count} data bytes, found {}", body.len()),
            ));
        }
        body[..count].iter().map(|&v| v as f64 / 255.0).collect()
    } else {
        let text = std::str::from_utf8(body).map_err(|_| format_err("pgm", "non-ASCII P2 data"))?;
        let vals = text
            .split_ascii_whitespace()
            .map(|t| match t.parse::<u16>() {
                Ok(v) if v <= 255 => Ok(v as f64 / 255.0),
                _ => Err(format_err("pgm", format!("bad sample `{t}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != count {
            return Err(format_err(
                "pgm",
                format!("expected {count} samples, found {}", vals.len()),
            ));
        }
        vals
    };
    ImageGrid::new(h.height, h.width, values)
}

pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

pub fn encode_pgm(img: &ImageGrid, format: PgmFormat) -> Vec<u8> {
    let magic = match format {
        PgmFormat::Binary => "P5",
        PgmFormat::Ascii => "P2",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    match format {
        PgmFormat::Binary => out.extend(img.pixels().iter().map(|&v| quantize(v))),
        PgmFormat::Ascii => {
            for row in img.pixels().chunks(img.width()) {
                let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<ImageGrid> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(img: &ImageGrid, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    fs::write(path, encode_pgm(img, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_p5() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend([0u8; 4]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0.0; 4]);
    }

    #[test]
    fn white_and_comments() {
        let img = decode_pgm(b"P2\n# comment\n2 1\n# more\n255\n255 0\n").unwrap();
        assert_eq!(img.pixels(), &[1.0, 0.0]);
    }

    #[test]
    fn bad_headers() {
        assert!(decode_pgm(b"P6\n1 1\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n1 1\n65535\n\0\0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\nx 2\n255\n").is_err());
        assert!(decode_pgm(b"P2\n2 1\n255\n1 300\n").is_err());
    }

    #[test]
    fn round_trip_bit_exact() {
        let w = 17;
        let h = 5;
        let raw: Vec<u8> = (0..w * h).map(|i| ((i * 37 + 11) % 256) as u8).collect();
        let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
        bytes.extend(&raw);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(encode_pgm(&img, PgmFormat::Binary), bytes);
        let ascii = encode_pgm(&img, PgmFormat::Ascii);
        assert_eq!(decode_pgm(&ascii).unwrap(), img);
    }

    #[test]
    fn round_half_up() {
        assert_eq!(quantize(0.5), 128);
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(-0.1), 0);
    }
}
