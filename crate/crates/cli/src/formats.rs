//! On-disk formats: CSV, the `NSQW1` binary grid, and gnuplot matrices.
//!
//! Floats are written with Rust's `Display`, which yields the shortest
//! decimal that parses back to the same double.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nsqpwd_core::{Complex64, ComplexField, Grid2D, WignerSlice};
use thiserror::Error;

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 5] = b"NSQW1";
const HEADER_LEN: usize = 5 + 4 + 4 + 4 * 8;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("bad magic, expected NSQW1")]
    BadMagic,
    #[error("file truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("{0} trailing bytes after sample data")]
    Trailing(usize),
    #[error("invalid grid header: {0}")]
    Grid(nsqpwd_core::Error),
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Bin,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn bin(self) -> bool {
        matches!(self, Format::Bin | Format::Both)
    }
}

pub fn encode_bin(f: &ComplexField) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n1 as u32).to_le_bytes());
    out.extend_from_slice(&(g.n2 as u32).to_le_bytes());
    for v in [g.start1, g.step1, g.start2, g.step2] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode_bin(bytes: &[u8]) -> std::result::Result<ComplexField, ParseError> {
    if bytes.len() < MAGIC.len() || &bytes[..5] != MAGIC {
        return Err(ParseError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(ParseError::Truncated { need: HEADER_LEN, have: bytes.len() });
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let (n1, n2) = (u32_at(5), u32_at(9));
    let (start1, step1, start2, step2) = (f64_at(13), f64_at(21), f64_at(29), f64_at(37));
    let grid = Grid2D::new(n1, n2, start1, start2, step1, step2).map_err(ParseError::Grid)?;
    let need = n1
        .checked_mul(n2)
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or(ParseError::Truncated { need: usize::MAX, have: bytes.len() })?;
    if bytes.len() < need {
        return Err(ParseError::Truncated { need, have: bytes.len() });
    }
    if bytes.len() > need {
        return Err(ParseError::Trailing(bytes.len() - need));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    ComplexField::new(grid, values).map_err(ParseError::Grid)
}

/// `x1,x2,re,im`, one row per sample, row-major.
pub fn field_csv(f: &ComplexField) -> String {
    let mut s = String::from("x1,x2,re,im\n");
    for (x, v) in f.grid().points().zip(f.values()) {
        let _ = writeln!(s, "{},{},{},{}", x.p1, x.p2, v.re, v.im);
    }
    s
}

/// `omega1,omega2,re,im,abs`, one row per frequency node, row-major.
pub fn slice_csv(s: &WignerSlice) -> String {
    let mut out = String::from("omega1,omega2,re,im,abs\n");
    for (w, v) in s.wgrid.points().zip(&s.values) {
        let _ = writeln!(out, "{},{},{},{},{}", w.p1, w.p2, v.re, v.im, v.norm());
    }
    out
}

/// Reads the output of [`field_csv`]. The grid is recovered from the
/// coordinates, which must be row-major and uniform.
pub fn parse_field_csv(text: &str) -> std::result::Result<ComplexField, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x1,x2,re,im" => {}
        _ => return Err(ParseError::Csv { line: 1, msg: "expected header x1,x2,re,im".into() }),
    }
    let mut rows = Vec::new();
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(ParseError::Csv { line: k + 1, msg: format!("expected 4 columns, found {}", cols.len()) });
        }
        let mut r = [0.0; 4];
        for (slot, c) in r.iter_mut().zip(&cols) {
            *slot = c.trim().parse().map_err(|e| ParseError::Csv { line: k + 1, msg: format!("{e}: {c:?}") })?;
        }
        rows.push(r);
    }
    if rows.is_empty() {
        return Err(ParseError::Csv { line: 2, msg: "no samples".into() });
    }
    let n2 = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if rows.len() % n2 != 0 {
        return Err(ParseError::Csv { line: rows.len() + 1, msg: "row count is not a multiple of the row length".into() });
    }
    let n1 = rows.len() / n2;
    let step = |a: f64, b: f64, n: usize| if n > 1 { (b - a) / (n - 1) as f64 } else { 1.0 };
    let (start1, start2) = (rows[0][0], rows[0][1]);
    let step1 = step(start1, rows[(n1 - 1) * n2][0], n1);
    let step2 = step(start2, rows[n2 - 1][1], n2);
    let grid = Grid2D::new(n1, n2, start1, start2, step1, step2).map_err(ParseError::Grid)?;
    for (k, (r, x)) in rows.iter().zip(grid.points()).enumerate() {
        let tol = 1e-9 * (1.0 + x.p1.abs().max(x.p2.abs()));
        if (r[0] - x.p1).abs() > tol || (r[1] - x.p2).abs() > tol {
            return Err(ParseError::Csv { line: k + 2, msg: "coordinates are not on a uniform row-major grid".into() });
        }
    }
    let values = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
    ComplexField::new(grid, values).map_err(ParseError::Grid)
}

/// ASCII "nonuniform matrix" for gnuplot: the first row holds the column
/// count and the `omega2` coordinates, each following row `omega1` and the
/// magnitudes. Plot with `plot 'f' nonuniform matrix with image`.
pub fn gnuplot_matrix(s: &WignerSlice) -> String {
    let g = &s.wgrid;
    let mut out = String::new();
    let _ = write!(out, "{}", g.n2);
    for j in 0..g.n2 {
        let _ = write!(out, " {}", g.coord2(j));
    }
    out.push('\n');
    for i in 0..g.n1 {
        let _ = write!(out, "{}", g.coord1(i));
        for j in 0..g.n2 {
            let _ = write!(out, " {}", s.get(i, j).norm());
        }
        out.push('\n');
    }
    out
}

pub fn slice_field(s: &WignerSlice) -> ComplexField {
    ComplexField::new(s.wgrid, s.values.clone()).expect("slice values match its grid")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Reads a field by extension: `.csv` as CSV, anything else as `NSQW1`.
pub fn read_grid(path: &Path) -> Result<ComplexField> {
    let parse = |source| CliError::Parse { path: path.to_path_buf(), source };
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        parse_field_csv(&text).map_err(parse)
    } else {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        decode_bin(&bytes).map_err(parse)
    }
}

/// Writes `<stem>.csv` and/or `<stem>.bin` under `dir`; returns the paths.
pub fn write_grid(f: &ComplexField, dir: &Path, stem: &str, format: Format) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if format.csv() {
        let p = dir.join(format!("{stem}.csv"));
        write_file(&p, field_csv(f).as_bytes())?;
        out.push(p);
    }
    if format.bin() {
        let p = dir.join(format!("{stem}.bin"));
        write_file(&p, &encode_bin(f))?;
        out.push(p);
    }
    Ok(out)
}
