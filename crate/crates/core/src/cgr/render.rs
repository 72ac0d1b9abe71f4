use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::{DiffGrid, NormalizedCgr};

pub const PGM_MAXVAL: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridFormat {
    #[default]
    Pgm,
    Csv,
}

impl FromStr for GridFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(GridFormat::Pgm),
            "csv" => Ok(GridFormat::Csv),
            other => Err(format!(
                "unknown grid format {other:?} (expected pgm or csv)"
            )),
        }
    }
}

impl fmt::Display for GridFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridFormat::Pgm => "pgm",
            GridFormat::Csv => "csv",
        })
    }
}

fn gray(v: f32) -> u16 {
    ((1.0 - v.clamp(0.0, 1.0) as f64) * PGM_MAXVAL as f64).round() as u16
}

/// Binary 16-bit PGM. Value 1 is black and 0 white; the first row of the
/// image is the top of the grid (`y = side - 1`).
pub fn write_pgm<W: Write>(mut out: W, grid: &NormalizedCgr) -> io::Result<()> {
    let side = grid.side();
    write!(out, "P5\n{side} {side}\n{PGM_MAXVAL}\n")?;
    let mut row = Vec::with_capacity(side * 2);
    for y in (0..side).rev() {
        row.clear();
        for x in 0..side {
            row.extend_from_slice(&gray(grid.get(x, y)).to_be_bytes());
        }
        out.write_all(&row)?;
    }
    Ok(())
}

/// Long-format CSV `x,y,value`, y-major.
pub fn write_grid_csv<W: Write>(mut out: W, side: usize, values: &[f32]) -> io::Result<()> {
    writeln!(out, "x,y,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{},{}", i % side, i / side, v)?;
    }
    Ok(())
}

/// Write `<stem>.csv` with signed values plus `<stem>.pos.pgm` and
/// `<stem>.neg.pgm` with the positive and negative parts.
pub fn write_diff(stem: &Path, diff: &DiffGrid) -> io::Result<Vec<PathBuf>> {
    let with = |suffix: &str| {
        let mut s = stem.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let paths = vec![with(".csv"), with(".pos.pgm"), with(".neg.pgm")];
    let mut w = BufWriter::new(File::create(&paths[0])?);
    write_grid_csv(&mut w, diff.side(), diff.values())?;
    w.flush()?;
    for (path, part) in paths[1..]
        .iter()
        .zip([diff.positive_part(), diff.negative_part()])
    {
        let mut w = BufWriter::new(File::create(path)?);
        write_pgm(&mut w, &part)?;
        w.flush()?;
    }
    Ok(paths)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a binary PGM (missing P5 magic)")]
    NotPgm,
    #[error("bad PGM header: {0}")]
    Header(String),
    #[error("PGM pixel data truncated: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("{0} unexpected bytes after PGM pixel data")]
    TrailingBytes(u64),
    #[error("image is {width}x{height}, not a power-of-two square")]
    NotGrid { width: usize, height: usize },
}

/// A decoded PGM with rows in file order (top row first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl Pgm {
    /// Undo [`write_pgm`]: `value = 1 - gray / maxval`, rows flipped back.
    pub fn to_grid(&self) -> Result<NormalizedCgr, PgmError> {
        let not_grid = PgmError::NotGrid {
            width: self.width,
            height: self.height,
        };
        if self.width != self.height || !self.width.is_power_of_two() || self.width < 2 {
            return Err(not_grid);
        }
        let side = self.width;
        let k = side.trailing_zeros() as usize;
        let mut values = vec![0f32; side * side];
        for (r, row) in self.pixels.chunks_exact(side).enumerate() {
            let y = side - 1 - r;
            for (x, &g) in row.iter().enumerate() {
                values[y * side + x] = (1.0 - g as f64 / self.maxval as f64) as f32;
            }
        }
        NormalizedCgr::from_values(k, values).map_err(|_| not_grid)
    }
}

/// Parse a binary (P5) PGM with 8- or 16-bit samples.
pub fn parse_pgm(data: &[u8]) -> Result<Pgm, PgmError> {
    if !data.starts_with(b"P5") {
        return Err(PgmError::NotPgm);
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for (n, field) in fields.iter_mut().enumerate() {
        // whitespace and comments before each field
        loop {
            match data.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let digits = std::str::from_utf8(&data[start..pos]).expect("ascii digits");
        *field = digits
            .parse()
            .map_err(|_| PgmError::Header(format!("field {} is not a number", n + 1)))?;
    }
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PgmError::Header("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(PgmError::Header("zero dimension".into()));
    }
    if !(1..=PGM_MAXVAL as u64).contains(&maxval) {
        return Err(PgmError::Header(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }
    let bytes_per = if maxval > 255 { 2u64 } else { 1 };
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(bytes_per))
        .ok_or_else(|| PgmError::Header("dimensions overflow".into()))?;
    let body = &data[pos..];
    let actual = body.len() as u64;
    if actual < expected {
        return Err(PgmError::Truncated { expected, actual });
    }
    if actual > expected {
        return Err(PgmError::TrailingBytes(actual - expected));
    }
    let pixels = if bytes_per == 2 {
        body.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        body.iter().map(|&b| b as u16).collect()
    };
    Ok(Pgm {
        width: width as usize,
        height: height as usize,
        maxval: maxval as u16,
        pixels,
    })
}
