//! Dependency-free readers and writers for the on-disk formats: two-column
//! profile CSV, plain-matrix CSV with a one-line `pixel_size_nm` header, and
//! 8/16-bit portable graymaps (PGM, both ASCII `P2` and binary `P5`).
//!
//! All text output uses `.` as the decimal separator and no thousands
//! separators; floats round-trip through `{:?}`-style shortest formatting.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// A named two-column table, e.g. a depth profile `(z_nm, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct XyTable {
    /// Column names as written in the header row.
    pub x_label: String,
    pub y_label: String,
    /// Data rows in file order.
    pub rows: Vec<(f64, f64)>,
}

/// Shortest representation that round-trips through `str::parse::<f64>`.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(tok: &str, path: &Path, line_no: usize) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| {
        Error::format(format!(
            "{}:{line_no}: expected a number, got {tok:?}",
            path.display()
        ))
    })
}

/// Writes a two-column CSV with a header row.
pub fn write_xy_csv(path: &Path, table: &XyTable) -> Result<()> {
    let mut out = String::with_capacity(32 + table.rows.len() * 32);
    out.push_str(&table.x_label);
    out.push(',');
    out.push_str(&table.y_label);
    out.push('\n');
    for &(x, y) in &table.rows {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&fmt_f64(y));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a two-column CSV with a header row. Blank lines are skipped.
pub fn read_xy_csv(path: &Path) -> Result<XyTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(format!("{}: empty file", path.display())))?;
    let mut cols = header.split(',');
    let x_label = cols
        .next()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::format(format!("{}: missing header", path.display())))?
        .to_owned();
    let y_label = cols
        .next()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| {
            Error::format(format!("{}: header needs two column names", path.display()))
        })?
        .to_owned();
    if cols.next().is_some() {
        return Err(Error::format(format!(
            "{}: expected exactly two columns",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split(',');
        let (Some(xa), Some(ya), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::format(format!(
                "{}:{}: expected two comma-separated values",
                path.display(),
                idx + 1
            )));
        };
        rows.push((parse_f64(xa, path, idx + 1)?, parse_f64(ya, path, idx + 1)?));
    }
    Ok(XyTable { x_label, y_label, rows })
}

/// Writes a matrix CSV: one header line `pixel_size_nm,<value>`, then one
/// comma-separated line per matrix row.
pub fn write_matrix_csv(path: &Path, pixel_size_nm: f64, data: &Array2<f64>) -> Result<()> {
    if !(pixel_size_nm > 0.0) {
        return Err(Error::domain(format!(
            "pixel size must be > 0 nm, got {pixel_size_nm}"
        )));
    }
    let mut out = String::with_capacity(32 + data.len() * 16);
    out.push_str("pixel_size_nm,");
    out.push_str(&fmt_f64(pixel_size_nm));
    out.push('\n');
    for row in data.rows() {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_f64(v));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a matrix CSV written by [`write_matrix_csv`] (or any AFM export in
/// the same shape). Returns `(pixel_size_nm, matrix)`; all rows must have
/// equal length.
pub fn read_matrix_csv(path: &Path) -> Result<(f64, Array2<f64>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(format!("{}: empty file", path.display())))?;
    let mut cols = header.split(',');
    match cols.next().map(str::trim) {
        Some("pixel_size_nm") => {}
        other => {
            return Err(Error::format(format!(
                "{}: header must start with pixel_size_nm, got {other:?}",
                path.display()
            )))
        }
    }
    let pixel_size_nm = parse_f64(
        cols.next()
            .ok_or_else(|| Error::format(format!("{}: header missing value", path.display())))?,
        path,
        1,
    )?;
    if !(pixel_size_nm > 0.0) {
        return Err(Error::format(format!(
            "{}: pixel size must be > 0 nm",
            path.display()
        )));
    }
    let mut values: Vec<f64> = Vec::new();
    let mut n_cols = None;
    let mut n_rows = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let start = values.len();
        for tok in line.split(',') {
            values.push(parse_f64(tok, path, idx + 1)?);
        }
        let width = values.len() - start;
        match n_cols {
            None => n_cols = Some(width),
            Some(w) if w != width => {
                return Err(Error::format(format!(
                    "{}:{}: row has {} values, expected {}",
                    path.display(),
                    idx + 1,
                    width,
                    w
                )))
            }
            _ => {}
        }
        n_rows += 1;
    }
    let n_cols = n_cols
        .ok_or_else(|| Error::format(format!("{}: matrix has no data rows", path.display())))?;
    let data = Array2::from_shape_vec((n_rows, n_cols), values)
        .expect("dimensions counted from the rows just parsed");
    Ok((pixel_size_nm, data))
}

/// A decoded portable graymap.
#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    /// Maximum sample value (255 for 8-bit, up to 65535 for 16-bit).
    pub maxval: u16,
    /// Row-major samples, `height × width` of them.
    pub pixels: Vec<u16>,
}

impl PgmImage {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::domain("image dimensions must be nonzero"));
        }
        if self.maxval == 0 {
            return Err(Error::domain("maxval must be >= 1"));
        }
        if self.pixels.len() != self.width * self.height {
            return Err(Error::domain(format!(
                "pixel count {} does not match {}x{}",
                self.pixels.len(),
                self.width,
                self.height
            )));
        }
        if self.pixels.iter().any(|&p| p > self.maxval) {
            return Err(Error::domain("pixel exceeds maxval"));
        }
        Ok(())
    }
}

/// Header tokenizer: whitespace-separated tokens with `#` comments running
/// to end of line, as the graymap format allows.
struct PgmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmTokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        PgmTokens { bytes, pos: 0 }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn next_usize(&mut self, what: &str, path: &Path) -> Result<usize> {
        let tok = self
            .next_token()
            .ok_or_else(|| Error::format(format!("{}: missing {what}", path.display())))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::format(format!("{}: invalid {what}", path.display())))
    }
}

/// Reads `P2` (ASCII) or `P5` (binary) graymaps; 16-bit binary samples are
/// big-endian per the format.
pub fn read_pgm(path: &Path) -> Result<PgmImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("{}: {e}", path.display())))?;
    let mut toks = PgmTokens::new(&bytes);
    let magic = toks
        .next_token()
        .ok_or_else(|| Error::format(format!("{}: empty file", path.display())))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => {
            return Err(Error::format(format!(
                "{}: not a graymap (magic {:?})",
                path.display(),
                String::from_utf8_lossy(magic)
            )))
        }
    };
    let width = toks.next_usize("width", path)?;
    let height = toks.next_usize("height", path)?;
    let maxval = toks.next_usize("maxval", path)?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::format(format!(
            "{}: bad dimensions {width}x{height} maxval {maxval}",
            path.display()
        )));
    }
    let maxval = maxval as u16;
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let raster_start = toks.pos + 1;
        let wide = maxval > 255;
        let sample_bytes = if wide { 2 } else { 1 };
        let needed = count * sample_bytes;
        if bytes.len() < raster_start + needed {
            return Err(Error::format(format!(
                "{}: raster truncated ({} bytes, need {})",
                path.display(),
                bytes.len().saturating_sub(raster_start),
                needed
            )));
        }
        let raster = &bytes[raster_start..raster_start + needed];
        if wide {
            for pair in raster.chunks_exact(2) {
                pixels.push(u16::from_be_bytes([pair[0], pair[1]]));
            }
        } else {
            pixels.extend(raster.iter().map(|&b| b as u16));
        }
    } else {
        for _ in 0..count {
            let v = toks.next_usize("sample", path)?;
            if v > maxval as usize {
                return Err(Error::format(format!(
                    "{}: sample {v} exceeds maxval {maxval}",
                    path.display()
                )));
            }
            pixels.push(v as u16);
        }
    }
    let img = PgmImage { width, height, maxval, pixels };
    img.validate().map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    Ok(img)
}

/// Writes a graymap; `binary` selects `P5` over `P2`. 16-bit binary samples
/// are written big-endian.
pub fn write_pgm(path: &Path, img: &PgmImage, binary: bool) -> Result<()> {
    img.validate()?;
    let mut out: Vec<u8> = Vec::with_capacity(32 + img.pixels.len() * 3);
    let magic = if binary { "P5" } else { "P2" };
    write!(out, "{magic}\n{} {}\n{}\n", img.width, img.height, img.maxval)
        .expect("writing to Vec cannot fail");
    if binary {
        if img.maxval > 255 {
            for &p in &img.pixels {
                out.extend_from_slice(&p.to_be_bytes());
            }
        } else {
            out.extend(img.pixels.iter().map(|&p| p as u8));
        }
    } else {
        for (i, row) in img.pixels.chunks(img.width).enumerate() {
            let _ = i;
            let mut first = true;
            for &p in row {
                if !first {
                    out.push(b' ');
                }
                write!(out, "{p}").expect("writing to Vec cannot fail");
                first = false;
            }
            out.push(b'\n');
        }
    }
    fs::write(path, out)?;
    Ok(())
}
