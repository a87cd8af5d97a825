//! CSV, PGM and key=value report writers.
//!
//! Floats are printed as the shortest decimal string that parses back to the
//! same value. PGM files are binary P5 with maxval 65535, big-endian samples.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

pub const LOG_FLOOR: f64 = 1e-12;
pub const CLASS_REAL: u16 = 0;
pub const CLASS_EP: u16 = 32768;
pub const CLASS_COMPLEX: u16 = 65535;

/// Shortest round-trip decimal, switching to exponent form for very large or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv { buf: String::new(), columns: header.len() };
        csv.buf.push_str(&header.join(","));
        csv.buf.push('\n');
        csv
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "CSV row width");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.buf)?;
        Ok(())
    }
}

/// 16-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u16>,
}

impl Pgm {
    pub fn new(width: usize, height: usize, pixels: Vec<u16>) -> Self {
        assert_eq!(pixels.len(), width * height, "PGM pixel count");
        Pgm { width, height, pixels }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n65535\n", self.width, self.height).into_bytes();
        out.reserve(2 * self.pixels.len());
        for p in &self.pixels {
            out.extend_from_slice(&p.to_be_bytes());
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }
}

/// Log intensity: 0 at or below 1e-12, 65535 at 1.
pub fn log_intensity(x: f64) -> u16 {
    let v = x.clamp(LOG_FLOOR, 1.0);
    let frac = (v.log10() - LOG_FLOOR.log10()) / -LOG_FLOOR.log10();
    (frac * 65535.0).round() as u16
}

/// Ordered key=value lines.
#[derive(Clone, Debug, Default)]
pub struct Report {
    buf: String,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn put(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.buf, "{key}={value}");
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.put(key, fmt_f64(value))
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.buf)?;
        Ok(())
    }
}
