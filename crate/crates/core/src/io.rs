//! Plain-text spectrum files and headerless CSV matrices.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{}` is not a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("`{}` is not finite", field.trim()),
        });
    }
    Ok(v)
}

/// One value per line (or the first column of a CSV); blank lines and
/// `#` comments are skipped. Line numbers in errors are 1-based.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let first = fields.next().unwrap_or_default();
        if fields.any(|f| !f.trim().is_empty()) {
            return Err(Error::Parse {
                line: idx + 1,
                message: "expected a single value per line".into(),
            });
        }
        out.push(parse_number(first, idx + 1)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no values found".into(),
        });
    }
    Ok(out)
}

pub fn read_spectrum(path: &Path) -> Result<Vec<f64>> {
    parse_spectrum(&fs::read_to_string(path)?)
}

pub fn parse_matrix_csv(text: &str) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        for field in record.iter() {
            data.push(parse_number(field, line)?);
        }
        rows += 1;
    }
    match cols {
        Some(c) => DenseMatrix::from_vec(rows, c, data),
        None => Err(Error::Parse {
            line: 0,
            message: "no rows found".into(),
        }),
    }
}

pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix> {
    parse_matrix_csv(&fs::read_to_string(path)?)
}

/// Shortest round-trip formatting, one row per line.
pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut out = String::with_capacity(m.rows() * m.cols() * 20);
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
