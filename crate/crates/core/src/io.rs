//! Plain-text matrix and label files.
//!
//! Matrices are comma-separated, one feature per line and one data point per
//! column. Values are written with 17 significant digits so a save/load round
//! trip is exact. Label files hold one base-10 integer per line. Blank lines
//! are ignored in both formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::ClusterLabels;

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses matrix text. `path` is only used in error messages.
pub fn parse_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                parse_error(path, line_no, col + 1, format!("not a number: {:?}", field.trim()))
            })?;
            if !value.is_finite() {
                return Err(parse_error(path, line_no, col + 1, "non-finite value"));
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_error(
                    path,
                    line_no,
                    row.len().min(w) + 1,
                    format!("expected {w} fields, found {}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    let Some(ncols) = width else {
        return Err(parse_error(path, 1, 1, "no data"));
    };
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    parse_matrix(&read(path)?, path)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    write(path.as_ref(), &format_matrix(m))
}

pub fn parse_labels(text: &str, path: &Path) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            l.trim().parse().map_err(|_| {
                parse_error(path, idx + 1, 1, format!("not a nonnegative integer: {:?}", l.trim()))
            })
        })
        .collect()
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<ClusterLabels> {
    let path = path.as_ref();
    Ok(ClusterLabels::from_labels(parse_labels(&read(path)?, path)?))
}

pub fn save_labels(path: impl AsRef<Path>, labels: &ClusterLabels) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels.labels() {
        writeln!(out, "{l}").expect("writing to a String");
    }
    write(path.as_ref(), &out)
}
