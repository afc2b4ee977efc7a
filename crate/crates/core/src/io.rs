//! Output helpers shared by the CLI and the data loader.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{DaisError, Result};

/// 17 significant digits; parsing the result recovers the value bit-exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = match dir {
        Some(d) => d.join(format!(".{file_name}.tmp")),
        None => Path::new(&format!(".{file_name}.tmp")).to_path_buf(),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// One header row, then one CSV line per row, LF line endings.
pub fn csv_string(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Matrix as CSV with columns `c0..c{n-1}`.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let header: Vec<String> = (0..m.ncols()).map(|j| format!("c{j}")).collect();
    let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| fmt_float(m[(i, j)])).collect());
    csv_string(&header, rows)
}

/// Reads a numeric CSV with one header row into a matrix.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DaisError::Io(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(i + 2, |p| p.line() as usize);
            match e.kind() {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => DaisError::RaggedRows {
                    row,
                    expected: *expected_len as usize,
                    found: *len as usize,
                },
                _ => DaisError::Parse {
                    row,
                    column: 1,
                    message: e.to_string(),
                },
            }
        })?;
        let row = record.position().map_or(i + 2, |p| p.line() as usize);
        cols.get_or_insert(record.len());
        for (column, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| DaisError::Parse {
                row,
                column: column + 1,
                message: format!("not a number: {field:?}"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}
