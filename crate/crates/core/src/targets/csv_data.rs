//! Numeric CSV ingestion for logistic regression data.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::logistic::LogisticRegressionData;
use crate::error::{DaisError, Result};
use crate::io::{fmt_float, write_atomic};

/// Loads labels and features from a comma-separated file.
///
/// Labels in {0, 1} map to {−1, +1}; labels already in {−1, +1} pass
/// through. With `add_intercept`, a leading column of ones is prepended to
/// the features. Row numbers in errors count physical records from 0,
/// including the header.
pub fn load_logistic_csv(
    path: &Path,
    labels_first_column: bool,
    has_header: bool,
    add_intercept: bool,
) -> Result<LogisticRegressionData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DaisError::Io(e.to_string()))?;

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DaisError::Parse {
            row: e.position().map_or(i + 1, |p| p.line() as usize),
            column: 1,
            message: e.to_string(),
        })?;
        let row = record.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && has_header {
            continue;
        }
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(DaisError::RaggedRows {
                row,
                expected,
                found: record.len(),
            });
        }
        if expected < 2 {
            return Err(DaisError::Parse {
                row,
                column: 1,
                message: "need a label column and at least one feature".into(),
            });
        }
        let mut values = Vec::with_capacity(expected);
        for (column, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| DaisError::Parse {
                row,
                column: column + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(DaisError::Parse {
                    row,
                    column: column + 1,
                    message: "non-finite value".into(),
                });
            }
            values.push(v);
        }
        let raw_label = if labels_first_column {
            values.remove(0)
        } else {
            values.pop().expect("width ≥ 2")
        };
        let label = match raw_label {
            1.0 => 1.0,
            v if v == 0.0 || v == -1.0 => -1.0,
            value => return Err(DaisError::Label { row, value }),
        };
        labels.push(label);
        if add_intercept {
            values.insert(0, 1.0);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(DaisError::Parse {
            row: 1,
            column: 1,
            message: "no data rows".into(),
        });
    }
    let d = rows[0].len();
    let features = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    LogisticRegressionData::new(DVector::from_vec(labels), features)
}

/// Writes labels (first column, ±1) and features with a header row.
pub fn write_logistic_csv(path: &Path, data: &LogisticRegressionData) -> Result<()> {
    let mut out = String::from("label");
    for j in 0..data.d() {
        out.push_str(&format!(",a{j}"));
    }
    out.push('\n');
    for i in 0..data.n() {
        out.push_str(&fmt_float(data.labels[i]));
        for j in 0..data.d() {
            out.push(',');
            out.push_str(&fmt_float(data.features[(i, j)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())?;
    Ok(())
}
