use std::path::Path;

use serde::Serialize;

use super::{runtime_err, CliError};
use crate::engine::IterationRecord;
use crate::experiments::{MonitorRow, RmseRow};
use crate::io::{csv_string, fmt_float, write_atomic};

/// Fixed schema of `summary.json`.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub method: String,
    pub target: serde_json::Value,
    pub config: serde_json::Value,
    pub iterations: usize,
    pub stopped_reason: String,
    pub wall_seconds: f64,
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes())
        .map_err(|e| runtime_err(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime_err)?;
    text.push('\n');
    write_file(path, &text)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `t, gamma, ess, elbo, pd_repairs, mu_0.., var_0..`.
pub fn trace_csv(records: &[IterationRecord], d: usize) -> String {
    let mut head = header(&["t", "gamma", "ess", "elbo", "pd_repairs"]);
    head.extend((0..d).map(|j| format!("mu_{j}")));
    head.extend((0..d).map(|j| format!("var_{j}")));
    let rows = records.iter().map(|r| {
        let mut row = vec![
            r.t.to_string(),
            fmt_float(r.gamma),
            fmt_float(r.ess),
            fmt_float(r.elbo),
            r.pd_repairs.to_string(),
        ];
        row.extend(r.mean.iter().map(|v| fmt_float(*v)));
        row.extend(r.covariance.diagonal().iter().map(|v| fmt_float(*v)));
        row
    });
    csv_string(&head, rows)
}

pub fn vector_csv(name: &str, values: &[f64]) -> String {
    csv_string(&header(&[name]), values.iter().map(|v| vec![fmt_float(*v)]))
}

pub fn rmse_csv(rows: &[RmseRow]) -> String {
    let head = header(&[
        "gamma",
        "rmse_mean_stein",
        "rmse_mean_naive",
        "rmse_cov_stein",
        "rmse_cov_naive",
    ]);
    csv_string(
        &head,
        rows.iter().map(|r| {
            [
                r.gamma,
                r.mean_stein,
                r.mean_naive,
                r.cov_stein,
                r.cov_naive,
            ]
            .iter()
            .map(|v| fmt_float(*v))
            .collect()
        }),
    )
}

pub fn monitor_csv(rows: &[MonitorRow]) -> String {
    csv_string(
        &header(&["t", "gamma", "neg_elbo"]),
        rows.iter()
            .map(|r| vec![r.t.to_string(), fmt_float(r.gamma), fmt_float(r.neg_elbo)]),
    )
}

pub fn moments_csv(moments: &[(f64, f64)]) -> String {
    csv_string(
        &header(&["index", "mean", "sd"]),
        moments
            .iter()
            .enumerate()
            .map(|(i, (m, s))| vec![i.to_string(), fmt_float(*m), fmt_float(*s)]),
    )
}
