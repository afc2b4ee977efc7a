//! Experiment setups shared by the command-line harness and the browser demo.

mod logistic;
mod monitor;
mod rmse;

use std::path::PathBuf;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use logistic::{logistic_pipeline, posterior_moments, snis_moments, LogisticOutcome};
pub use monitor::{run_monitor, MonitorRow, MonitorTarget};
pub use rmse::{default_gamma_grid, fit_slopes, rmse_sweep, RmseConfig, RmseRow, Slopes};

use crate::baselines::{run_ngvi, run_plain_ais, NgviConfig};
use crate::engine::{run_dais, DaisConfig, RunReport};
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::io::read_matrix_csv;
use crate::targets::{
    banana_target, correlated_gaussian_target, laplace_init, load_logistic_csv, logistic_target,
    mixture_target, sine_2d_target, synthetic_logistic_data, TargetModel,
};

/// Names accepted by [`TargetSpec`].
pub const TARGET_NAMES: [&str; 6] = [
    "banana",
    "mixture",
    "corr-gauss",
    "sine2d",
    "logistic-csv",
    "logistic-synthetic",
];

fn default_sigma() -> f64 {
    0.1
}

fn yes() -> bool {
    true
}

/// A registered target and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    Banana,
    Mixture,
    CorrGauss {
        d: usize,
        mean: f64,
        base: f64,
        boost: f64,
    },
    #[serde(rename = "sine2d")]
    Sine2d {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    LogisticCsv {
        path: PathBuf,
        #[serde(default = "yes")]
        labels_first_column: bool,
        #[serde(default)]
        has_header: bool,
        #[serde(default = "yes")]
        add_intercept: bool,
    },
    LogisticSynthetic {
        n: usize,
        d: usize,
        seed: u64,
    },
}

impl TargetSpec {
    /// Constructs the density. Fails on bad parameters or unreadable data.
    pub fn build(&self) -> Result<Box<dyn TargetModel>> {
        Ok(match self {
            TargetSpec::Banana => Box::new(banana_target()),
            TargetSpec::Mixture => Box::new(mixture_target()),
            TargetSpec::CorrGauss {
                d,
                mean,
                base,
                boost,
            } => {
                if *d == 0 {
                    return Err(DaisError::InvalidConfig("corr-gauss needs d >= 1".into()));
                }
                Box::new(correlated_gaussian_target(*d, *mean, *base, *boost)?)
            }
            TargetSpec::Sine2d { sigma } => {
                if !(*sigma > 0.0) {
                    return Err(DaisError::InvalidConfig("sine2d needs sigma > 0".into()));
                }
                Box::new(sine_2d_target(*sigma))
            }
            TargetSpec::LogisticCsv {
                path,
                labels_first_column,
                has_header,
                add_intercept,
            } => Box::new(logistic_target(load_logistic_csv(
                path,
                *labels_first_column,
                *has_header,
                *add_intercept,
            )?)),
            TargetSpec::LogisticSynthetic { n, d, seed } => {
                Box::new(logistic_target(synthetic_logistic_data(*n, *d, *seed)?))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dais,
    Ngvi,
    PlainAis,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dais => "dais",
            Method::Ngvi => "ngvi",
            Method::PlainAis => "plain-ais",
        }
    }
}

fn default_newton_iters() -> usize {
    50
}

fn default_newton_tol() -> f64 {
    1e-8
}

/// Where the first proposal comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    #[default]
    StandardNormal,
    Laplace {
        #[serde(default = "default_newton_iters")]
        max_newton_iters: usize,
        #[serde(default = "default_newton_tol")]
        grad_tol: f64,
    },
    /// Mean and covariance files in the format of `final_mean.csv` and
    /// `final_cov.csv`.
    Explicit { mean: PathBuf, cov: PathBuf },
}

/// Reads an explicit initialization; the mean file may be a column or a row.
pub fn load_explicit_init(mean: &std::path::Path, cov: &std::path::Path) -> Result<GaussianParams> {
    let m = read_matrix_csv(mean)?;
    let c = read_matrix_csv(cov)?;
    let mean = DVector::from_iterator(m.len(), m.transpose().iter().copied());
    GaussianParams::new(mean, c)
}

/// Computes the initial proposal for `target`.
pub fn initial_params<T: TargetModel + ?Sized>(
    init: &InitSpec,
    target: &T,
) -> Result<GaussianParams> {
    let d = target.dim();
    let params = match init {
        InitSpec::StandardNormal => GaussianParams::standard(d),
        InitSpec::Laplace {
            max_newton_iters,
            grad_tol,
        } => laplace_init(target, &DVector::zeros(d), *max_newton_iters, *grad_tol)?,
        InitSpec::Explicit { mean, cov } => load_explicit_init(mean, cov)?,
    };
    if params.dim() != d {
        return Err(DaisError::DimensionMismatch {
            expected: d,
            found: params.dim(),
        });
    }
    Ok(params)
}

/// Dispatches to the selected method.
pub fn run_method<T: TargetModel + ?Sized>(
    method: Method,
    initial: &GaussianParams,
    target: &T,
    dais: &DaisConfig,
    ngvi: &NgviConfig,
) -> Result<RunReport> {
    match method {
        Method::Dais => run_dais(initial, target, dais),
        Method::PlainAis => run_plain_ais(initial, target, dais),
        Method::Ngvi => run_ngvi(initial, target, ngvi),
    }
}
