use std::str::FromStr;

use crate::engine::{run_dais, DaisConfig};
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::targets::{correlated_gaussian_target, sine_2d_target, TargetModel};

/// The two monitoring targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorTarget {
    /// Ridge `x₂ = 1 + sin 2x₁` with `σ = 0.1` under an `N(0, I)` prior.
    Sine2d,
    /// `d = 100`, mean 1, `Σ = 0.9 + 0.1 δ`.
    CorrGauss100,
}

impl MonitorTarget {
    pub fn default_c(&self) -> f64 {
        match self {
            MonitorTarget::Sine2d => 0.1,
            MonitorTarget::CorrGauss100 => 0.3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonitorTarget::Sine2d => "sine2d",
            MonitorTarget::CorrGauss100 => "corr-gauss-100",
        }
    }

    pub fn build(&self) -> Result<Box<dyn TargetModel>> {
        Ok(match self {
            MonitorTarget::Sine2d => Box::new(sine_2d_target(0.1)),
            MonitorTarget::CorrGauss100 => {
                Box::new(correlated_gaussian_target(100, 1.0, 0.9, 0.1)?)
            }
        })
    }
}

impl FromStr for MonitorTarget {
    type Err = DaisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine2d" => Ok(MonitorTarget::Sine2d),
            "corr-gauss-100" => Ok(MonitorTarget::CorrGauss100),
            other => Err(DaisError::InvalidConfig(format!(
                "unknown monitor target {other:?}; expected sine2d or corr-gauss-100"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRow {
    pub t: usize,
    pub gamma: f64,
    pub neg_elbo: f64,
}

/// Runs exactly `iters` iterations from `N(0, I)` (no early stopping) and
/// returns `(t, γ_t, −ELBO(q_t))` per iteration.
pub fn run_monitor(
    target: MonitorTarget,
    s_count: usize,
    n_ess: f64,
    robustness_c: f64,
    seed: u64,
    iters: usize,
) -> Result<Vec<MonitorRow>> {
    let model = target.build()?;
    let config = DaisConfig {
        s_count,
        n_ess,
        robustness_c,
        seed,
        max_iters: iters,
        elbo_patience: usize::MAX,
        ..DaisConfig::default()
    };
    let report = run_dais(&GaussianParams::standard(model.dim()), &model, &config)?;
    Ok(report
        .records
        .iter()
        .map(|r| MonitorRow {
            t: r.t,
            gamma: r.gamma,
            neg_elbo: -r.elbo,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for t in [MonitorTarget::Sine2d, MonitorTarget::CorrGauss100] {
            assert_eq!(t.name().parse::<MonitorTarget>().unwrap(), t);
        }
        assert!("sine".parse::<MonitorTarget>().is_err());
        assert_eq!(MonitorTarget::Sine2d.default_c(), 0.1);
        assert_eq!(MonitorTarget::CorrGauss100.default_c(), 0.3);
    }

    #[test]
    fn single_iteration() {
        let rows = run_monitor(MonitorTarget::Sine2d, 2_000, 200.0, 0.1, 0, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].t, 1);
    }

    #[test]
    fn runs_all_iterations_without_plateau_stop() {
        let rows = run_monitor(MonitorTarget::Sine2d, 2_000, 200.0, 0.1, 0, 12).unwrap();
        assert_eq!(rows.len(), 12);
    }
}
