use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::engine::{
    build_batch, naive_moment_estimates, normalized_weights, stein_moment_estimates,
};
use crate::error::{DaisError, Result};
use crate::gaussian::{damped_gaussian_oracle, GaussianParams};
use crate::par;
use crate::rng::iteration_seed;
use crate::targets::correlated_gaussian_target;

/// Estimator error against the exact damped moments, as a function of `γ`,
/// for `N(0, I)` against the correlated Gaussian with mean 1, `Σ = 0.9 + 0.1 δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseConfig {
    pub d: usize,
    pub s_count: usize,
    pub replications: usize,
    pub gammas: Vec<f64>,
    pub seed: u64,
}

impl RmseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.s_count == 0 || self.replications == 0 {
            return Err(DaisError::InvalidConfig(
                "d, s_count and replications must be positive".into(),
            ));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) {
            return Err(DaisError::InvalidConfig(
                "gamma grid must be non-empty with values in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// `10^-3, 10^-2.5, …, 10^0`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseRow {
    pub gamma: f64,
    pub mean_stein: f64,
    pub mean_naive: f64,
    pub cov_stein: f64,
    pub cov_naive: f64,
}

/// Least-squares slopes of `log RMSE` against `log γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub mean_stein: f64,
    pub mean_naive: f64,
    pub cov_stein: f64,
    pub cov_naive: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub points: usize,
}

/// Squared errors `[mean_stein, mean_naive, cov_stein, cov_naive]` per γ for
/// one replication.
fn replication_errors(
    proposal: &GaussianParams,
    target: &crate::targets::GaussianTarget,
    oracles: &[GaussianParams],
    config: &RmseConfig,
    seed: u64,
) -> Result<Vec<[f64; 4]>> {
    let batch = build_batch(proposal, target, config.s_count, seed)?;
    let mut out = Vec::with_capacity(config.gammas.len());
    for (gamma, oracle) in config.gammas.iter().zip(oracles) {
        let w = normalized_weights(batch.phi.as_slice(), *gamma);
        let (g_mu, g_gamma) = stein_moment_estimates(&batch, proposal, &w)?;
        let mean_stein = proposal.mean() + &g_mu * *gamma;
        let cov_stein = proposal.covariance() + &g_gamma * *gamma;
        let (mean_naive, cov_naive) = naive_moment_estimates(&batch, &w)?;
        let sq = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>();
        out.push([
            (mean_stein - oracle.mean()).norm_squared(),
            (mean_naive - oracle.mean()).norm_squared(),
            sq(&(cov_stein - oracle.covariance())),
            sq(&(cov_naive - oracle.covariance())),
        ]);
    }
    Ok(out)
}

/// Root-mean-square errors over `replications` independent batches; each
/// replication reuses one batch across the whole γ grid.
pub fn rmse_sweep(config: &RmseConfig) -> Result<Vec<RmseRow>> {
    config.validate()?;
    let target = correlated_gaussian_target(config.d, 1.0, 0.9, 0.1)?;
    let proposal = GaussianParams::standard(config.d);
    let oracles = config
        .gammas
        .iter()
        .map(|g| damped_gaussian_oracle(&proposal, target.params(), *g))
        .collect::<Result<Vec<_>>>()?;

    let per_rep = par::map_indices(config.replications, |r| {
        replication_errors(
            &proposal,
            &target,
            &oracles,
            config,
            iteration_seed(config.seed, r as u64),
        )
    });
    let mut sums = vec![[0.0; 4]; config.gammas.len()];
    for rep in per_rep {
        for (acc, e) in sums.iter_mut().zip(rep?) {
            for k in 0..4 {
                acc[k] += e[k];
            }
        }
    }
    let n = config.replications as f64;
    Ok(config
        .gammas
        .iter()
        .zip(sums)
        .map(|(gamma, s)| RmseRow {
            gamma: *gamma,
            mean_stein: (s[0] / n).sqrt(),
            mean_naive: (s[1] / n).sqrt(),
            cov_stein: (s[2] / n).sqrt(),
            cov_naive: (s[3] / n).sqrt(),
        })
        .collect())
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits slopes over the rows with `γ ∈ [gamma_lo, gamma_hi]`. `None` when
/// fewer than two distinct γ fall in range.
pub fn fit_slopes(rows: &[RmseRow], gamma_lo: f64, gamma_hi: f64) -> Option<Slopes> {
    let tol = 1e-9;
    let used: Vec<&RmseRow> = rows
        .iter()
        .filter(|r| r.gamma >= gamma_lo * (1.0 - tol) && r.gamma <= gamma_hi * (1.0 + tol))
        .collect();
    let xs: Vec<f64> = used.iter().map(|r| r.gamma.ln()).collect();
    if xs.len() < 2 || xs.iter().all(|x| *x == xs[0]) {
        return None;
    }
    let slope = |f: fn(&RmseRow) -> f64| {
        let ys: Vec<f64> = used.iter().map(|r| f(r).ln()).collect();
        ls_slope(&xs, &ys)
    };
    Some(Slopes {
        mean_stein: slope(|r| r.mean_stein),
        mean_naive: slope(|r| r.mean_naive),
        cov_stein: slope(|r| r.cov_stein),
        cov_naive: slope(|r| r.cov_naive),
        gamma_lo,
        gamma_hi,
        points: used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_log_spaced() {
        let g = default_gamma_grid();
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert_eq!(g[6], 1.0);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_power_law_slope() {
        let rows: Vec<RmseRow> = [1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&g: &f64| RmseRow {
                gamma: g,
                mean_stein: 3.0 * g,
                mean_naive: 0.5,
                cov_stein: g.powf(1.5),
                cov_naive: 2.0 * g.powf(-0.1),
            })
            .collect();
        let s = fit_slopes(&rows, 1e-3, 1e-1).unwrap();
        assert!((s.mean_stein - 1.0).abs() < 1e-12);
        assert!(s.mean_naive.abs() < 1e-12);
        assert!((s.cov_stein - 1.5).abs() < 1e-12);
        assert!((s.cov_naive + 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_gamma_has_no_slope() {
        let config = RmseConfig {
            d: 3,
            s_count: 50,
            replications: 2,
            gammas: vec![0.1],
            seed: 1,
        };
        let rows = rmse_sweep(&config).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(fit_slopes(&rows, 1e-3, 1e-1).is_none());
    }

    #[test]
    fn single_replication_runs() {
        let config = RmseConfig {
            d: 4,
            s_count: 100,
            replications: 1,
            gammas: default_gamma_grid(),
            seed: 9,
        };
        let rows = rmse_sweep(&config).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.mean_stein.is_finite() && r.cov_naive.is_finite()));
    }

    #[test]
    fn invalid_grid_rejected() {
        let config = RmseConfig {
            d: 2,
            s_count: 10,
            replications: 1,
            gammas: vec![0.0],
            seed: 0,
        };
        assert!(rmse_sweep(&config).is_err());
    }
}
