use nalgebra::{DMatrix, DVector};

use super::{run_method, Method};
use crate::baselines::NgviConfig;
use crate::engine::{
    build_batch, naive_moment_estimates, normalized_weights, DaisConfig, RunReport,
};
use crate::error::Result;
use crate::gaussian::GaussianParams;
use crate::targets::{
    laplace_fit, logistic_target, LaplaceFit, LogisticRegressionData, TargetModel,
};

#[derive(Debug, Clone)]
pub struct LogisticOutcome {
    pub laplace: LaplaceFit,
    pub report: RunReport,
}

/// Laplace fit from the origin, then the selected method from the Laplace
/// Gaussian.
pub fn logistic_pipeline(
    data: LogisticRegressionData,
    method: Method,
    dais: &DaisConfig,
    ngvi: &NgviConfig,
    max_newton_iters: usize,
    newton_tol: f64,
) -> Result<LogisticOutcome> {
    let target = logistic_target(data);
    let d = target.dim();
    let laplace = laplace_fit(&target, &DVector::zeros(d), max_newton_iters, newton_tol)?;
    let report = run_method(method, &laplace.params, &target, dais, ngvi)?;
    Ok(LogisticOutcome { laplace, report })
}

/// Per-coordinate `(mean, sqrt(diag Γ))`.
pub fn posterior_moments(params: &GaussianParams) -> Vec<(f64, f64)> {
    params
        .mean()
        .iter()
        .zip(params.covariance().diagonal().iter())
        .map(|(m, v)| (*m, v.sqrt()))
        .collect()
}

/// Self-normalized importance sampling moments of `target` with `proposal`.
pub fn snis_moments<T: TargetModel + ?Sized>(
    proposal: &GaussianParams,
    target: &T,
    s_count: usize,
    seed: u64,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let batch = build_batch(proposal, target, s_count, seed)?;
    let w = normalized_weights(batch.phi.as_slice(), 1.0);
    naive_moment_estimates(&batch, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{synthetic_logistic_data, GaussianTarget};

    #[test]
    fn moments_are_mean_and_sd() {
        let p = GaussianParams::new(
            DVector::from_vec(vec![1.0, -2.0]),
            DMatrix::from_row_slice(2, 2, &[4.0, 0.5, 0.5, 0.25]),
        )
        .unwrap();
        assert_eq!(posterior_moments(&p), vec![(1.0, 2.0), (-2.0, 0.5)]);
    }

    #[test]
    fn snis_recovers_gaussian() {
        let pi = GaussianParams::new(
            DVector::from_vec(vec![0.3, -0.2]),
            DMatrix::from_row_slice(2, 2, &[0.8, 0.1, 0.1, 0.6]),
        )
        .unwrap();
        let (m, c) = snis_moments(
            &GaussianParams::standard(2),
            &GaussianTarget::new(pi.clone()),
            50_000,
            3,
        )
        .unwrap();
        assert!((m - pi.mean()).amax() < 0.02);
        assert!((c - pi.covariance()).amax() < 0.03);
    }

    #[test]
    fn pipeline_runs_small() {
        let data = synthetic_logistic_data(100, 3, 2).unwrap();
        let dais = DaisConfig {
            s_count: 2_000,
            n_ess: 200.0,
            max_iters: 5,
            ..DaisConfig::default()
        };
        let out =
            logistic_pipeline(data, Method::Dais, &dais, &NgviConfig::default(), 50, 1e-8).unwrap();
        assert!(out.laplace.grad_norm < 1e-8);
        assert_eq!(out.report.final_params.dim(), 3);
    }
}
