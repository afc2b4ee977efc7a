//! Comparison methods on the same Gaussian machinery.

mod ngvi;

pub use ngvi::{ngvi_step, ngvi_update, run_ngvi, NgviConfig, NgviUpdate};

use crate::engine::{run_adaptive, DaisConfig, MomentRule, RunReport};
use crate::error::Result;
use crate::gaussian::GaussianParams;
use crate::targets::TargetModel;

/// The adaptive loop with plain self-normalized moments instead of the Stein
/// estimates: `μ ← (1−c)μ + c·mean_hat`, `Γ ← (1−c)Γ + c·cov_hat`, with the
/// same damping, repair and stopping rules as [`crate::run_dais`].
pub fn run_plain_ais<T: TargetModel + ?Sized>(
    initial: &GaussianParams,
    target: &T,
    config: &DaisConfig,
) -> Result<RunReport> {
    run_adaptive(initial, target, config, MomentRule::Naive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{adaptive_step, DaisState};
    use crate::rng::iteration_seed;
    use crate::targets::{correlated_gaussian_target, mixture_target, GaussianTarget};
    use nalgebra::DVector;

    #[test]
    fn identity_target_drift_is_small_but_nonzero() {
        let q = GaussianParams::standard(10);
        let t = GaussianTarget::new(q.clone());
        let config = DaisConfig::default();
        let state = DaisState {
            proposal: q.clone(),
            t: 1,
        };
        let (next, rec) =
            adaptive_step(&state, &t, &config, iteration_seed(0, 1), MomentRule::Naive).unwrap();
        assert_eq!(rec.gamma, 1.0);
        let drift = (next.mean() - q.mean()).amax();
        assert!(drift > 0.0 && drift < 0.05, "{drift}");
    }

    #[test]
    fn unit_c_is_pure_moment_matching() {
        let t = correlated_gaussian_target(3, 0.5, 0.2, 0.8).unwrap();
        let config = DaisConfig {
            s_count: 5_000,
            n_ess: 4_000.0,
            robustness_c: 1.0,
            ..DaisConfig::default()
        };
        let q = GaussianParams::standard(3);
        let seed = iteration_seed(0, 1);
        let batch = crate::engine::build_batch(&q, &t, config.s_count, seed).unwrap();
        let sol =
            crate::engine::solve_damping(batch.phi.as_slice(), config.n_ess, 1e-6, 1e-6).unwrap();
        let (mean_hat, cov_hat) =
            crate::engine::naive_moment_estimates(&batch, &sol.normalized_weights).unwrap();
        let state = DaisState { proposal: q, t: 1 };
        let (next, rec) = adaptive_step(&state, &t, &config, seed, MomentRule::Naive).unwrap();
        assert_eq!(rec.pd_repairs, 0);
        assert!((next.mean() - mean_hat).amax() < 1e-12);
        assert!((next.covariance() - cov_hat).amax() < 1e-12);
    }

    #[test]
    fn plain_ais_runs_on_mixture() {
        let config = DaisConfig {
            s_count: 5_000,
            n_ess: 500.0,
            max_iters: 20,
            ..DaisConfig::default()
        };
        let report =
            run_plain_ais(&GaussianParams::standard(2), &mixture_target(), &config).unwrap();
        let exact = DVector::from_element(2, -1.16);
        assert!((report.final_params.mean() - exact).amax() < 0.3);
    }
}
