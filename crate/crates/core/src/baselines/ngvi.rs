use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::engine::{IterationRecord, RunReport, StopReason};
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::linalg;
use crate::par;
use crate::rng::iteration_seed;
use crate::targets::TargetModel;

/// Natural-gradient VI on the reverse KL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NgviConfig {
    /// `ζ ∈ (0, 1]`.
    pub step_size: f64,
    pub s_count: usize,
    pub max_iters: usize,
    /// Stop once the natural gradient's largest entry falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// Use closed-form `E_q[∇log π]`, `E_q[∇²log π]` (Gaussian targets only).
    pub use_analytic_expectations: bool,
}

impl Default for NgviConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            s_count: 1_000,
            max_iters: 500,
            grad_tol: 1e-4,
            seed: 0,
            use_analytic_expectations: false,
        }
    }
}

impl NgviConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(DaisError::InvalidConfig(format!(
                "step_size = {} must be in (0, 1]",
                self.step_size
            )));
        }
        if self.s_count == 0 {
            return Err(DaisError::InvalidConfig("s_count must be positive".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(DaisError::InvalidConfig(
                "grad_tol must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one natural-gradient update.
#[derive(Debug, Clone)]
pub struct NgviUpdate {
    pub params: GaussianParams,
    /// ELBO of the proposal the step started from (MC estimate).
    pub elbo: f64,
    /// Largest entry of `(Γ E[∇log π], −E[∇²log π] − Γ⁻¹)` at the start point.
    pub grad_norm: f64,
}

struct Expectations {
    grad: DVector<f64>,
    neg_hessian: DMatrix<f64>,
    elbo: f64,
}

fn expectations<T: TargetModel + ?Sized>(
    proposal: &GaussianParams,
    target: &T,
    config: &NgviConfig,
    seed_t: u64,
) -> Result<Expectations> {
    let d = proposal.dim();
    let per_sample = par::map_indices(config.s_count, |s| {
        let x = proposal.sample_one(seed_t, s);
        let (log_p, grad) = target.log_density_and_grad(&x);
        let log_q = proposal.log_density_unchecked(&x);
        let hess = if config.use_analytic_expectations {
            None
        } else {
            target.hessian_log_density(&x)
        };
        (log_p - log_q, grad, hess)
    });

    let n = config.s_count as f64;
    let mut elbo = 0.0;
    let mut grad = DVector::zeros(d);
    let mut hess_sum = DMatrix::zeros(d, d);
    for (s, (phi, g, h)) in per_sample.into_iter().enumerate() {
        if !phi.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(DaisError::NonFiniteDensity { index: s });
        }
        elbo += phi;
        grad += g;
        if !config.use_analytic_expectations {
            hess_sum -= h.ok_or(DaisError::HessianUnavailable)?;
        }
    }
    elbo /= n;

    if config.use_analytic_expectations {
        let gauss = target.gaussian().ok_or_else(|| {
            DaisError::InvalidConfig("analytic expectations need a Gaussian target".into())
        })?;
        let prec = gauss.precision();
        let grad = &prec * (gauss.mean() - proposal.mean());
        return Ok(Expectations {
            grad,
            neg_hessian: prec,
            elbo,
        });
    }
    Ok(Expectations {
        grad: grad / n,
        neg_hessian: linalg::symmetrize(&(hess_sum / n)),
        elbo,
    })
}

/// One update with diagnostics.
///
/// The precision moves as `Γ⁻¹ ← (1−ζ)Γ⁻¹ + ζ(−E[∇²log π])`, then the mean
/// as `μ ← μ + ζ Γ E[∇log π]` using the updated `Γ`.
pub fn ngvi_update<T: TargetModel + ?Sized>(
    proposal: &GaussianParams,
    target: &T,
    config: &NgviConfig,
    seed_t: u64,
) -> Result<NgviUpdate> {
    config.validate()?;
    if proposal.dim() != target.dim() {
        return Err(DaisError::DimensionMismatch {
            expected: target.dim(),
            found: proposal.dim(),
        });
    }
    let zeta = config.step_size;
    let e = expectations(proposal, target, config, seed_t)?;
    let old_prec = proposal.precision();

    let mean_dir = proposal.covariance() * &e.grad;
    let prec_dir = &e.neg_hessian - &old_prec;
    let grad_norm = linalg::inf_norm(&mean_dir).max(linalg::max_abs(&prec_dir));

    let new_prec = linalg::symmetrize(&(&old_prec * (1.0 - zeta) + &e.neg_hessian * zeta));
    let l = linalg::cholesky(&new_prec)?;
    let cov = linalg::cholesky_inverse(&l);
    let mean = proposal.mean() + &cov * &e.grad * zeta;
    Ok(NgviUpdate {
        params: GaussianParams::new(mean, cov)?,
        elbo: e.elbo,
        grad_norm,
    })
}

/// One natural-gradient step.
pub fn ngvi_step<T: TargetModel + ?Sized>(
    proposal: &GaussianParams,
    target: &T,
    config: &NgviConfig,
    seed_t: u64,
) -> Result<GaussianParams> {
    Ok(ngvi_update(proposal, target, config, seed_t)?.params)
}

/// Iterates [`ngvi_step`] until the natural gradient is below `grad_tol` or
/// `max_iters` is reached. Records use the step size in the `gamma` column.
pub fn run_ngvi<T: TargetModel + ?Sized>(
    initial: &GaussianParams,
    target: &T,
    config: &NgviConfig,
) -> Result<RunReport> {
    config.validate()?;
    let mut current = initial.clone();
    let mut records = Vec::new();
    let mut stopped_reason = StopReason::MaxIters;
    for t in 1..=config.max_iters {
        let update = ngvi_update(
            &current,
            target,
            config,
            iteration_seed(config.seed, t as u64),
        )?;
        current = update.params;
        records.push(IterationRecord {
            t,
            gamma: config.step_size,
            effective_gamma: config.step_size,
            ess: config.s_count as f64,
            elbo: update.elbo,
            mean: current.mean().clone(),
            covariance: current.covariance().clone(),
            pd_repairs: 0,
            at_lower_bound: false,
        });
        if update.grad_norm < config.grad_tol {
            stopped_reason = StopReason::GradTol;
            break;
        }
    }
    Ok(RunReport {
        records,
        final_params: current,
        stopped_reason,
    })
}
