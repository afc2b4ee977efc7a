use nalgebra::DVector;

use super::TargetModel;
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::linalg;

/// Step halvings allowed per Newton iteration before giving up.
pub const MAX_STEP_HALVINGS: usize = 30;

#[derive(Debug, Clone)]
pub struct LaplaceFit {
    pub params: GaussianParams,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Gaussian at the mode with covariance `(−∇² log π)⁻¹`.
pub fn laplace_init<T: TargetModel + ?Sized>(
    target: &T,
    x0: &DVector<f64>,
    max_newton_iters: usize,
    grad_tol: f64,
) -> Result<GaussianParams> {
    laplace_fit(target, x0, max_newton_iters, grad_tol).map(|f| f.params)
}

/// Damped Newton ascent on `log π` followed by the curvature at the mode.
pub fn laplace_fit<T: TargetModel + ?Sized>(
    target: &T,
    x0: &DVector<f64>,
    max_newton_iters: usize,
    grad_tol: f64,
) -> Result<LaplaceFit> {
    if x0.len() != target.dim() {
        return Err(DaisError::DimensionMismatch {
            expected: target.dim(),
            found: x0.len(),
        });
    }
    let mut x = x0.clone();
    let (mut value, mut grad) = target.log_density_and_grad(&x);
    let mut iterations = 0;
    loop {
        let grad_norm = linalg::inf_norm(&grad);
        let neg_hess = -target
            .hessian_log_density(&x)
            .ok_or(DaisError::HessianUnavailable)?;
        if grad_norm < grad_tol {
            let l = linalg::cholesky(&linalg::symmetrize(&neg_hess))?;
            let params = GaussianParams::new(x, linalg::cholesky_inverse(&l))?;
            return Ok(LaplaceFit {
                params,
                iterations,
                grad_norm,
            });
        }
        if iterations == max_newton_iters {
            return Err(DaisError::NoConvergence {
                iterations,
                grad_norm,
            });
        }
        let l = linalg::cholesky(&linalg::symmetrize(&neg_hess))?;
        let mut step = grad.as_slice().to_vec();
        linalg::cholesky_solve(&l, &mut step);
        let step = DVector::from_vec(step);

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            let candidate = &x + &step * scale;
            let (v, g) = target.log_density_and_grad(&candidate);
            if v.is_finite() && v >= value {
                accepted = Some((candidate, v, g));
                break;
            }
            scale *= 0.5;
        }
        let Some((nx, nv, ng)) = accepted else {
            return Err(DaisError::NoConvergence {
                iterations,
                grad_norm,
            });
        };
        x = nx;
        value = nv;
        grad = ng;
        iterations += 1;
    }
}
