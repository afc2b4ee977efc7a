use nalgebra::{DMatrix, DVector};

use super::TargetModel;
use crate::error::Result;
use crate::gaussian::GaussianParams;

/// A normalized Gaussian used as a target.
#[derive(Debug, Clone)]
pub struct GaussianTarget {
    params: GaussianParams,
    precision: DMatrix<f64>,
}

impl GaussianTarget {
    pub fn new(params: GaussianParams) -> Self {
        let precision = params.precision();
        Self { params, precision }
    }

    pub fn params(&self) -> &GaussianParams {
        &self.params
    }
}

impl TargetModel for GaussianTarget {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        self.params.log_density_unchecked(x)
    }

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        self.params.grad_log_density_unchecked(x)
    }

    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        self.params.log_density_and_grad_unchecked(x)
    }

    fn hessian_log_density(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(-&self.precision)
    }

    fn gaussian(&self) -> Option<&GaussianParams> {
        Some(&self.params)
    }
}

/// Gaussian with mean `(mean_value, …)` and covariance
/// `base + diag_boost · δ(i = j)`.
pub fn correlated_gaussian_target(
    d: usize,
    mean_value: f64,
    base: f64,
    diag_boost: f64,
) -> Result<GaussianTarget> {
    let cov = DMatrix::from_fn(d, d, |i, j| if i == j { base + diag_boost } else { base });
    let params = GaussianParams::new(DVector::from_element(d, mean_value), cov)?;
    Ok(GaussianTarget::new(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DaisError;
    use crate::targets::check;

    #[test]
    fn example_targets_build() {
        let t10 = correlated_gaussian_target(10, 1.0, 0.9, 0.1).unwrap();
        assert_eq!(t10.dim(), 10);
        assert_eq!(t10.params().covariance()[(0, 0)], 1.0);
        assert_eq!(t10.params().covariance()[(2, 5)], 0.9);
        let t100 = correlated_gaussian_target(100, 1.0, 0.9, 0.1).unwrap();
        assert_eq!(t100.params().mean(), &DVector::from_element(100, 1.0));
    }

    #[test]
    fn standard_normal_case() {
        let t = correlated_gaussian_target(1, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(t.grad_log_density(&DVector::zeros(1))[0], 0.0);
    }

    #[test]
    fn non_pd_rejected() {
        let err = correlated_gaussian_target(3, 0.0, 1.0, -0.5).unwrap_err();
        assert!(matches!(err, DaisError::CholeskyFailure { .. }));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = correlated_gaussian_target(6, 1.0, 0.9, 0.1).unwrap();
        check::assert_derivatives(&t, 1.0, 41);
    }
}
