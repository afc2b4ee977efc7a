use nalgebra::{DMatrix, DVector};

use super::TargetModel;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Standard bivariate normal prior times a Gaussian penalty around the ridge
/// `x₂ = 1 + sin(2 x₁)` with width `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct Sine2d {
    pub sigma: f64,
}

pub fn sine_2d_target(sigma: f64) -> Sine2d {
    assert!(sigma > 0.0, "sigma must be positive");
    Sine2d { sigma }
}

impl Default for Sine2d {
    fn default() -> Self {
        Self { sigma: 0.1 }
    }
}

impl Sine2d {
    fn residual(x: &DVector<f64>) -> f64 {
        x[1] - 1.0 - (2.0 * x[0]).sin()
    }
}

impl TargetModel for Sine2d {
    fn dim(&self) -> usize {
        2
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        let r = Self::residual(x);
        let s2 = self.sigma * self.sigma;
        -r * r / (2.0 * s2) - 0.5 * (x[0] * x[0] + x[1] * x[1]) - LN_2PI
    }

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = Self::residual(x);
        let s2 = self.sigma * self.sigma;
        let c = (2.0 * x[0]).cos();
        DVector::from_vec(vec![2.0 * r * c / s2 - x[0], -r / s2 - x[1]])
    }

    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let r = Self::residual(x);
        let s2 = self.sigma * self.sigma;
        let c = (2.0 * x[0]).cos();
        let s = (2.0 * x[0]).sin();
        let h11 = (2.0 / s2) * (-2.0 * c * c - 2.0 * r * s) - 1.0;
        let h12 = 2.0 * c / s2;
        let h22 = -1.0 / s2 - 1.0;
        Some(DMatrix::from_row_slice(2, 2, &[h11, h12, h12, h22]))
    }
}
