use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use super::TargetModel;

/// Banana-shaped density: a correlated bivariate normal pulled back through
/// the warp `(x₁, x₂) ↦ (x₁, x₂ + x₁² + 1)`. The warp has unit Jacobian, so
/// the log-density is normalized.
#[derive(Debug, Clone)]
pub struct Banana {
    precision: Matrix2<f64>,
    log_norm: f64,
}

impl Default for Banana {
    fn default() -> Self {
        let cov: Matrix2<f64> = Matrix2::new(1.0, 0.9, 0.9, 1.0);
        let precision = cov.try_inverse().expect("invertible");
        let log_norm = -(2.0 * std::f64::consts::PI).ln() - 0.5 * cov.determinant().ln();
        Self {
            precision,
            log_norm,
        }
    }
}

pub fn banana_target() -> Banana {
    Banana::default()
}

impl Banana {
    fn warp(x: &DVector<f64>) -> Vector2<f64> {
        Vector2::new(x[0], x[1] + x[0] * x[0] + 1.0)
    }
}

impl TargetModel for Banana {
    fn dim(&self) -> usize {
        2
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        let v = Self::warp(x);
        self.log_norm - 0.5 * v.dot(&(self.precision * v))
    }

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        self.log_density_and_grad(x).1
    }

    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let v = Self::warp(x);
        let pv = self.precision * v;
        // Jᵀ (P v) with J = [[1, 0], [2 x₁, 1]]
        let g = DVector::from_vec(vec![-(pv[0] + 2.0 * x[0] * pv[1]), -pv[1]]);
        (self.log_norm - 0.5 * v.dot(&pv), g)
    }

    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let v = Self::warp(x);
        let pv = self.precision * v;
        let j = Matrix2::new(1.0, 0.0, 2.0 * x[0], 1.0);
        let mut h = -(j.transpose() * self.precision * j);
        h[(0, 0)] -= 2.0 * pv[1];
        Some(DMatrix::from_fn(2, 2, |r, c| h[(r, c)]))
    }
}
