use nalgebra::{DMatrix, DVector};

use super::TargetModel;
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;

/// Finite mixture of Gaussians.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    components: Vec<GaussianParams>,
    precisions: Vec<DMatrix<f64>>,
}

/// The two-component bivariate mixture with weights 0.3 / 0.7.
pub fn mixture_target() -> GaussianMixture {
    let c1 = GaussianParams::new(
        DVector::from_vec(vec![0.8, 0.8]),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.8, 0.8, 1.0]),
    )
    .expect("PD");
    let c2 = GaussianParams::new(
        DVector::from_vec(vec![-2.0, -2.0]),
        DMatrix::from_row_slice(2, 2, &[1.0, -0.6, -0.6, 1.0]),
    )
    .expect("PD");
    GaussianMixture::new(vec![0.3, 0.7], vec![c1, c2]).expect("valid mixture")
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, components: Vec<GaussianParams>) -> Result<Self> {
        if weights.len() != components.len() || components.is_empty() {
            return Err(DaisError::InvalidConfig(
                "mixture needs one weight per component".into(),
            ));
        }
        let d = components[0].dim();
        if let Some(c) = components.iter().find(|c| c.dim() != d) {
            return Err(DaisError::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w > 0.0)) || !total.is_finite() {
            return Err(DaisError::InvalidConfig("weights must be positive".into()));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        let precisions = components.iter().map(|c| c.precision()).collect();
        Ok(Self {
            log_weights,
            weights,
            components,
            precisions,
        })
    }

    /// `Σ w_k μ_k`.
    pub fn exact_mean(&self) -> DVector<f64> {
        self.weights
            .iter()
            .zip(&self.components)
            .fold(DVector::zeros(self.dim()), |acc, (w, c)| {
                acc + c.mean() * *w
            })
    }

    /// `Σ w_k (Σ_k + μ_k μ_kᵀ) − μ μᵀ`.
    pub fn exact_covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        let m = self.exact_mean();
        let second = self
            .weights
            .iter()
            .zip(&self.components)
            .fold(DMatrix::zeros(d, d), |acc, (w, c)| {
                acc + (c.covariance() + c.mean() * c.mean().transpose()) * *w
            });
        second - &m * m.transpose()
    }

    pub fn exact_moments(&self) -> GaussianParams {
        GaussianParams::new(
            self.exact_mean(),
            crate::linalg::symmetrize(&self.exact_covariance()),
        )
        .expect("mixture covariance is PD")
    }

    /// Per-component log-densities plus log-weights, and their log-sum-exp.
    fn component_terms(&self, x: &DVector<f64>) -> (Vec<f64>, f64) {
        let terms: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_weights)
            .map(|(c, lw)| lw + c.log_density_unchecked(x))
            .collect();
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
        (terms, lse)
    }
}

impl TargetModel for GaussianMixture {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        self.component_terms(x).1
    }

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        self.log_density_and_grad(x).1
    }

    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (terms, lse) = self.component_terms(x);
        let mut g = DVector::zeros(self.dim());
        for (c, t) in self.components.iter().zip(&terms) {
            let r = (t - lse).exp();
            g += c.grad_log_density_unchecked(x) * r;
        }
        (lse, g)
    }

    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let d = self.dim();
        let (terms, lse) = self.component_terms(x);
        let mut g = DVector::zeros(d);
        let mut h = DMatrix::zeros(d, d);
        for ((c, prec), t) in self.components.iter().zip(&self.precisions).zip(&terms) {
            let r = (t - lse).exp();
            let gk = c.grad_log_density_unchecked(x);
            h += (&gk * gk.transpose() - prec) * r;
            g += gk * r;
        }
        Some(crate::linalg::symmetrize(&(h - &g * g.transpose())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::check;

    #[test]
    fn exact_moments_formula() {
        let t = mixture_target();
        let m = t.exact_mean();
        assert!((m[0] + 1.16).abs() < 1e-12 && (m[1] + 1.16).abs() < 1e-12);
        let c = t.exact_covariance();
        assert!((c[(0, 0)] - 2.6464).abs() < 1e-12);
        assert!((c[(0, 1)] - 1.4664).abs() < 1e-12);
    }

    #[test]
    fn log_density_finite_far_away() {
        let t = mixture_target();
        let x = DVector::from_vec(vec![100.0, 100.0]);
        assert!(t.log_density(&x).is_finite());
        assert!(t.grad_log_density(&x).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        check::assert_derivatives(&mixture_target(), 2.0, 6);
    }

    #[test]
    fn moments_match_grid_integration() {
        let t = mixture_target();
        let n = 2000;
        let (lo, hi) = (-8.0, 8.0);
        let h = (hi - lo) / n as f64;
        let (mut z, mut m1, mut m2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let x0 = lo + (i as f64 + 0.5) * h;
            for j in 0..n {
                let x1 = lo + (j as f64 + 0.5) * h;
                let p = t.log_density(&DVector::from_vec(vec![x0, x1])).exp();
                z += p;
                m1 += p * x0;
                m2 += p * x1;
                s11 += p * x0 * x0;
                s22 += p * x1 * x1;
                s12 += p * x0 * x1;
            }
        }
        let (m1, m2) = (m1 / z, m2 / z);
        let c11 = s11 / z - m1 * m1;
        let c22 = s22 / z - m2 * m2;
        let c12 = s12 / z - m1 * m2;
        let exact_m = t.exact_mean();
        let exact_c = t.exact_covariance();
        let close = |a: f64, b: f64| ((a - b) / b).abs() < 5e-4;
        assert!(close(m1, exact_m[0]) && close(m2, exact_m[1]));
        assert!(close(c11, exact_c[(0, 0)]) && close(c22, exact_c[(1, 1)]));
        assert!(close(c12, exact_c[(0, 1)]));
    }
}
