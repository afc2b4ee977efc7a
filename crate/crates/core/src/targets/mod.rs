//! Unnormalized target densities.
//!
//! A [`TargetModel`] supplies `log π̄(x)` up to an additive constant together
//! with its gradient; the Hessian is optional and only needed for Laplace
//! initialization and the natural-gradient baseline.

use nalgebra::{DMatrix, DVector};

use crate::gaussian::GaussianParams;

mod banana;
mod csv_data;
mod gaussian_target;
mod laplace;
mod logistic;
mod mixture;
mod sine;

pub use banana::{banana_target, Banana};
pub use csv_data::{load_logistic_csv, write_logistic_csv};
pub use gaussian_target::{correlated_gaussian_target, GaussianTarget};
pub use laplace::{laplace_fit, laplace_init, LaplaceFit, MAX_STEP_HALVINGS};
pub use logistic::{
    log_sigmoid, logistic_target, sigmoid, synthetic_logistic_data, LogisticRegressionData,
    LogisticTarget, PRIOR_VARIANCE,
};
pub use mixture::{mixture_target, GaussianMixture};
pub use sine::{sine_2d_target, Sine2d};

pub trait TargetModel: Send + Sync {
    fn dim(&self) -> usize;

    fn log_density(&self, x: &DVector<f64>) -> f64;

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Both at once; targets that share work between the two override this.
    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (self.log_density(x), self.grad_log_density(x))
    }

    fn hessian_log_density(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }

    /// The target's own parameters when it is exactly Gaussian.
    fn gaussian(&self) -> Option<&GaussianParams> {
        None
    }
}

impl<T: TargetModel + ?Sized> TargetModel for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &DVector<f64>) -> f64 {
        (**self).log_density(x)
    }
    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).grad_log_density(x)
    }
    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (**self).log_density_and_grad(x)
    }
    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        (**self).hessian_log_density(x)
    }
    fn gaussian(&self) -> Option<&GaussianParams> {
        (**self).gaussian()
    }
}

impl<T: TargetModel + ?Sized> TargetModel for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &DVector<f64>) -> f64 {
        (**self).log_density(x)
    }
    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).grad_log_density(x)
    }
    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (**self).log_density_and_grad(x)
    }
    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        (**self).hessian_log_density(x)
    }
    fn gaussian(&self) -> Option<&GaussianParams> {
        (**self).gaussian()
    }
}

/// Adds a constant to the log-density of another target.
pub struct Offset<T> {
    pub inner: T,
    pub offset: f64,
}

impl<T: TargetModel> TargetModel for Offset<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn log_density(&self, x: &DVector<f64>) -> f64 {
        self.inner.log_density(x) + self.offset
    }
    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        self.inner.grad_log_density(x)
    }
    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (v, g) = self.inner.log_density_and_grad(x);
        (v + self.offset, g)
    }
    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.inner.hessian_log_density(x)
    }
}

/// Central finite-difference gradient of `log_density`.
pub fn finite_difference_gradient<T: TargetModel + ?Sized>(
    target: &T,
    x: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (target.log_density(&xp) - target.log_density(&xm)) / (2.0 * h)
    })
}

/// Central finite-difference Jacobian of `grad_log_density`.
pub fn finite_difference_hessian<T: TargetModel + ?Sized>(
    target: &T,
    x: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let d = x.len();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (target.grad_log_density(&xp) - target.grad_log_density(&xm)) / (2.0 * h);
        out.set_column(j, &col);
    }
    out
}

#[cfg(test)]
pub(crate) mod check {
    use super::*;
    use crate::rng::NormalStream;

    /// Random evaluation points: scaled standard normals, seeded.
    pub fn points(d: usize, n: usize, scale: f64, seed: u64) -> Vec<DVector<f64>> {
        (0..n)
            .map(|s| {
                let mut st = NormalStream::new(seed, s as u64);
                DVector::from_fn(d, |_, _| scale * st.next_normal())
            })
            .collect()
    }

    pub fn gradient_error<T: TargetModel + ?Sized>(t: &T, x: &DVector<f64>) -> f64 {
        let g = t.grad_log_density(x);
        let fd = finite_difference_gradient(t, x, 1e-6);
        (&g - &fd).norm() / g.norm().max(1.0)
    }

    pub fn hessian_error<T: TargetModel + ?Sized>(t: &T, x: &DVector<f64>) -> f64 {
        let h = t.hessian_log_density(x).expect("hessian");
        let fd = finite_difference_hessian(t, x, 1e-6);
        (&h - &fd).norm() / h.norm().max(1.0)
    }

    pub fn assert_derivatives<T: TargetModel + ?Sized>(t: &T, scale: f64, seed: u64) {
        for x in points(t.dim(), 100, scale, seed) {
            let (v, g) = t.log_density_and_grad(&x);
            assert_eq!(v, t.log_density(&x));
            assert_eq!(g, t.grad_log_density(&x));
            let e = gradient_error(t, &x);
            assert!(e < 1e-5, "gradient fd error {e} at {x}");
            if let Some(h) = t.hessian_log_density(&x) {
                assert!(
                    crate::linalg::max_asymmetry(&h) <= 1e-12 * crate::linalg::max_abs(&h).max(1.0)
                );
                let e = hessian_error(t, &x);
                assert!(e < 1e-4, "hessian fd error {e} at {x}");
            }
        }
    }
}
