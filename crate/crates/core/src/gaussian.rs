//! Multivariate Gaussian parameters with a cached Cholesky factor.

use nalgebra::{DMatrix, DVector};

use crate::error::{DaisError, Result};
use crate::linalg;
use crate::par;
use crate::rng::NormalStream;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Mean, covariance and lower Cholesky factor of a Gaussian.
///
/// Immutable after construction, so it can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    chol: DMatrix<f64>,
    log_det_half: f64,
}

impl GaussianParams {
    /// Builds the parameters and caches the Cholesky factor. A covariance
    /// that is not numerically positive-definite is an error; no jitter is
    /// added.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d {
            return Err(DaisError::DimensionMismatch {
                expected: d,
                found: covariance.nrows(),
            });
        }
        if covariance.ncols() != d {
            return Err(DaisError::DimensionMismatch {
                expected: d,
                found: covariance.ncols(),
            });
        }
        let asymmetry = linalg::max_asymmetry(&covariance);
        if asymmetry > 1e-12 * linalg::max_abs(&covariance).max(f64::MIN_POSITIVE) {
            return Err(DaisError::NotSymmetric { asymmetry });
        }
        let chol = linalg::cholesky(&covariance)?;
        let log_det_half = chol.diagonal().iter().map(|v| v.ln()).sum();
        Ok(Self {
            mean,
            covariance,
            chol,
            log_det_half,
        })
    }

    pub fn standard(d: usize) -> Self {
        Self::new(DVector::zeros(d), DMatrix::identity(d, d)).expect("identity is PD")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// Precision matrix, formed from the Cholesky factor.
    pub fn precision(&self) -> DMatrix<f64> {
        linalg::cholesky_inverse(&self.chol)
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(DaisError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `mean + chol * z`.
    pub fn transform(&self, z: &[f64]) -> DVector<f64> {
        let d = self.dim();
        let mut x = self.mean.clone();
        let l = self.chol.as_slice();
        for (j, zj) in z.iter().enumerate().take(d) {
            let col = &l[j * d + j..(j + 1) * d];
            for (xi, lij) in x.as_mut_slice()[j..].iter_mut().zip(col) {
                *xi += lij * zj;
            }
        }
        x
    }

    /// One draw for sample index `index` of the stream keyed by `seed`.
    pub fn sample_one(&self, seed: u64, index: usize) -> DVector<f64> {
        let mut z = vec![0.0; self.dim()];
        NormalStream::new(seed, index as u64).fill_normal(&mut z);
        self.transform(&z)
    }

    /// `s_count × d` matrix of draws; row `s` depends only on `(seed, s)`.
    pub fn sample(&self, s_count: usize, seed: u64) -> DMatrix<f64> {
        let d = self.dim();
        let rows = par::map_indices(s_count, |s| self.sample_one(seed, s));
        DMatrix::from_fn(s_count, d, |s, j| rows[s][j])
    }

    /// Log-density via a triangular solve and the log-diagonal of the factor.
    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.log_density_unchecked(x))
    }

    pub(crate) fn log_density_unchecked(&self, x: &DVector<f64>) -> f64 {
        let mut r: Vec<f64> = x.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        linalg::forward_substitute(&self.chol, &mut r);
        let quad: f64 = r.iter().map(|v| v * v).sum();
        -0.5 * quad - self.log_det_half - self.dim() as f64 * HALF_LN_2PI
    }

    /// `-Γ⁻¹ (x - μ)` via two triangular solves.
    pub fn grad_log_density(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(self.grad_log_density_unchecked(x))
    }

    /// Log-density and gradient sharing one forward solve.
    pub(crate) fn log_density_and_grad_unchecked(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut r: Vec<f64> = x.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        linalg::forward_substitute(&self.chol, &mut r);
        let quad: f64 = r.iter().map(|v| v * v).sum();
        let value = -0.5 * quad - self.log_det_half - self.dim() as f64 * HALF_LN_2PI;
        linalg::back_substitute_transpose(&self.chol, &mut r);
        for v in r.iter_mut() {
            *v = -*v;
        }
        (value, DVector::from_vec(r))
    }

    pub(crate) fn grad_log_density_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut r: Vec<f64> = x.iter().zip(self.mean.iter()).map(|(a, b)| b - a).collect();
        linalg::cholesky_solve(&self.chol, &mut r);
        DVector::from_vec(r)
    }

    /// Exact mean/covariance of the damped density `proposal^(1-γ) target^γ`
    /// when both are Gaussian. Test oracle.
    pub fn damped(proposal: &GaussianParams, target: &GaussianParams, gamma: f64) -> Result<Self> {
        if proposal.dim() != target.dim() {
            return Err(DaisError::DimensionMismatch {
                expected: proposal.dim(),
                found: target.dim(),
            });
        }
        if gamma == 1.0 {
            return Ok(target.clone());
        }
        let p_prec = proposal.precision();
        let t_prec = target.precision();
        let blended = linalg::symmetrize(&(&p_prec * (1.0 - gamma) + &t_prec * gamma));
        let h = &p_prec * proposal.mean() * (1.0 - gamma) + &t_prec * target.mean() * gamma;
        let l = linalg::cholesky(&blended)?;
        let cov = linalg::cholesky_inverse(&l);
        let mut mean = h.as_slice().to_vec();
        linalg::cholesky_solve(&l, &mut mean);
        GaussianParams::new(DVector::from_vec(mean), cov)
    }

    /// Closed-form `KL(self ‖ other)`.
    pub fn kl_divergence(&self, other: &GaussianParams) -> f64 {
        let d = self.dim() as f64;
        let other_prec = other.precision();
        let trace = (&other_prec * &self.covariance).trace();
        let diff = other.mean() - self.mean();
        let quad = diff.dot(&(&other_prec * &diff));
        0.5 * (trace + quad - d) + other.log_det_half - self.log_det_half
    }
}

/// Free-function form of [`GaussianParams::damped`].
pub fn damped_gaussian_oracle(
    proposal: &GaussianParams,
    target: &GaussianParams,
    gamma: f64,
) -> Result<GaussianParams> {
    GaussianParams::damped(proposal, target, gamma)
}
