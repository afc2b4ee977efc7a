use nalgebra::{DMatrix, DVector};

use super::TargetModel;
use crate::error::{DaisError, Result};
use crate::rng::{mix64, NormalStream};

/// Variance of the isotropic Gaussian prior on the coefficients.
pub const PRIOR_VARIANCE: f64 = 10.0;

/// Binary responses in {−1, +1} with an `n × d` design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegressionData {
    pub labels: DVector<f64>,
    pub features: DMatrix<f64>,
    pub prior_variance: f64,
}

impl LogisticRegressionData {
    pub fn new(labels: DVector<f64>, features: DMatrix<f64>) -> Result<Self> {
        let data = Self {
            labels,
            features,
            prior_variance: PRIOR_VARIANCE,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.features.nrows();
        if n == 0 || self.features.ncols() == 0 {
            return Err(DaisError::InvalidConfig(
                "logistic data needs n ≥ 1 and d ≥ 1".into(),
            ));
        }
        if self.labels.len() != n {
            return Err(DaisError::DimensionMismatch {
                expected: n,
                found: self.labels.len(),
            });
        }
        if let Some((row, v)) = self
            .labels
            .iter()
            .enumerate()
            .find(|(_, v)| **v != 1.0 && **v != -1.0)
        {
            return Err(DaisError::Label { row, value: *v });
        }
        if self.features.iter().any(|v| !v.is_finite()) {
            return Err(DaisError::InvalidConfig(
                "features contain non-finite values".into(),
            ));
        }
        if !(self.prior_variance > 0.0) {
            return Err(DaisError::InvalidConfig(
                "prior variance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }
}

/// Synthetic data: coefficients and features i.i.d. standard normal, labels
/// drawn from the logistic model.
pub fn synthetic_logistic_data(n: usize, d: usize, seed: u64) -> Result<LogisticRegressionData> {
    let mut coef_stream = NormalStream::new(mix64(seed), 0);
    let coefficients = DVector::from_fn(d, |_, _| coef_stream.next_normal());
    let mut feature_stream = NormalStream::new(mix64(seed), 1);
    let mut features = DMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            features[(i, j)] = feature_stream.next_normal();
        }
    }
    let mut label_stream = NormalStream::new(mix64(seed), 2);
    let eta = &features * &coefficients;
    let labels = eta.map(|e| {
        if label_stream.uniform() <= sigmoid(e) {
            1.0
        } else {
            -1.0
        }
    });
    LogisticRegressionData::new(labels, features)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log σ(z)` without overflow for large `|z|`.
pub fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Posterior of Bayesian logistic regression with a `N(0, 10 I)` prior.
#[derive(Debug, Clone)]
pub struct LogisticTarget {
    data: LogisticRegressionData,
}

pub fn logistic_target(data: LogisticRegressionData) -> LogisticTarget {
    LogisticTarget { data }
}

impl LogisticTarget {
    pub fn data(&self) -> &LogisticRegressionData {
        &self.data
    }
}

impl TargetModel for LogisticTarget {
    fn dim(&self) -> usize {
        self.data.d()
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        let z = &self.data.features * x;
        let ll: f64 = z
            .iter()
            .zip(self.data.labels.iter())
            .map(|(zi, yi)| log_sigmoid(yi * zi))
            .sum();
        ll - x.norm_squared() / (2.0 * self.data.prior_variance)
    }

    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64> {
        self.log_density_and_grad(x).1
    }

    fn log_density_and_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let z = &self.data.features * x;
        let mut ll = 0.0;
        let coef = DVector::from_fn(z.len(), |i, _| {
            let yz = self.data.labels[i] * z[i];
            ll += log_sigmoid(yz);
            self.data.labels[i] * sigmoid(-yz)
        });
        let g = self.data.features.tr_mul(&coef) - x / self.data.prior_variance;
        (ll - x.norm_squared() / (2.0 * self.data.prior_variance), g)
    }

    fn hessian_log_density(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let z = &self.data.features * x;
        let d = self.dim();
        let mut weighted = self.data.features.clone();
        for (i, zi) in z.iter().enumerate() {
            let s = sigmoid(*zi);
            let w = s * (1.0 - s);
            weighted.row_mut(i).scale_mut(w);
        }
        let h = -(self.data.features.tr_mul(&weighted))
            - DMatrix::<f64>::identity(d, d) / self.data.prior_variance;
        Some(crate::linalg::symmetrize(&h))
    }
}
