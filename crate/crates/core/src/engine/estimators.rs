//! Self-normalized moment estimators for the damped target.

use nalgebra::{DMatrix, DVector};

use super::batch::ParticleBatch;
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;

fn check_weights(batch: &ParticleBatch, weights: &[f64]) -> Result<()> {
    if weights.len() != batch.len() {
        return Err(DaisError::DimensionMismatch {
            expected: batch.len(),
            found: weights.len(),
        });
    }
    Ok(())
}

fn weighted_column_means(m: &DMatrix<f64>, weights: &[f64]) -> DVector<f64> {
    DVector::from_fn(m.ncols(), |j, _| {
        m.column(j)
            .as_slice()
            .iter()
            .zip(weights)
            .map(|(v, w)| v * w)
            .sum()
    })
}

/// `Σ_s w_s (a_s − ā)(b_s − b̄)ᵀ` over the rows of `a` and `b`.
fn weighted_cross(
    a: &DMatrix<f64>,
    a_mean: &DVector<f64>,
    b: &DMatrix<f64>,
    b_mean: &DVector<f64>,
    weights: &[f64],
) -> DMatrix<f64> {
    let mut wa = a.clone();
    for (j, mut col) in wa.column_iter_mut().enumerate() {
        for (v, w) in col.iter_mut().zip(weights) {
            *v = (*v - a_mean[j]) * w;
        }
    }
    let mut bc = b.clone();
    for (j, mut col) in bc.column_iter_mut().enumerate() {
        for v in col.iter_mut() {
            *v -= b_mean[j];
        }
    }
    wa.tr_mul(&bc)
}

/// Stein-identity estimates of the perturbations `G_μ` and `G_Γ`, so that
/// `μ + γ G_μ` and `Γ + γ G_Γ` estimate the damped target's moments.
///
/// `G_Γ` is symmetrized as `(M + Mᵀ)/2`.
pub fn stein_moment_estimates(
    batch: &ParticleBatch,
    proposal: &GaussianParams,
    weights: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_weights(batch, weights)?;
    if proposal.dim() != batch.dim() {
        return Err(DaisError::DimensionMismatch {
            expected: batch.dim(),
            found: proposal.dim(),
        });
    }
    let gamma = proposal.covariance();
    let g_bar = weighted_column_means(&batch.grad_phi, weights);
    let x_bar = weighted_column_means(&batch.samples, weights);
    let g_mu = gamma * &g_bar;
    let cross = weighted_cross(&batch.grad_phi, &g_bar, &batch.samples, &x_bar, weights);
    let m = gamma * cross;
    let g_gamma = (&m + m.transpose()) * 0.5;
    Ok((g_mu, g_gamma))
}

/// Plain self-normalized mean and covariance of the particles.
pub fn naive_moment_estimates(
    batch: &ParticleBatch,
    weights: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_weights(batch, weights)?;
    let mean = weighted_column_means(&batch.samples, weights);
    let cov = weighted_cross(&batch.samples, &mean, &batch.samples, &mean, weights);
    Ok((mean, crate::linalg::symmetrize(&cov)))
}

/// `(1/S) Σ Φ(x_s)` with `x_s` drawn from the proposal.
pub fn elbo_estimate(batch: &ParticleBatch) -> f64 {
    batch.phi.iter().sum::<f64>() / batch.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::batch::build_batch;
    use crate::engine::damping::normalized_weights;
    use crate::targets::{correlated_gaussian_target, GaussianTarget, Offset};

    fn some_proposal() -> GaussianParams {
        GaussianParams::new(
            DVector::from_vec(vec![0.5, -1.0]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn zero_drift_when_target_is_proposal() {
        let q = some_proposal();
        let t = GaussianTarget::new(q.clone());
        let b = build_batch(&q, &t, 500, 3).unwrap();
        let w = normalized_weights(b.phi.as_slice(), 0.7);
        let (g_mu, g_gamma) = stein_moment_estimates(&b, &q, &w).unwrap();
        assert_eq!(g_mu, DVector::zeros(2));
        assert_eq!(g_gamma, DMatrix::zeros(2, 2));
    }

    #[test]
    fn stein_covariance_is_exactly_symmetric() {
        let t = correlated_gaussian_target(4, 1.0, 0.5, 0.5).unwrap();
        let q = GaussianParams::standard(4);
        let b = build_batch(&q, &t, 300, 4).unwrap();
        let w = normalized_weights(b.phi.as_slice(), 0.4);
        let (_, g) = stein_moment_estimates(&b, &q, &w).unwrap();
        assert_eq!(g, g.transpose());
    }

    #[test]
    fn naive_uniform_weights_give_sample_moments() {
        let q = some_proposal();
        let t = GaussianTarget::new(q.clone());
        let b = build_batch(&q, &t, 50, 8).unwrap();
        let w = vec![1.0 / 50.0; 50];
        let (mean, cov) = naive_moment_estimates(&b, &w).unwrap();
        let direct_mean = b.samples.row_mean().transpose();
        assert!((&mean - &direct_mean).amax() < 1e-12);
        let mut direct = DMatrix::zeros(2, 2);
        for s in 0..50 {
            let r = b.samples.row(s).transpose() - &direct_mean;
            direct += &r * r.transpose();
        }
        direct /= 50.0;
        assert!((cov - direct).amax() < 1e-12);
    }

    #[test]
    fn naive_degenerate_weights() {
        let q = some_proposal();
        let t = GaussianTarget::new(q.clone());
        let b = build_batch(&q, &t, 10, 8).unwrap();
        let mut w = vec![0.0; 10];
        w[0] = 1.0;
        let (mean, cov) = naive_moment_estimates(&b, &w).unwrap();
        assert_eq!(mean, b.samples.row(0).transpose());
        assert_eq!(cov, DMatrix::zeros(2, 2));
    }

    #[test]
    fn weight_length_checked() {
        let q = some_proposal();
        let t = GaussianTarget::new(q.clone());
        let b = build_batch(&q, &t, 10, 8).unwrap();
        assert!(naive_moment_estimates(&b, &[1.0]).is_err());
        assert!(stein_moment_estimates(&b, &q, &[1.0]).is_err());
    }

    #[test]
    fn elbo_exact_cases() {
        let q = some_proposal();
        let b = build_batch(&q, &GaussianTarget::new(q.clone()), 100, 2).unwrap();
        assert_eq!(elbo_estimate(&b), 0.0);
        let shifted = Offset {
            inner: GaussianTarget::new(q.clone()),
            offset: 1.5,
        };
        let b = build_batch(&q, &shifted, 100, 2).unwrap();
        assert!((elbo_estimate(&b) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn elbo_matches_negative_kl() {
        let pi = GaussianParams::new(
            DVector::from_vec(vec![1.0, 0.5]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
        )
        .unwrap();
        let q = GaussianParams::standard(2);
        let b = build_batch(&q, &GaussianTarget::new(pi.clone()), 100_000, 6).unwrap();
        let est = elbo_estimate(&b);
        let n = b.len() as f64;
        let var = b.phi.iter().map(|p| (p - est).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let exact = -q.kl_divergence(&pi);
        assert!((est - exact).abs() < 3.0 * se, "{est} vs {exact} (se {se})");
    }
}
