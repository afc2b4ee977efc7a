//! Positive-definiteness repair of the covariance update.

use nalgebra::DMatrix;

use crate::linalg;

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub covariance: DMatrix<f64>,
    /// Halvings performed, plus one if the eigenvalue clamp was needed.
    pub repairs: usize,
    /// The damping actually applied; the caller uses it for the mean step too.
    pub effective_gamma: f64,
}

/// Makes `candidate = base + c γ G_Γ` positive-definite.
///
/// First halves `γ` up to `max_halvings` times, reusing the same `G_Γ`
/// (no new target evaluations). If that still fails, the eigenvalues of the
/// last candidate are raised to `eigen_floor_scale × mean(diag(base))`.
pub fn repair_covariance(
    candidate: DMatrix<f64>,
    gamma: f64,
    g_gamma_hat: &DMatrix<f64>,
    base: &DMatrix<f64>,
    robustness_c: f64,
    max_halvings: usize,
    eigen_floor_scale: f64,
) -> RepairOutcome {
    if linalg::cholesky(&candidate).is_ok() {
        return RepairOutcome {
            covariance: candidate,
            repairs: 0,
            effective_gamma: gamma,
        };
    }
    let mut effective_gamma = gamma;
    let mut current = candidate;
    for k in 1..=max_halvings {
        effective_gamma *= 0.5;
        current = base + g_gamma_hat * (robustness_c * effective_gamma);
        if linalg::cholesky(&current).is_ok() {
            return RepairOutcome {
                covariance: current,
                repairs: k,
                effective_gamma,
            };
        }
    }
    let d = base.nrows().max(1) as f64;
    let mut floor = eigen_floor_scale * base.trace() / d;
    if !(floor > 0.0) {
        floor = f64::MIN_POSITIVE;
    }
    let mut clamped = linalg::clamp_eigenvalues(&current, floor);
    while linalg::cholesky(&clamped).is_err() {
        floor *= 10.0;
        clamped = linalg::clamp_eigenvalues(&current, floor);
    }
    RepairOutcome {
        covariance: clamped,
        repairs: max_halvings + 1,
        effective_gamma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pd_candidate_untouched() {
        let base = DMatrix::identity(2, 2);
        let g = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.2]);
        let cand = &base + &g * 0.5;
        let out = repair_covariance(cand.clone(), 1.0, &g, &base, 0.5, 10, 1e-8);
        assert_eq!(out.covariance, cand);
        assert_eq!(out.repairs, 0);
        assert_eq!(out.effective_gamma, 1.0);
    }

    #[test]
    fn halving_sequence() {
        let base = DMatrix::identity(2, 2);
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.0]));
        let cand = &base + &g;
        let out = repair_covariance(cand, 1.0, &g, &base, 1.0, 10, 1e-8);
        assert_eq!(out.repairs, 2);
        assert_eq!(out.effective_gamma, 0.25);
        assert_eq!(
            out.covariance,
            DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 1.0])
        );
    }

    #[test]
    fn singular_candidate_needs_one_halving() {
        // G = −base/(cγ) makes the candidate exactly zero; one halving gives base/2
        let base = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (c, gamma) = (0.5, 0.8);
        let g = -&base / (c * gamma);
        let cand = &base + &g * (c * gamma);
        let out = repair_covariance(cand, gamma, &g, &base, c, 10, 1e-8);
        assert_eq!(out.repairs, 1);
        assert!((out.covariance - &base * 0.5).amax() < 1e-15);
    }

    #[test]
    fn clamp_when_halvings_exhausted() {
        let base = DMatrix::identity(2, 2);
        let (c, gamma) = (1.0, 1.0);
        let g = -&base * 2000.0;
        let cand = &base + &g;
        let out = repair_covariance(cand, gamma, &g, &base, c, 10, 1e-8);
        assert_eq!(out.repairs, 11);
        assert_eq!(out.effective_gamma, 1.0 / 1024.0);
        let floor = 1e-8;
        assert!((out.covariance.clone() - DMatrix::identity(2, 2) * floor).amax() < 1e-15);
        assert!(linalg::cholesky(&out.covariance).is_ok());
    }
}
