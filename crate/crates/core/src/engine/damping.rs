//! Effective sample size of tempered weights and the damping solve.

use crate::error::{DaisError, Result};

/// Adaptive damping result for one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingSolution {
    pub gamma: f64,
    pub normalized_weights: Vec<f64>,
    pub ess: f64,
    /// `γ = 1` already met the ESS threshold.
    pub at_upper_bound: bool,
    /// The threshold was not met even at `gamma_min`.
    pub at_lower_bound: bool,
}

fn scaled_weights(phi: &[f64], gamma: f64) -> Vec<f64> {
    let max = phi
        .iter()
        .map(|p| gamma * p)
        .fold(f64::NEG_INFINITY, f64::max);
    phi.iter().map(|p| (gamma * p - max).exp()).collect()
}

/// `(Σ w)² / Σ w²` with `w_s = exp(γ Φ_s)`, computed after subtracting the
/// largest exponent.
pub fn ess_from_phi(phi: &[f64], gamma: f64) -> f64 {
    let v = scaled_weights(phi, gamma);
    let sum: f64 = v.iter().sum();
    let sum_sq: f64 = v.iter().map(|x| x * x).sum();
    sum * sum / sum_sq
}

/// Self-normalized weights `exp(γ Φ_s) / Σ exp(γ Φ)`.
pub fn normalized_weights(phi: &[f64], gamma: f64) -> Vec<f64> {
    let mut v = scaled_weights(phi, gamma);
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    v
}

/// ESS of already-normalized weights, `1 / Σ ŵ²`.
pub fn ess_of_weights(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Largest `γ ∈ [gamma_min, 1]` whose ESS is at least `n_ess`.
///
/// Bisection stops once the bracket is narrower than `bisection_tol` and
/// returns its lower end, where the threshold is known to hold.
pub fn solve_damping(
    phi: &[f64],
    n_ess: f64,
    gamma_min: f64,
    bisection_tol: f64,
) -> Result<DampingSolution> {
    let s = phi.len() as f64;
    if !(n_ess > 1.0 && n_ess < s) {
        return Err(DaisError::InvalidConfig(format!(
            "ESS threshold {n_ess} must lie strictly between 1 and the sample size {s}"
        )));
    }
    if !(gamma_min > 0.0 && gamma_min <= 1.0) || !(bisection_tol > 0.0) {
        return Err(DaisError::InvalidConfig(
            "gamma_min must be in (0, 1] and bisection_tol positive".into(),
        ));
    }

    let solution = |gamma: f64, at_upper_bound: bool, at_lower_bound: bool| {
        let normalized_weights = normalized_weights(phi, gamma);
        DampingSolution {
            gamma,
            ess: ess_of_weights(&normalized_weights),
            normalized_weights,
            at_upper_bound,
            at_lower_bound,
        }
    };

    if ess_from_phi(phi, 1.0) >= n_ess {
        return Ok(solution(1.0, true, false));
    }
    if ess_from_phi(phi, gamma_min) < n_ess {
        return Ok(solution(gamma_min, false, true));
    }
    let (mut lo, mut hi) = (gamma_min, 1.0);
    while hi - lo >= bisection_tol {
        let mid = 0.5 * (lo + hi);
        if ess_from_phi(phi, mid) >= n_ess {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(solution(lo, false, false))
}
