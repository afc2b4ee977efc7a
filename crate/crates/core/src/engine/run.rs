use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::batch::build_batch;
use super::damping::solve_damping;
use super::estimators::{elbo_estimate, naive_moment_estimates, stein_moment_estimates};
use super::repair::repair_covariance;
use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::rng::iteration_seed;
use crate::targets::TargetModel;

/// Tuning parameters of the adaptive loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DaisConfig {
    /// Particles per iteration.
    pub s_count: usize,
    /// ESS threshold, strictly between 1 and `s_count`.
    pub n_ess: f64,
    /// Step multiplier `c` in `ζ = c γ`.
    pub robustness_c: f64,
    pub seed: u64,
    pub max_iters: usize,
    pub elbo_patience: usize,
    pub elbo_rel_tol: f64,
    pub gamma_min: f64,
    pub bisection_tol: f64,
    pub pd_max_halvings: usize,
    /// Eigenvalue floor relative to the mean diagonal of the current covariance.
    pub eigen_floor: f64,
}

impl Default for DaisConfig {
    fn default() -> Self {
        Self {
            s_count: 100_000,
            n_ess: 1_000.0,
            robustness_c: 0.5,
            seed: 0,
            max_iters: 200,
            elbo_patience: 5,
            elbo_rel_tol: 1e-3,
            gamma_min: 1e-6,
            bisection_tol: 1e-6,
            pd_max_halvings: 10,
            eigen_floor: 1e-8,
        }
    }
}

impl DaisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DaisError::InvalidConfig(msg));
        if !(self.n_ess > 1.0 && self.n_ess < self.s_count as f64) {
            return bad(format!(
                "n_ess = {} must satisfy 1 < n_ess < s_count = {}",
                self.n_ess, self.s_count
            ));
        }
        if !(self.robustness_c > 0.0 && self.robustness_c <= 1.0) {
            return bad(format!(
                "robustness_c = {} must be in (0, 1]",
                self.robustness_c
            ));
        }
        if !(self.gamma_min > 0.0 && self.gamma_min <= 1.0) {
            return bad(format!("gamma_min = {} must be in (0, 1]", self.gamma_min));
        }
        if !(self.bisection_tol > 0.0) {
            return bad("bisection_tol must be positive".into());
        }
        if !(self.elbo_rel_tol >= 0.0) {
            return bad("elbo_rel_tol must be non-negative".into());
        }
        if !(self.eigen_floor > 0.0) {
            return bad("eigen_floor must be positive".into());
        }
        Ok(())
    }
}

/// One iteration of the trace. `elbo` is measured at the proposal the
/// particles came from; `mean`/`covariance` are the updated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub gamma: f64,
    pub effective_gamma: f64,
    pub ess: f64,
    pub elbo: f64,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub pd_repairs: usize,
    pub at_lower_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ElboPlateau,
    MaxIters,
    GradTol,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ElboPlateau => "ElboPlateau",
            StopReason::MaxIters => "MaxIters",
            StopReason::GradTol => "GradTol",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<IterationRecord>,
    pub final_params: GaussianParams,
    pub stopped_reason: StopReason,
}

/// How the damped moments are estimated from the weighted particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRule {
    /// Gradient-based perturbation estimates.
    Stein,
    /// Self-normalized moments of the particles themselves.
    Naive,
}

/// Current proposal and iteration index.
#[derive(Debug, Clone)]
pub struct DaisState {
    pub proposal: GaussianParams,
    pub t: usize,
}

/// One iteration with the gradient-based estimates.
pub fn dais_step<T: TargetModel + ?Sized>(
    state: &DaisState,
    target: &T,
    config: &DaisConfig,
    seed_t: u64,
) -> Result<(GaussianParams, IterationRecord)> {
    adaptive_step(state, target, config, seed_t, MomentRule::Stein)
}

pub(crate) fn adaptive_step<T: TargetModel + ?Sized>(
    state: &DaisState,
    target: &T,
    config: &DaisConfig,
    seed_t: u64,
    rule: MomentRule,
) -> Result<(GaussianParams, IterationRecord)> {
    let proposal = &state.proposal;
    let batch = build_batch(proposal, target, config.s_count, seed_t)?;
    let elbo = elbo_estimate(&batch);
    let damping = solve_damping(
        batch.phi.as_slice(),
        config.n_ess,
        config.gamma_min,
        config.bisection_tol,
    )?;
    let gamma = damping.gamma;
    let weights = &damping.normalized_weights;

    // Both rules are expressed as perturbations: new = old + c γ G.
    let (g_mu, g_gamma) = match rule {
        MomentRule::Stein => stein_moment_estimates(&batch, proposal, weights)?,
        MomentRule::Naive => {
            let (mean_hat, cov_hat) = naive_moment_estimates(&batch, weights)?;
            (
                (mean_hat - proposal.mean()) / gamma,
                (cov_hat - proposal.covariance()) / gamma,
            )
        }
    };

    let c = config.robustness_c;
    let base = proposal.covariance();
    let candidate = base + &g_gamma * (c * gamma);
    let repaired = repair_covariance(
        candidate,
        gamma,
        &g_gamma,
        base,
        c,
        config.pd_max_halvings,
        config.eigen_floor,
    );
    let mean = proposal.mean() + &g_mu * (c * repaired.effective_gamma);
    let next = GaussianParams::new(mean, repaired.covariance)?;
    let record = IterationRecord {
        t: state.t,
        gamma,
        effective_gamma: repaired.effective_gamma,
        ess: damping.ess,
        elbo,
        mean: next.mean().clone(),
        covariance: next.covariance().clone(),
        pd_repairs: repaired.repairs,
        at_lower_bound: damping.at_lower_bound,
    };
    Ok((next, record))
}

/// Tracks the running ELBO maximum and counts non-improving iterations.
#[derive(Debug, Clone)]
pub(crate) struct PlateauMonitor {
    best: f64,
    stale: usize,
    rel_tol: f64,
    patience: usize,
}

impl PlateauMonitor {
    pub fn new(rel_tol: f64, patience: usize) -> Self {
        Self {
            best: f64::NEG_INFINITY,
            stale: 0,
            rel_tol,
            patience,
        }
    }

    /// Returns true once the plateau condition holds.
    pub fn observe(&mut self, elbo: f64) -> bool {
        let improved = if self.best == f64::NEG_INFINITY {
            true
        } else {
            elbo > self.best + self.rel_tol * self.best.abs().max(1.0)
        };
        self.best = self.best.max(elbo);
        if improved {
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.stale >= self.patience
    }
}

/// Iterates until the ELBO plateaus or `max_iters` is reached and returns
/// the final proposal along with the whole trajectory.
pub fn run_dais<T: TargetModel + ?Sized>(
    initial: &GaussianParams,
    target: &T,
    config: &DaisConfig,
) -> Result<RunReport> {
    run_adaptive(initial, target, config, MomentRule::Stein)
}

pub(crate) fn run_adaptive<T: TargetModel + ?Sized>(
    initial: &GaussianParams,
    target: &T,
    config: &DaisConfig,
    rule: MomentRule,
) -> Result<RunReport> {
    config.validate()?;
    if initial.dim() != target.dim() {
        return Err(DaisError::DimensionMismatch {
            expected: target.dim(),
            found: initial.dim(),
        });
    }
    let mut state = DaisState {
        proposal: initial.clone(),
        t: 1,
    };
    let mut records = Vec::new();
    let mut monitor = PlateauMonitor::new(config.elbo_rel_tol, config.elbo_patience);
    let mut stopped_reason = StopReason::MaxIters;
    while state.t <= config.max_iters {
        let seed_t = iteration_seed(config.seed, state.t as u64);
        let (next, record) = adaptive_step(&state, target, config, seed_t, rule)?;
        let plateau = monitor.observe(record.elbo);
        records.push(record);
        state = DaisState {
            proposal: next,
            t: state.t + 1,
        };
        if plateau {
            stopped_reason = StopReason::ElboPlateau;
            break;
        }
    }
    Ok(RunReport {
        records,
        final_params: state.proposal,
        stopped_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{correlated_gaussian_target, mixture_target, GaussianTarget};

    #[test]
    fn config_validation() {
        let mut c = DaisConfig::default();
        assert!(c.validate().is_ok());
        c.n_ess = 1.5 * c.s_count as f64;
        assert!(c.validate().is_err());
        let c = DaisConfig {
            robustness_c: 0.0,
            ..DaisConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let c: DaisConfig = serde_json::from_str(r#"{"s_count": 500, "n_ess": 50}"#).unwrap();
        assert_eq!(c.s_count, 500);
        assert_eq!(c.robustness_c, 0.5);
        assert!(serde_json::from_str::<DaisConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn fixed_point_when_target_is_proposal() {
        let q = GaussianParams::new(
            DVector::from_vec(vec![1.0, -0.5, 0.0]),
            DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 2.0, 0.1, 0.0, 0.1, 0.5]),
        )
        .unwrap();
        let t = GaussianTarget::new(q.clone());
        let config = DaisConfig {
            s_count: 2_000,
            n_ess: 100.0,
            ..DaisConfig::default()
        };
        let state = DaisState {
            proposal: q.clone(),
            t: 1,
        };
        let (next, rec) = dais_step(&state, &t, &config, 5).unwrap();
        assert_eq!(rec.gamma, 1.0);
        assert!((next.mean() - q.mean()).amax() < 1e-10);
        assert!((next.covariance() - q.covariance()).amax() < 1e-10);
    }

    #[test]
    fn one_step_moves_toward_target_mean() {
        let t = correlated_gaussian_target(10, 1.0, 0.9, 0.1).unwrap();
        let config = DaisConfig {
            s_count: 10_000,
            n_ess: 100.0,
            robustness_c: 1.0,
            ..DaisConfig::default()
        };
        let state = DaisState {
            proposal: GaussianParams::standard(10),
            t: 1,
        };
        // the per-coordinate step is smaller than its MC noise; the average is not
        for seed in 0..5 {
            let (next, _) = dais_step(&state, &t, &config, iteration_seed(seed, 1)).unwrap();
            let m = next.mean();
            assert!(m.mean() > 0.0, "{m}");
            assert!(m.iter().all(|v| *v < 1.2), "{m}");
        }
    }

    #[test]
    fn plateau_after_patience_plus_one() {
        let q = GaussianParams::standard(2);
        let t = GaussianTarget::new(q.clone());
        let config = DaisConfig {
            s_count: 1_000,
            n_ess: 100.0,
            ..DaisConfig::default()
        };
        let report = run_dais(&q, &t, &config).unwrap();
        assert_eq!(report.stopped_reason, StopReason::ElboPlateau);
        assert_eq!(report.records.len(), config.elbo_patience + 1);
    }

    #[test]
    fn single_iteration_budget() {
        let t = mixture_target();
        let config = DaisConfig {
            s_count: 1_000,
            n_ess: 100.0,
            max_iters: 1,
            ..DaisConfig::default()
        };
        let report = run_dais(&GaussianParams::standard(2), &t, &config).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.stopped_reason, StopReason::MaxIters);
    }

    #[test]
    fn invalid_config_rejected_by_run() {
        let t = mixture_target();
        let config = DaisConfig {
            s_count: 10,
            n_ess: 20.0,
            ..DaisConfig::default()
        };
        assert!(run_dais(&GaussianParams::standard(2), &t, &config).is_err());
    }

    #[test]
    fn mixture_gamma_stays_at_one() {
        let t = mixture_target();
        let config = DaisConfig {
            max_iters: 30,
            elbo_patience: 1000,
            ..DaisConfig::default()
        };
        let report = run_dais(&GaussianParams::standard(2), &t, &config).unwrap();
        let first = report
            .records
            .iter()
            .position(|r| r.gamma == 1.0)
            .expect("gamma reaches one");
        let after = &report.records[first + 1..];
        let at_one = after.iter().filter(|r| r.gamma == 1.0).count();
        assert!(at_one as f64 >= 0.9 * after.len() as f64);
    }

    #[test]
    fn records_carry_pd_covariances() {
        let t = correlated_gaussian_target(4, 1.0, 0.9, 0.1).unwrap();
        let config = DaisConfig {
            s_count: 2_000,
            n_ess: 200.0,
            max_iters: 10,
            ..DaisConfig::default()
        };
        let report = run_dais(&GaussianParams::standard(4), &t, &config).unwrap();
        for r in &report.records {
            assert!(crate::linalg::cholesky(&r.covariance).is_ok());
            assert_eq!(r.covariance, r.covariance.transpose());
        }
    }
}
