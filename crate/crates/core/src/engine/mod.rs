//! The adaptive importance sampling loop.
//!
//! Each iteration draws particles from the current Gaussian, picks the
//! largest damping `γ` whose tempered weights keep the ESS above threshold,
//! estimates the damped target's moments and steps the proposal by `c γ`.

mod batch;
mod damping;
mod estimators;
mod repair;
mod run;

pub use batch::{build_batch, ParticleBatch};
pub use damping::{
    ess_from_phi, ess_of_weights, normalized_weights, solve_damping, DampingSolution,
};
pub use estimators::{elbo_estimate, naive_moment_estimates, stein_moment_estimates};
pub use repair::{repair_covariance, RepairOutcome};
#[cfg(test)]
pub(crate) use run::adaptive_step;
pub(crate) use run::run_adaptive;
pub use run::{
    dais_step, run_dais, DaisConfig, DaisState, IterationRecord, MomentRule, RunReport, StopReason,
};
