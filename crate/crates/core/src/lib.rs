//! Doubly adaptive importance sampling.
//!
//! Fits a Gaussian to an unnormalized density by repeatedly sampling from the
//! current Gaussian, tempering the importance weights until their effective
//! sample size is acceptable, and moving the Gaussian toward the moments of
//! the tempered target using gradient-based (Stein) estimates.
//!
//! ```
//! use dais_core::{run_dais, mixture_target, DaisConfig, GaussianParams};
//!
//! let config = DaisConfig { s_count: 2_000, n_ess: 200.0, max_iters: 5, ..DaisConfig::default() };
//! let report = run_dais(&GaussianParams::standard(2), &mixture_target(), &config).unwrap();
//! assert_eq!(report.records.len(), 5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
#[cfg(feature = "cli")]
pub mod cli;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod par;
pub mod rng;
pub mod targets;

pub use baselines::{ngvi_step, run_ngvi, run_plain_ais, NgviConfig};
pub use engine::{
    build_batch, dais_step, elbo_estimate, ess_from_phi, naive_moment_estimates, repair_covariance,
    run_dais, solve_damping, stein_moment_estimates, DaisConfig, DaisState, DampingSolution,
    IterationRecord, ParticleBatch, RunReport, StopReason,
};
pub use error::{DaisError, Result};
pub use gaussian::{damped_gaussian_oracle, GaussianParams};
pub use targets::{
    banana_target, correlated_gaussian_target, laplace_init, load_logistic_csv, logistic_target,
    mixture_target, sine_2d_target, synthetic_logistic_data, LogisticRegressionData, TargetModel,
};
