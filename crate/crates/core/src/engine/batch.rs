use nalgebra::{DMatrix, DVector};

use crate::error::{DaisError, Result};
use crate::gaussian::GaussianParams;
use crate::par;
use crate::targets::TargetModel;

/// Samples from the proposal together with every density quantity the
/// update needs. `phi = target_logpdf − proposal_logpdf` and
/// `grad_phi = ∇log π̄ − ∇log q`, both computed once at construction.
#[derive(Debug, Clone)]
pub struct ParticleBatch {
    /// `S × d`, one draw per row.
    pub samples: DMatrix<f64>,
    pub proposal_logpdf: DVector<f64>,
    pub target_logpdf: DVector<f64>,
    pub phi: DVector<f64>,
    /// `S × d`, row `s` is `∇Φ(x_s)`.
    pub grad_phi: DMatrix<f64>,
}

impl ParticleBatch {
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }
}

struct Particle {
    x: DVector<f64>,
    log_q: f64,
    log_p: f64,
    grad_phi: DVector<f64>,
}

/// Draws `s_count` particles from `proposal` and evaluates the target on
/// each. Particle `s` depends only on `(seed, s)`.
pub fn build_batch<T: TargetModel + ?Sized>(
    proposal: &GaussianParams,
    target: &T,
    s_count: usize,
    seed: u64,
) -> Result<ParticleBatch> {
    let d = proposal.dim();
    if target.dim() != d {
        return Err(DaisError::DimensionMismatch {
            expected: d,
            found: target.dim(),
        });
    }
    let particles = par::map_indices(s_count, |s| {
        let x = proposal.sample_one(seed, s);
        let (log_q, grad_q) = proposal.log_density_and_grad_unchecked(&x);
        let (log_p, grad_p) = target.log_density_and_grad(&x);
        // ∇Φ = ∇log π̄ + Γ⁻¹(x − μ)
        let grad_phi = grad_p - grad_q;
        Particle {
            x,
            log_q,
            log_p,
            grad_phi,
        }
    });

    let mut samples = DMatrix::zeros(s_count, d);
    let mut grad_phi = DMatrix::zeros(s_count, d);
    let mut proposal_logpdf = DVector::zeros(s_count);
    let mut target_logpdf = DVector::zeros(s_count);
    for (s, p) in particles.iter().enumerate() {
        let finite =
            p.log_p.is_finite() && p.log_q.is_finite() && p.grad_phi.iter().all(|v| v.is_finite());
        if !finite {
            return Err(DaisError::NonFiniteDensity { index: s });
        }
        proposal_logpdf[s] = p.log_q;
        target_logpdf[s] = p.log_p;
        for j in 0..d {
            samples[(s, j)] = p.x[j];
            grad_phi[(s, j)] = p.grad_phi[j];
        }
    }
    let phi = &target_logpdf - &proposal_logpdf;
    Ok(ParticleBatch {
        samples,
        proposal_logpdf,
        target_logpdf,
        phi,
        grad_phi,
    })
}
