//! Browser bindings for the two-dimensional demo targets.
//!
//! Every export returns a flat `Float64Array`; row layouts are documented on
//! each function. The `*_impl` functions hold the logic so they can be tested
//! natively.

use dais_core::experiments::{rmse_sweep, RmseConfig};
use dais_core::{
    banana_target, build_batch, ess_from_phi, mixture_target, run_dais, sine_2d_target,
    solve_damping, DaisConfig, GaussianParams, TargetModel,
};
use nalgebra::{DMatrix, DVector};
use wasm_bindgen::prelude::*;

fn target_by_name(name: &str) -> Result<Box<dyn TargetModel>, String> {
    match name {
        "banana" => Ok(Box::new(banana_target())),
        "mixture" => Ok(Box::new(mixture_target())),
        "sine" => Ok(Box::new(sine_2d_target(0.1))),
        other => Err(format!("unknown target '{other}'")),
    }
}

fn isotropic(mx: f64, my: f64, var: f64) -> Result<GaussianParams, String> {
    GaussianParams::new(
        DVector::from_vec(vec![mx, my]),
        DMatrix::from_diagonal_element(2, 2, var),
    )
    .map_err(|e| e.to_string())
}

/// Row per grid point, x fastest: `log π̄(x, y)`.
pub fn log_density_grid_impl(
    target: &str,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, String> {
    if nx < 2 || ny < 2 {
        return Err("grid needs at least 2 points per axis".into());
    }
    let t = target_by_name(target)?;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y_range.0 + (y_range.1 - y_range.0) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (nx - 1) as f64;
            out.push(t.log_density(&DVector::from_vec(vec![x, y])));
        }
    }
    Ok(out)
}

/// Nine values per iteration:
/// `t, gamma, ess, elbo, mu_x, mu_y, cov_xx, cov_xy, cov_yy`.
pub fn dais_trace_impl(
    target: &str,
    s_count: usize,
    n_ess: f64,
    c: f64,
    iters: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let t = target_by_name(target)?;
    let config = DaisConfig {
        s_count,
        n_ess,
        robustness_c: c,
        seed,
        max_iters: iters,
        elbo_patience: usize::MAX,
        ..DaisConfig::default()
    };
    let report =
        run_dais(&GaussianParams::standard(2), t.as_ref(), &config).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(9 * report.records.len());
    for r in &report.records {
        let cov = &r.covariance;
        out.extend_from_slice(&[
            r.t as f64,
            r.gamma,
            r.ess,
            r.elbo,
            r.mean[0],
            r.mean[1],
            cov[(0, 0)],
            cov[(0, 1)],
            cov[(1, 1)],
        ]);
    }
    Ok(out)
}

/// `[gamma_star, ess_star, gamma_0, ess_0, gamma_1, ess_1, ...]` on a log grid
/// from `1e-4` to `1`, for proposal `N((mx, my), var I)`.
pub fn ess_curve_impl(
    target: &str,
    proposal: (f64, f64, f64),
    s_count: usize,
    n_ess: f64,
    points: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    if points < 2 {
        return Err("curve needs at least 2 points".into());
    }
    let t = target_by_name(target)?;
    let q = isotropic(proposal.0, proposal.1, proposal.2)?;
    let batch = build_batch(&q, t.as_ref(), s_count, seed).map_err(|e| e.to_string())?;
    let phi = batch.phi.as_slice();
    let sol = solve_damping(phi, n_ess, 1e-6, 1e-6).map_err(|e| e.to_string())?;
    let mut out = vec![sol.gamma, sol.ess];
    for k in 0..points {
        let g = 10f64.powf(-4.0 + 4.0 * k as f64 / (points - 1) as f64);
        out.push(g);
        out.push(ess_from_phi(phi, g));
    }
    Ok(out)
}

/// Five values per `γ`: `gamma, mean_stein, mean_naive, cov_stein, cov_naive`.
pub fn rmse_sweep_impl(
    d: usize,
    s_count: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let config = RmseConfig {
        d,
        s_count,
        replications,
        gammas: dais_core::experiments::default_gamma_grid(),
        seed,
    };
    let rows = rmse_sweep(&config).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| {
            [
                r.gamma,
                r.mean_stein,
                r.mean_naive,
                r.cov_stein,
                r.cov_naive,
            ]
        })
        .collect())
}

/// Seeds cross the JS boundary as `u32` to stay clear of `BigInt`.
fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn log_density_grid(
    target: &str,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsError> {
    js(log_density_grid_impl(
        target,
        (x_min, x_max),
        (y_min, y_max),
        nx,
        ny,
    ))
}

#[wasm_bindgen]
pub fn dais_trace(
    target: &str,
    s_count: usize,
    n_ess: f64,
    c: f64,
    iters: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    js(dais_trace_impl(
        target,
        s_count,
        n_ess,
        c,
        iters,
        seed.into(),
    ))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn ess_curve(
    target: &str,
    mx: f64,
    my: f64,
    var: f64,
    s_count: usize,
    n_ess: f64,
    points: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    js(ess_curve_impl(
        target,
        (mx, my, var),
        s_count,
        n_ess,
        points,
        seed.into(),
    ))
}

#[wasm_bindgen]
pub fn rmse_curve(
    d: usize,
    s_count: usize,
    replications: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    js(rmse_sweep_impl(d, s_count, replications, seed.into()))
}
