use dais_core::experiments::{rmse_sweep, run_monitor, MonitorTarget, RmseConfig};
use dais_core::*;

fn sd(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[test]
fn estimator_error_shrinks_with_sample_size() {
    let errs: Vec<_> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&s| {
            let rows = rmse_sweep(&RmseConfig {
                d: 10,
                s_count: s,
                replications: 10,
                gammas: vec![0.1],
                seed: 5,
            })
            .unwrap();
            rows[0]
        })
        .collect();
    for w in errs.windows(2) {
        assert!(w[1].mean_stein < w[0].mean_stein);
        assert!(w[1].mean_naive < w[0].mean_naive);
        assert!(w[1].cov_stein < w[0].cov_stein);
        assert!(w[1].cov_naive < w[0].cov_naive);
    }
}

#[test]
fn sine_monitor_settles() {
    let rows = run_monitor(MonitorTarget::Sine2d, 20_000, 1_000.0, 0.1, 3, 60).unwrap();
    assert_eq!(rows.len(), 60);
    let tail: Vec<f64> = rows[40..].iter().map(|r| r.gamma).collect();
    assert!(sd(&tail) < 0.1, "{tail:?}");
    assert!(rows.iter().all(|r| r.neg_elbo.is_finite()));
}

#[test]
fn high_dimensional_monitor_improves() {
    let rows = run_monitor(MonitorTarget::CorrGauss100, 10_000, 1_000.0, 0.3, 1, 15).unwrap();
    assert_eq!(rows.len(), 15);
    let first = rows[0].neg_elbo;
    let last = rows[14].neg_elbo;
    assert!(last < first, "{first} -> {last}");
    assert!(rows[14].gamma >= rows[0].gamma);
}

#[test]
fn dais_run_is_reproducible() {
    let config = DaisConfig {
        s_count: 3_000,
        n_ess: 300.0,
        max_iters: 8,
        seed: 11,
        ..DaisConfig::default()
    };
    let a = run_dais(&GaussianParams::standard(2), &banana_target(), &config).unwrap();
    let b = run_dais(&GaussianParams::standard(2), &banana_target(), &config).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.gamma.to_bits(), y.gamma.to_bits());
        assert_eq!(x.mean, y.mean);
        assert_eq!(x.covariance, y.covariance);
    }
}
