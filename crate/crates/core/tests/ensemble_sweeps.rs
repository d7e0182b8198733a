use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use qubit_metrology::bayes::{PhiDomain, Prior, ProfileTable};
use qubit_metrology::ensemble::*;
use qubit_metrology::quantum::{measurement_probabilities, NoiseModel, ProbeParam};
use qubit_metrology::Error;

fn small_sweep(alphas: Vec<f64>, nus: Vec<u64>, n_phi: usize, n_e: usize) -> SweepConfig {
    let mut cfg = SweepConfig::new(alphas, NoiseModel::noiseless(), SeedSpec::new(17));
    cfg.nus = nus;
    cfg.n_phi = n_phi;
    cfg.n_e = n_e;
    cfg.grid_size = 256;
    cfg
}

#[test]
fn most_probable_is_unbiased_for_separable_probe() {
    let cfg = TrialConfig::new(ProbeParam::new(0.0).unwrap(), NoiseModel::noiseless(), 100, FRAC_PI_4);
    let n_e = 1000;
    let m = run_ensemble(&cfg, n_e, SeedSpec::new(5), 0).unwrap();
    let bound = 4.0 * m.sigma_phi_mp / (n_e as f64).sqrt();
    assert!((m.mu_phi_mp - FRAC_PI_4).abs() <= bound, "{m:?}");
}

#[test]
fn no_measurements_give_flat_intervals_for_every_probe() {
    for alpha in [0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 1.0] {
        for eta in [1.0, 0.5] {
            let noise = NoiseModel::new(eta, 5).unwrap();
            let cfg = TrialConfig::new(ProbeParam::new(alpha).unwrap(), noise, 0, 0.7);
            let m = run_ensemble(&cfg, 3, SeedSpec::new(1), 0).unwrap();
            assert!((m.mu_l_ci - 0.95 * FRAC_PI_2).abs() < 1e-9);
            assert!(m.sigma_l_ci < 1e-12);
        }
    }
}

#[test]
fn single_angle_mean_equals_that_angle() {
    let result = sweep(&small_sweep(vec![0.5], vec![3], 1, 10)).unwrap();
    let row = &result.rows[0];
    assert_eq!(row.per_phi.len(), 1);
    assert_eq!(row.mean_mu_l_ci, row.per_phi[0].metrics.mu_l_ci);
}

#[test]
fn mean_is_average_over_angles() {
    let result = sweep(&small_sweep(vec![0.0, 0.5], vec![1, 4], 5, 6)).unwrap();
    assert_eq!(result.rows.len(), 4);
    for row in &result.rows {
        let mean = row.per_phi.iter().map(|c| c.metrics.mu_l_ci).sum::<f64>() / 5.0;
        assert!((row.mean_mu_l_ci - mean).abs() < 1e-15);
        assert_eq!(row.per_phi.len(), 5);
        assert!(row.per_phi.iter().all(|c| c.metrics.n_trials == 6));
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let cfg = small_sweep(vec![0.0, 1.0 / 3.0], vec![1, 2, 7], 3, 8);
    let one = sweep_with_threads(&cfg, Some(1)).unwrap();
    let four = sweep_with_threads(&cfg, Some(4)).unwrap();
    assert_eq!(one, four);
}

#[test]
fn alpha_order_does_not_change_cells() {
    let a = sweep(&small_sweep(vec![0.0, 0.5], vec![2], 2, 5)).unwrap();
    let b = sweep(&small_sweep(vec![0.5, 0.0], vec![2], 2, 5)).unwrap();
    assert_eq!(a.row(0.5, 2), b.row(0.5, 2));
}

#[test]
fn relative_uncertainty_ratios() {
    let result = sweep(&small_sweep(vec![0.0, 0.5], vec![1, 5], 2, 10)).unwrap();
    let rel = relative_uncertainty(&result, 0.0).unwrap();
    for nu in [1, 5] {
        assert_eq!(rel.row(0.0, nu).unwrap().baseline_ratio, Some(1.0));
        let want = result.row(0.5, nu).unwrap().mean_mu_l_ci / result.row(0.0, nu).unwrap().mean_mu_l_ci;
        assert_eq!(rel.row(0.5, nu).unwrap().baseline_ratio, Some(want));
    }
    assert!(matches!(relative_uncertainty(&result, 0.25), Err(Error::Argument(_))));
}

#[test]
fn sweep_validation() {
    let mut cfg = small_sweep(vec![0.0], vec![1], 1, 1);
    assert!(sweep(&cfg).is_err());
    cfg.n_e = 2;
    cfg.n_phi = 0;
    assert!(sweep(&cfg).is_err());
    cfg.n_phi = 1;
    cfg.alphas = vec![1.5];
    assert!(sweep(&cfg).is_err());
}

#[test]
fn metrics_ignore_result_order() {
    let results: Vec<EstimationResult> = (0..50)
        .map(|i| EstimationResult {
            phi_mp: (i as f64 * 0.37).sin().abs(),
            l_ci: 0.1 + (i as f64 * 0.11).cos().abs(),
        })
        .collect();
    let mut reversed = results.clone();
    reversed.reverse();
    reversed.rotate_left(13);
    let a = EnsembleMetrics::from_results(&results).unwrap();
    let b = EnsembleMetrics::from_results(&reversed).unwrap();
    for (x, y) in [(a.mu_phi_mp, b.mu_phi_mp), (a.sigma_phi_mp, b.sigma_phi_mp), (a.mu_l_ci, b.mu_l_ci), (a.sigma_l_ci, b.sigma_l_ci)] {
        assert!((x - y).abs() < 1e-14);
    }
}

#[test]
fn profile_is_tabulated_once_per_probe() {
    // Every trial reuses the table; the profile function is only touched
    // while the table is built.
    let calls = Cell::new(0usize);
    let noise = NoiseModel::new(0.9, 5).unwrap();
    let probe = ProbeParam::new(0.5).unwrap();
    let grid_size = 200;
    let table = ProfileTable::build(
        |phi| {
            calls.set(calls.get() + 1);
            measurement_probabilities(probe, phi, &noise)
        },
        &Prior::uniform(),
        PhiDomain::default(),
        grid_size,
    )
    .unwrap();
    assert_eq!(calls.get(), grid_size);
    let mut cfg = TrialConfig::new(probe, noise, 10, 0.4);
    cfg.grid_size = grid_size;
    let truth = measurement_probabilities(probe, 0.4, &noise).unwrap();
    let seed = SeedSpec::new(3);
    for trial in 0..100 {
        run_trial_with_table(&cfg, &table, &truth, &mut seed.stream(0.5, 10, 0, trial)).unwrap();
    }
    assert_eq!(calls.get(), grid_size);
}

#[test]
fn more_measurements_shrink_the_interval() {
    let result = sweep(&small_sweep(vec![0.0, 0.5], (1..=10).collect(), 5, 200)).unwrap();
    for alpha in [0.0, 0.5] {
        for nu in 1..10 {
            let a = result.row(alpha, nu).unwrap();
            let b = result.row(alpha, nu + 1).unwrap();
            let sigma = (a.mean_mu_l_ci_stderr().powi(2) + b.mean_mu_l_ci_stderr().powi(2)).sqrt();
            assert!(b.mean_mu_l_ci < a.mean_mu_l_ci + sigma, "alpha {alpha} nu {nu}");
        }
    }
}

#[test]
fn cell_errors_carry_context() {
    let mut cfg = small_sweep(vec![0.5], vec![1], 2, 3);
    cfg.y = 1.5;
    match sweep(&cfg) {
        Err(Error::Cell { alpha, nu, .. }) => {
            assert_eq!(alpha, 0.5);
            assert_eq!(nu, 1);
        }
        other => panic!("expected cell error, got {other:?}"),
    }
}
