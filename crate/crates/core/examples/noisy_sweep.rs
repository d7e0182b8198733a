//! Relative uncertainty under dephasing. The entangled advantage shrinks at
//! eta = 0.9 and is gone at eta = 0.5.
//!
//!     cargo run --release --example noisy_sweep [eta] [n_steps]

use qubit_metrology::ensemble::{relative_uncertainty, sweep_with_threads, SeedSpec, SweepConfig};
use qubit_metrology::quantum::NoiseModel;

fn main() -> qubit_metrology::Result<()> {
    let mut args = std::env::args().skip(1);
    let eta: f64 = args.next().map_or(0.9, |a| a.parse().expect("real eta"));
    let n_steps: u32 = args.next().map_or(5, |a| a.parse().expect("integer n_steps"));

    let alphas = vec![0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5];
    let cfg = SweepConfig::new(alphas.clone(), NoiseModel::new(eta, n_steps)?, SeedSpec::new(2024));
    println!("eta = {eta}, n_steps = {n_steps}, n_e = {}, n_phi = {}", cfg.n_e, cfg.n_phi);
    let result = relative_uncertainty(&sweep_with_threads(&cfg, None)?, 0.0)?;

    for &a in &alphas[1..] {
        let ratios: Vec<f64> = cfg.nus.iter().map(|&nu| result.row(a, nu).unwrap().baseline_ratio.unwrap()).collect();
        let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
        println!("alpha = {a:.3}: {}  (average {avg:.3})", shown.join(" "));
    }
    Ok(())
}
