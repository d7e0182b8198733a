//! Noiseless sweep over the four probe states, printed as relative
//! uncertainty against the separable probe.
//!
//!     cargo run --release --example relative_uncertainty [n_e] [n_phi]

use qubit_metrology::ensemble::{asymptotic_relative_bound, relative_uncertainty, sweep, SeedSpec, SweepConfig};
use qubit_metrology::quantum::NoiseModel;

fn main() -> qubit_metrology::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let alphas = vec![0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5];
    let mut cfg = SweepConfig::new(alphas.clone(), NoiseModel::noiseless(), SeedSpec::new(2024));
    if let Some(n_e) = args.next() {
        cfg.n_e = n_e;
    }
    if let Some(n_phi) = args.next() {
        cfg.n_phi = n_phi;
    }

    let result = relative_uncertainty(&sweep(&cfg)?, 0.0)?;
    println!("reference 1/sqrt(2) = {:.4}", asymptotic_relative_bound(2)?);
    print!("{:>6}", "nu");
    for a in &alphas {
        print!("  alpha={a:<6.3}");
    }
    println!();
    for &nu in &cfg.nus {
        print!("{nu:>6}");
        for &a in &alphas {
            let row = result.row(a, nu).expect("row present");
            print!("  {:<12.4}", row.baseline_ratio.unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
