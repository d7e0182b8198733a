//! Dephasing during the rotation: coherence decay of the Bell probe and how
//! its outcome probabilities flatten as eta drops.
//!
//!     cargo run --example noisy_channel

use std::f64::consts::FRAC_PI_4;

use qubit_metrology::quantum::{
    dephase_two_qubit, measurement_probabilities, noisy_rotation, probe_state, pure_to_density, NoiseModel,
    ProbeParam,
};

fn main() -> qubit_metrology::Result<()> {
    let bell = pure_to_density(&probe_state(ProbeParam::new(0.5)?));

    println!("one dephasing step on the Bell state, coherence between du and ud:");
    for eta in [1.0, 0.9, 0.5, 0.0] {
        let out = dephase_two_qubit(&bell, eta)?;
        println!("  eta = {eta:<4} |rho[1][2]| = {:.4}", out.entry(1, 2).norm());
    }

    let phi = FRAC_PI_4;
    println!("\nBell probe at phi = pi/4 after 5 noisy steps:");
    for eta in [1.0, 0.9, 0.5, 0.1] {
        let noise = NoiseModel::new(eta, 5)?;
        let rho = noisy_rotation(&bell, phi, &noise)?;
        let p = measurement_probabilities(ProbeParam::new(0.5)?, phi, &noise)?.probs();
        println!(
            "  eta = {eta:<4} trace {:.12}  min eigenvalue {:+.2e}  probs {:.4} {:.4} {:.4} {:.4}",
            rho.trace(),
            rho.min_eigenvalue(),
            p[0],
            p[1],
            p[2],
            p[3]
        );
    }
    Ok(())
}
