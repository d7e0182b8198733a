//! Outcome probabilities of the four standard probes as the rotation angle
//! sweeps over [0, π/2], next to the closed forms for the two extremes.
//!
//!     cargo run --example probe_profiles

use std::f64::consts::FRAC_PI_2;

use qubit_metrology::quantum::{measurement_probabilities, NoiseModel, ProbeParam};

fn main() -> qubit_metrology::Result<()> {
    let noise = NoiseModel::noiseless();
    for alpha in [0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5] {
        println!("alpha = {alpha:.4}");
        println!("  {:>6}  {:>8} {:>8} {:>8} {:>8}", "phi", "dd", "du", "ud", "uu");
        for k in 0..=4 {
            let phi = FRAC_PI_2 * k as f64 / 4.0;
            let p = measurement_probabilities(ProbeParam::new(alpha)?, phi, &noise)?.probs();
            println!("  {phi:>6.4}  {:>8.5} {:>8.5} {:>8.5} {:>8.5}", p[0], p[1], p[2], p[3]);
        }
    }

    // Separable probe |↑↓⟩: (s²c², s⁴, c⁴, s²c²) with s, c of φ/2.
    let phi: f64 = 0.7;
    let (s, c) = (phi / 2.0).sin_cos();
    let p = measurement_probabilities(ProbeParam::new(0.0)?, phi, &noise)?.probs();
    println!("\nalpha = 0 at phi = {phi}: {p:?}");
    println!("closed form:           {:?}", [s * s * c * c, s.powi(4), c.powi(4), s * s * c * c]);

    // Bell probe: (sin²φ, cos²φ, cos²φ, sin²φ) / 2.
    let p = measurement_probabilities(ProbeParam::new(0.5)?, phi, &noise)?.probs();
    let (sp, cp) = phi.sin_cos();
    println!("alpha = 1/2 at phi = {phi}: {p:?}");
    println!("closed form:             {:?}", [sp * sp / 2.0, cp * cp / 2.0, cp * cp / 2.0, sp * sp / 2.0]);
    Ok(())
}
