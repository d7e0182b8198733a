//! One estimation by hand: sample counts, build the posterior, then read off
//! the most probable angle and the shortest 95% interval. Also writes the
//! posterior as CSV and SVG into the current directory.
//!
//!     cargo run --example posterior_interval [nu]

use qubit_metrology::bayes::{Prior, PhiDomain, DEFAULT_GRID_SIZE};
use qubit_metrology::ensemble::{profile_table, sample_outcomes, SeedSpec};
use qubit_metrology::quantum::{measurement_probabilities, NoiseModel, ProbeParam};
use qubit_metrology::report::{posterior_csv, posterior_plot};

fn main() -> qubit_metrology::Result<()> {
    let nu: u64 = std::env::args().nth(1).map_or(10, |a| a.parse().expect("integer nu"));
    let true_phi = 0.6;
    let noise = NoiseModel::noiseless();
    let domain = PhiDomain::default();

    for alpha in [0.0, 0.5] {
        let probe = ProbeParam::new(alpha)?;
        let truth = measurement_probabilities(probe, true_phi, &noise)?;
        let mut rng = SeedSpec::new(7).stream(alpha, nu, 0, 0);
        let counts = sample_outcomes(&truth, nu, &mut rng);

        let table = profile_table(probe, &noise, domain, DEFAULT_GRID_SIZE)?;
        let grid = table.posterior(&counts)?;
        let ci = grid.min_confidence_interval(0.95, 1e-3)?;
        println!(
            "alpha = {alpha}: counts {:?}, phi_mp = {:.4}, 95% interval [{:.4}, {:.4}] (length {:.4}, mass {:.4})",
            counts.counts(),
            grid.most_probable(),
            ci.a,
            ci.b,
            ci.length(),
            ci.mass
        );

        let stem = format!("posterior_alpha{alpha}");
        std::fs::write(format!("{stem}.csv"), posterior_csv(&grid))?;
        std::fs::write(format!("{stem}.svg"), posterior_plot(&grid, &format!("alpha = {alpha}, nu = {nu}")).to_svg())?;
    }

    // A non-uniform prior goes through the generic constructor.
    let probe = ProbeParam::new(0.5)?;
    let prior = Prior::from_fn(|phi: f64| phi.sin());
    let grid = qubit_metrology::bayes::posterior(
        |phi| measurement_probabilities(probe, phi, &noise),
        &qubit_metrology::bayes::MeasurementCounts::new([1, 2, 3, 0]),
        &prior,
        domain,
        512,
    )?;
    println!("sin prior, counts (1, 2, 3, 0): phi_mp = {:.4}", grid.most_probable());
    Ok(())
}
