//! Small sweep written out the way the `sweep` subcommand does it: a CSV
//! table plus absolute and relative SVG plots, then read back.
//!
//!     cargo run --release --example sweep_report [out_dir]

use std::path::PathBuf;

use qubit_metrology::cli::cmd_sweep;
use qubit_metrology::config::parse_config;
use qubit_metrology::report::parse_csv;

const CONFIG: &str = "\
# noiseless, coarse grid, quick to run
alphas = 0, 1/6, 1/3, 1/2
nus = 1, 2, 4, 8
n_e = 200
n_phi = 8
grid_size = 512
seed = 11
";

fn main() -> qubit_metrology::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;

    let cfg = parse_config(CONFIG)?;
    let out = cmd_sweep(&cfg, None)?;
    std::fs::write(dir.join("sweep.csv"), &out.csv)?;
    std::fs::write(dir.join("sweep_absolute.svg"), &out.absolute_svg)?;
    if let Some(svg) = &out.relative_svg {
        std::fs::write(dir.join("sweep_relative.svg"), svg)?;
    }

    let rows = parse_csv(&std::fs::read_to_string(dir.join("sweep.csv"))?)?;
    println!("{} rows written to {}", rows.len(), dir.display());
    for row in rows.iter().filter(|r| r.is_mean() && r.alpha == 0.5) {
        println!("  nu = {:>2}: mean length {:.4}, ratio {:.4}", row.nu, row.mu_l_ci, row.baseline_ratio.unwrap_or(f64::NAN));
    }
    Ok(())
}
