//! The `qmetro` command line: `probs`, `posterior` and `sweep`.
//!
//! Each subcommand reads an optional `--config` file, then applies flag
//! overrides on top. Exit status is 0 on success, 2 for invalid input, 3 for
//! computation failures and 4 for I/O failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bayes::{MeasurementCounts, PosteriorGrid};
use crate::config::{parse_config, parse_real, ExperimentConfig};
use crate::ensemble::{profile_table, relative_uncertainty, sample_outcomes, sweep_with_threads, SeedSpec, SweepResult};
use crate::error::{Error, Result};
use crate::quantum::{measurement_probabilities, NoiseModel, ProbeParam};
use crate::report::{absolute_plot, fmt_sig12, posterior_csv, posterior_plot, relative_plot, result_rows, write_csv};

/// Probe state used as the denominator of relative uncertainty.
pub const BASELINE_ALPHA: f64 = 0.0;

#[derive(Debug, Parser)]
#[command(name = "qmetro", version, about = "Bayesian rotation-angle estimation with two-qubit probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the four outcome probabilities of a probe at one angle.
    Probs(ProbsArgs),
    /// Write the posterior density for one count record as CSV.
    Posterior(PosteriorArgs),
    /// Run a Monte Carlo sweep and write the result table.
    Sweep(SweepArgs),
}

fn real_arg(text: &str) -> std::result::Result<f64, String> {
    parse_real(text)
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// `key=value` experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
    /// Output CSV path (`-` for stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_parser = real_arg)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<u32>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long, value_parser = real_arg)]
    pub y: Option<f64>,
    #[arg(long, value_parser = real_arg)]
    pub tau: Option<f64>,
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub domain_lo: Option<f64>,
    #[arg(long, value_parser = real_arg)]
    pub domain_hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProbsArgs {
    #[arg(long, value_parser = real_arg)]
    pub alpha: f64,
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub phi: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[arg(long, value_parser = real_arg)]
    pub alpha: f64,
    /// Observed counts `k1,k2,k3,k4` in the order ↓↓, ↓↑, ↑↓, ↑↑.
    #[arg(long, conflicts_with = "phi")]
    pub counts: Option<String>,
    /// True angle to sample counts at (with `--nu`) instead of `--counts`.
    #[arg(long, value_parser = real_arg, requires = "nu")]
    pub phi: Option<f64>,
    #[arg(long)]
    pub nu: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated probe parameters.
    #[arg(long)]
    pub alphas: Option<String>,
    /// Comma-separated measurement counts ν.
    #[arg(long)]
    pub nus: Option<String>,
    #[arg(long)]
    pub n_e: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn list<T>(text: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| item(s.trim()).map_err(Error::Argument))
        .collect()
}

/// Loads the config file (if any) and applies the shared overrides.
pub fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(path) = &common.output {
        cfg.output_path = path.clone();
    }
    if let Some(eta) = common.eta {
        cfg.eta = eta;
    }
    if let Some(n) = common.n_steps {
        cfg.n_steps = n;
    }
    if let Some(g) = common.grid_size {
        cfg.grid_size = g;
    }
    if let Some(y) = common.y {
        cfg.y = y;
    }
    if let Some(tau) = common.tau {
        cfg.tau = tau;
    }
    if common.domain_lo.is_some() || common.domain_hi.is_some() {
        cfg.domain = crate::bayes::PhiDomain::new(
            common.domain_lo.unwrap_or(cfg.domain.lo()),
            common.domain_hi.unwrap_or(cfg.domain.hi()),
        )?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The four outcome probabilities, one `label probability` line each.
pub fn cmd_probs(alpha: f64, phi: f64, noise: &NoiseModel) -> Result<String> {
    let profile = measurement_probabilities(ProbeParam::new(alpha)?, phi, noise)?;
    let labels = ["down,down", "down,up", "up,down", "up,up"];
    let mut out = String::new();
    for (label, p) in labels.iter().zip(profile.probs()) {
        out.push_str(&format!("{label} {}\n", fmt_sig12(p)));
    }
    Ok(out)
}

pub struct PosteriorOutput {
    pub counts: MeasurementCounts,
    pub grid: PosteriorGrid,
    pub csv: String,
    pub svg: String,
}

/// Posterior of probe `alpha` for `counts` under the configured noise,
/// domain and grid.
pub fn cmd_posterior(cfg: &ExperimentConfig, alpha: f64, counts: MeasurementCounts) -> Result<PosteriorOutput> {
    cfg.validate()?;
    let table = profile_table(ProbeParam::new(alpha)?, &cfg.noise()?, cfg.domain, cfg.grid_size)?;
    let grid = table.posterior(&counts)?;
    let csv = posterior_csv(&grid);
    let c = counts.counts();
    let svg = posterior_plot(
        &grid,
        &format!("Posterior, alpha = {alpha}, counts = ({}, {}, {}, {})", c[0], c[1], c[2], c[3]),
    )
    .to_svg();
    Ok(PosteriorOutput { counts, grid, csv, svg })
}

pub struct SweepOutput {
    pub result: SweepResult,
    pub csv: String,
    pub absolute_svg: String,
    /// Present when the baseline probe is part of the sweep.
    pub relative_svg: Option<String>,
}

pub fn cmd_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<SweepOutput> {
    let raw = sweep_with_threads(&cfg.sweep_config()?, threads)?;
    let has_baseline = raw.alphas().iter().any(|&a| (a - BASELINE_ALPHA).abs() <= 1e-12);
    let result = if has_baseline {
        relative_uncertainty(&raw, BASELINE_ALPHA)?
    } else {
        raw
    };
    let csv = write_csv(&result_rows(&result));
    let absolute_svg = absolute_plot(&result).to_svg();
    let relative_svg = has_baseline.then(|| relative_plot(&result, BASELINE_ALPHA).to_svg());
    Ok(SweepOutput {
        result,
        csv,
        absolute_svg,
        relative_svg,
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}.svg"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Probs(args) => {
            let cfg = load_config(&args.common)?;
            stdout.write_all(cmd_probs(args.alpha, args.phi, &cfg.noise()?)?.as_bytes())?;
        }
        Command::Posterior(args) => {
            let cfg = load_config(&args.common)?;
            let counts = match (&args.counts, args.phi, args.nu) {
                (Some(text), _, _) => {
                    let k = list(text, |s| s.parse::<u64>().map_err(|_| format!("bad count `{s}`")))?;
                    let k: [u64; 4] = k
                        .try_into()
                        .map_err(|_| Error::Argument("--counts needs exactly four values".into()))?;
                    MeasurementCounts::new(k)
                }
                (None, Some(phi), Some(nu)) => {
                    let truth = measurement_probabilities(ProbeParam::new(args.alpha)?, phi, &cfg.noise()?)?;
                    let mut rng = SeedSpec::new(cfg.seed).stream(args.alpha, nu, 0, 0);
                    sample_outcomes(&truth, nu, &mut rng)
                }
                _ => return Err(Error::Argument("posterior needs --counts or --phi with --nu".into())),
            };
            let out = cmd_posterior(&cfg, args.alpha, counts)?;
            match &args.common.output {
                Some(path) if !is_stdout(path) => {
                    write_file(path, &out.csv)?;
                    if args.common.plot {
                        write_file(&sibling(path, ""), &out.svg)?;
                    }
                }
                _ => {
                    stdout.write_all(out.csv.as_bytes())?;
                    if args.common.plot {
                        write_file(Path::new("posterior.svg"), &out.svg)?;
                    }
                }
            }
        }
        Command::Sweep(args) => {
            let mut cfg = load_config(&args.common)?;
            if let Some(text) = &args.alphas {
                cfg.alphas = list(text, parse_real)?;
            }
            if let Some(text) = &args.nus {
                cfg.nus = list(text, |s| s.parse::<u64>().map_err(|_| format!("bad nu `{s}`")))?;
            }
            if let Some(n) = args.n_e {
                cfg.n_e = n;
            }
            if let Some(n) = args.n_phi {
                cfg.n_phi = n;
            }
            cfg.validate()?;
            let out = cmd_sweep(&cfg, args.threads)?;
            let path = cfg.output_path.clone();
            if is_stdout(&path) {
                stdout.write_all(out.csv.as_bytes())?;
            } else {
                write_file(&path, &out.csv)?;
            }
            if args.common.plot {
                let base = if is_stdout(&path) { PathBuf::from("sweep.csv") } else { path };
                write_file(&sibling(&base, "_absolute"), &out.absolute_svg)?;
                if let Some(svg) = &out.relative_svg {
                    write_file(&sibling(&base, "_relative"), svg)?;
                }
            }
        }
    }
    Ok(())
}
