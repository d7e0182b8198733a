//! Monte Carlo ensembles of simulated estimations and the sweeps built on
//! them.
//!
//! Every trial draws from its own ChaCha stream keyed by
//! (alpha, ν, angle index, trial index), so sweep output does not depend on
//! how cells are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::bayes::{MeasurementCounts, PhiDomain, Prior, ProfileTable, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::quantum::{measurement_probabilities, NoiseModel, ProbabilityProfile, ProbeParam};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_TAU: f64 = 1e-3;

/// Master seed from which every trial stream is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Independent stream for one trial of one sweep cell.
    pub fn stream(&self, alpha: f64, nu: u64, phi_index: usize, trial: usize) -> ChaCha8Rng {
        let mut key = splitmix64(alpha.to_bits());
        key = splitmix64(key ^ nu);
        key = splitmix64(key ^ phi_index as u64);
        key = splitmix64(key ^ trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(key);
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Multinomial draw of `nu` outcomes, as a chain of conditional binomials.
pub fn sample_outcomes<R: Rng + ?Sized>(profile: &ProbabilityProfile, nu: u64, rng: &mut R) -> MeasurementCounts {
    let probs = profile.probs();
    let mut counts = [0u64; 4];
    let mut remaining = nu;
    let mut mass_left = 1.0;
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = if mass_left > 0.0 { (probs[i] / mass_left).clamp(0.0, 1.0) } else { 0.0 };
        let k = if p >= 1.0 {
            remaining
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(remaining, p).expect("p in (0, 1)").sample(rng)
        };
        counts[i] = k;
        remaining -= k;
        mass_left -= probs[i];
    }
    counts[3] = remaining;
    MeasurementCounts::new(counts)
}

/// Parameters of one simulated estimation.
#[derive(Debug, Clone, Copy)]
pub struct TrialConfig {
    pub probe: ProbeParam,
    pub noise: NoiseModel,
    pub nu: u64,
    pub true_phi: f64,
    pub domain: PhiDomain,
    pub grid_size: usize,
    pub y: f64,
    pub tau: f64,
}

impl TrialConfig {
    pub fn new(probe: ProbeParam, noise: NoiseModel, nu: u64, true_phi: f64) -> Self {
        Self {
            probe,
            noise,
            nu,
            true_phi,
            domain: PhiDomain::default(),
            grid_size: DEFAULT_GRID_SIZE,
            y: DEFAULT_CONFIDENCE,
            tau: DEFAULT_TAU,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.domain.contains(self.true_phi) {
            return Err(Error::Argument(format!(
                "true phi {} outside domain [{}, {}]",
                self.true_phi,
                self.domain.lo(),
                self.domain.hi()
            )));
        }
        if !(self.y > 0.0 && self.y < 1.0) {
            return Err(Error::Argument(format!("confidence level {} must lie in (0, 1)", self.y)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Argument(format!("tolerance {} must be positive", self.tau)));
        }
        if self.grid_size < 3 {
            return Err(Error::Argument(format!("grid_size {} must be at least 3", self.grid_size)));
        }
        Ok(())
    }

    /// Outcome-probability table of this probe over the estimation grid.
    pub fn profile_table(&self) -> Result<ProfileTable> {
        profile_table(self.probe, &self.noise, self.domain, self.grid_size)
    }
}

/// Outcome-probability table of a probe under `noise` with a flat prior.
pub fn profile_table(probe: ProbeParam, noise: &NoiseModel, domain: PhiDomain, grid_size: usize) -> Result<ProfileTable> {
    ProfileTable::build(
        |phi| measurement_probabilities(probe, phi, noise),
        &Prior::uniform(),
        domain,
        grid_size,
    )
}

/// Most probable angle and confidence-interval length of one estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub phi_mp: f64,
    pub l_ci: f64,
}

/// Samples counts at the true angle, builds the posterior, and summarizes it.
pub fn run_trial<R: Rng + ?Sized>(cfg: &TrialConfig, rng: &mut R) -> Result<EstimationResult> {
    cfg.validate()?;
    let table = cfg.profile_table()?;
    let truth = measurement_probabilities(cfg.probe, cfg.true_phi, &cfg.noise)?;
    run_trial_with_table(cfg, &table, &truth, rng)
}

/// [`run_trial`] against a precomputed table and true-angle profile.
///
/// A degenerate posterior is resampled once before the error is returned.
pub fn run_trial_with_table<R: Rng + ?Sized>(
    cfg: &TrialConfig,
    table: &ProfileTable,
    truth: &ProbabilityProfile,
    rng: &mut R,
) -> Result<EstimationResult> {
    let mut attempt = 0;
    loop {
        let counts = sample_outcomes(truth, cfg.nu, rng);
        match table.posterior(&counts) {
            Ok(grid) => {
                let ci = grid.min_confidence_interval(cfg.y, cfg.tau)?;
                return Ok(EstimationResult {
                    phi_mp: grid.most_probable(),
                    l_ci: ci.length(),
                });
            }
            Err(err @ Error::DegenerateEvidence { .. }) => {
                if attempt > 0 {
                    return Err(err);
                }
                attempt += 1;
            }
            Err(err) => return Err(err),
        }
    }
}

/// Sample means and (N_E − 1)-denominator standard deviations of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMetrics {
    pub mu_phi_mp: f64,
    pub sigma_phi_mp: f64,
    pub mu_l_ci: f64,
    pub sigma_l_ci: f64,
    pub n_trials: usize,
}

impl EnsembleMetrics {
    pub fn from_results(results: &[EstimationResult]) -> Result<Self> {
        if results.len() < 2 {
            return Err(Error::Argument(format!(
                "ensemble metrics need at least 2 results, got {}",
                results.len()
            )));
        }
        let (mu_phi_mp, sigma_phi_mp) = mean_and_sd(results.iter().map(|r| r.phi_mp));
        let (mu_l_ci, sigma_l_ci) = mean_and_sd(results.iter().map(|r| r.l_ci));
        Ok(Self {
            mu_phi_mp,
            sigma_phi_mp,
            mu_l_ci,
            sigma_l_ci,
            n_trials: results.len(),
        })
    }

    /// Standard error of `mu_l_ci`.
    pub fn l_ci_stderr(&self) -> f64 {
        self.sigma_l_ci / (self.n_trials as f64).sqrt()
    }
}

fn mean_and_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Ensemble over `n_e` trials of one configuration.
pub fn run_ensemble(cfg: &TrialConfig, n_e: usize, seed: SeedSpec, phi_index: usize) -> Result<EnsembleMetrics> {
    cfg.validate()?;
    let table = cfg.profile_table()?;
    let truth = measurement_probabilities(cfg.probe, cfg.true_phi, &cfg.noise)?;
    run_cell(cfg, &table, &truth, n_e, seed, phi_index)
}

fn run_cell(
    cfg: &TrialConfig,
    table: &ProfileTable,
    truth: &ProbabilityProfile,
    n_e: usize,
    seed: SeedSpec,
    phi_index: usize,
) -> Result<EnsembleMetrics> {
    let results = (0..n_e)
        .map(|trial| {
            let mut rng = seed.stream(cfg.probe.alpha(), cfg.nu, phi_index, trial);
            run_trial_with_table(cfg, table, truth, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleMetrics::from_results(&results)
}

/// Everything a sweep needs besides the worker count.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub noise: NoiseModel,
    pub nus: Vec<u64>,
    pub n_phi: usize,
    pub n_e: usize,
    pub domain: PhiDomain,
    pub grid_size: usize,
    pub y: f64,
    pub tau: f64,
    pub seed: SeedSpec,
}

impl SweepConfig {
    /// Defaults: ν = 1…10, 1000 trials over 20 angles when noiseless and 500
    /// over 10 otherwise, 1024 grid nodes on [0, π/2], y = 0.95, τ = 1e-3.
    pub fn new(alphas: Vec<f64>, noise: NoiseModel, seed: SeedSpec) -> Self {
        let (n_e, n_phi) = default_ensemble_size(&noise);
        Self {
            alphas,
            noise,
            nus: (1..=10).collect(),
            n_phi,
            n_e,
            domain: PhiDomain::default(),
            grid_size: DEFAULT_GRID_SIZE,
            y: DEFAULT_CONFIDENCE,
            tau: DEFAULT_TAU,
            seed,
        }
    }

    /// The `n_phi` true angles, evenly spaced from `lo` (included) to `hi`
    /// (excluded).
    pub fn true_angles(&self) -> Vec<f64> {
        let step = self.domain.width() / self.n_phi as f64;
        (0..self.n_phi).map(|k| self.domain.lo() + step * k as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_phi < 1 {
            return Err(Error::Argument("n_phi must be at least 1".into()));
        }
        if self.n_e < 2 {
            return Err(Error::Argument(format!("n_e = {} must be at least 2", self.n_e)));
        }
        if self.alphas.is_empty() || self.nus.is_empty() {
            return Err(Error::Argument("sweep needs at least one alpha and one nu".into()));
        }
        for &alpha in &self.alphas {
            ProbeParam::new(alpha)?;
        }
        Ok(())
    }
}

/// (N_E, N_φ) used when not overridden: (1000, 20) noiseless, (500, 10) noisy.
pub fn default_ensemble_size(noise: &NoiseModel) -> (usize, usize) {
    if noise.is_noiseless() {
        (1000, 20)
    } else {
        (500, 10)
    }
}

/// Metrics of one true angle within a sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMetrics {
    pub phi_true: f64,
    pub metrics: EnsembleMetrics,
}

/// One (alpha, ν) row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub eta: f64,
    pub n_steps: u32,
    pub nu: u64,
    pub per_phi: Vec<AngleMetrics>,
    /// Arithmetic mean of μ(L(CI)) over the true angles.
    pub mean_mu_l_ci: f64,
    pub baseline_ratio: Option<f64>,
}

impl SweepRow {
    /// Monte Carlo standard error of `mean_mu_l_ci`, treating angles as
    /// independent ensembles.
    pub fn mean_mu_l_ci_stderr(&self) -> f64 {
        let n = self.per_phi.len() as f64;
        let var: f64 = self.per_phi.iter().map(|c| c.metrics.l_ci_stderr().powi(2)).sum();
        var.sqrt() / n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, alpha: f64, nu: u64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.nu == nu && (r.alpha - alpha).abs() <= 1e-12)
    }

    pub fn alphas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|&a| (a - r.alpha).abs() <= 1e-12) {
                out.push(r.alpha);
            }
        }
        out
    }

    pub fn nus(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.nu) {
                out.push(r.nu);
            }
        }
        out
    }
}

/// Runs the sweep on the global rayon pool.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    sweep_with_threads(cfg, None)
}

/// Runs the sweep on a dedicated pool of `threads` workers (or the global
/// pool for `None`). Output is identical for every worker count.
pub fn sweep_with_threads(cfg: &SweepConfig, threads: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    match threads {
        None => sweep_inner(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Argument(format!("cannot build thread pool: {e}")))?
            .install(|| sweep_inner(cfg)),
    }
}

fn sweep_inner(cfg: &SweepConfig) -> Result<SweepResult> {
    let angles = cfg.true_angles();

    // One table per probe, shared by every cell and trial of that probe.
    let tables = cfg
        .alphas
        .par_iter()
        .map(|&alpha| profile_table(ProbeParam::new(alpha)?, &cfg.noise, cfg.domain, cfg.grid_size))
        .collect::<Result<Vec<_>>>()?;
    let truths = cfg
        .alphas
        .iter()
        .map(|&alpha| {
            let probe = ProbeParam::new(alpha)?;
            angles
                .iter()
                .map(|&phi| measurement_probabilities(probe, phi, &cfg.noise))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let n_angles = angles.len();
    let cells: Vec<(usize, usize, usize)> = (0..cfg.alphas.len())
        .flat_map(|a| (0..cfg.nus.len()).flat_map(move |n| (0..n_angles).map(move |p| (a, n, p))))
        .collect();

    let metrics = cells
        .par_iter()
        .map(|&(a, n, p)| {
            let alpha = cfg.alphas[a];
            let nu = cfg.nus[n];
            let phi = angles[p];
            let trial = TrialConfig {
                probe: ProbeParam::new(alpha)?,
                noise: cfg.noise,
                nu,
                true_phi: phi,
                domain: cfg.domain,
                grid_size: cfg.grid_size,
                y: cfg.y,
                tau: cfg.tau,
            };
            trial
                .validate()
                .and_then(|_| run_cell(&trial, &tables[a], &truths[a][p], cfg.n_e, cfg.seed, p))
                .map_err(|source| Error::Cell {
                    alpha,
                    nu,
                    phi,
                    source: Box::new(source),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(cfg.alphas.len() * cfg.nus.len());
    let mut it = metrics.into_iter();
    for &alpha in &cfg.alphas {
        for &nu in &cfg.nus {
            let per_phi: Vec<AngleMetrics> = angles
                .iter()
                .map(|&phi_true| AngleMetrics {
                    phi_true,
                    metrics: it.next().expect("one metric per cell"),
                })
                .collect();
            let mean_mu_l_ci = per_phi.iter().map(|c| c.metrics.mu_l_ci).sum::<f64>() / per_phi.len() as f64;
            rows.push(SweepRow {
                alpha,
                eta: cfg.noise.eta(),
                n_steps: cfg.noise.n_steps(),
                nu,
                per_phi,
                mean_mu_l_ci,
                baseline_ratio: None,
            });
        }
    }
    Ok(SweepResult { rows })
}

/// Fills `baseline_ratio` with mean(μ(L(CI))) relative to the `baseline_alpha`
/// row at the same ν.
pub fn relative_uncertainty(sweep: &SweepResult, baseline_alpha: f64) -> Result<SweepResult> {
    let mut out = sweep.clone();
    for row in &mut out.rows {
        let base = sweep
            .rows
            .iter()
            .find(|b| {
                b.nu == row.nu
                    && b.eta == row.eta
                    && b.n_steps == row.n_steps
                    && (b.alpha - baseline_alpha).abs() <= 1e-12
            })
            .ok_or_else(|| {
                Error::Argument(format!(
                    "no baseline row for alpha={baseline_alpha} at nu={}",
                    row.nu
                ))
            })?;
        row.baseline_ratio = Some(if (row.alpha - baseline_alpha).abs() <= 1e-12 {
            1.0
        } else {
            row.mean_mu_l_ci / base.mean_mu_l_ci
        });
    }
    Ok(out)
}

/// Asymptotic ratio 1/√N between the entangled and separable uncertainty
/// bounds for N qubits.
pub fn asymptotic_relative_bound(n_qubits: u32) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::Argument("n_qubits must be at least 1".into()));
    }
    Ok(1.0 / f64::from(n_qubits).sqrt())
}
