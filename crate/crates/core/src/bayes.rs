//! Grid posterior over the rotation angle and the summaries drawn from it:
//! the most probable angle and the shortest interval holding a given mass.
//!
//! The posterior is stored on a uniform grid and treated as the piecewise
//! linear interpolant of its node values. All masses (the cumulative table,
//! [`PosteriorGrid::interval_probability`], and the interval search) are exact
//! integrals of that interpolant, which coincide with the composite trapezoid
//! rule at the nodes.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantum::ProbabilityProfile;

/// Default number of grid nodes.
pub const DEFAULT_GRID_SIZE: usize = 1024;

/// Outcome tallies k₁…k₄ of ν measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MeasurementCounts([u64; 4]);

impl MeasurementCounts {
    pub fn new(counts: [u64; 4]) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> [u64; 4] {
        self.0
    }

    /// ν = Σ k_i.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Tallies of two independent records taken back to back.
    pub fn merged(&self, other: &MeasurementCounts) -> MeasurementCounts {
        let mut out = self.0;
        for (o, k) in out.iter_mut().zip(other.0) {
            *o += k;
        }
        Self(out)
    }

    /// ln(ν! / Π k_i!).
    pub fn ln_multinomial_coefficient(&self) -> f64 {
        ln_factorial(self.total()) - self.0.iter().map(|&k| ln_factorial(k)).sum::<f64>()
    }
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Closed interval of admissible angles, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiDomain {
    lo: f64,
    hi: f64,
}

impl PhiDomain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Argument(format!(
                "domain [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, phi: f64) -> bool {
        (self.lo..=self.hi).contains(&phi)
    }

    /// `grid_size` evenly spaced nodes from `lo` to `hi` inclusive.
    pub fn nodes(&self, grid_size: usize) -> Vec<f64> {
        let step = self.width() / (grid_size - 1) as f64;
        (0..grid_size)
            .map(|j| if j + 1 == grid_size { self.hi } else { self.lo + step * j as f64 })
            .collect()
    }
}

impl Default for PhiDomain {
    /// [0, π/2].
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Prior weight w(φ) ≥ 0. Uniform unless a weight function is supplied.
#[derive(Clone, Default)]
pub struct Prior(Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>);

impl Prior {
    pub fn uniform() -> Self {
        Self(None)
    }

    pub fn from_fn(weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Some(Arc::new(weight)))
    }

    pub fn weight(&self, phi: f64) -> f64 {
        self.0.as_ref().map_or(1.0, |w| w(phi))
    }

    pub fn is_uniform(&self) -> bool {
        self.0.is_none()
    }
}

impl fmt::Debug for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_uniform() {
            f.write_str("Prior::Uniform")
        } else {
            f.write_str("Prior::Weighted(..)")
        }
    }
}

/// Multinomial likelihood ν!/(Πk_i!) · Π Ξ_i(φ)^{k_i}, with 0⁰ = 1.
pub fn likelihood(
    profile_at: impl Fn(f64) -> Result<ProbabilityProfile>,
    counts: &MeasurementCounts,
    phi: f64,
) -> Result<f64> {
    let profile = profile_at(phi)?;
    let log_l = log_likelihood_kernel(&profile.probs().map(f64::ln), counts);
    Ok((counts.ln_multinomial_coefficient() + log_l).exp())
}

/// Σ k_i ln Ξ_i, skipping outcomes that were never observed.
fn log_likelihood_kernel(log_probs: &[f64; 4], counts: &MeasurementCounts) -> f64 {
    counts
        .0
        .iter()
        .zip(log_probs)
        .filter(|(&k, _)| k > 0)
        .map(|(&k, &lp)| k as f64 * lp)
        .sum()
}

/// Log outcome probabilities and log prior weights tabulated on the grid.
///
/// The table depends only on the probe model, prior and grid, so it is built
/// once and reused for every count record drawn from that model.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    domain: PhiDomain,
    nodes: Vec<f64>,
    log_probs: Vec<[f64; 4]>,
    log_prior: Vec<f64>,
}

impl ProfileTable {
    pub fn build(
        profile_at: impl Fn(f64) -> Result<ProbabilityProfile>,
        prior: &Prior,
        domain: PhiDomain,
        grid_size: usize,
    ) -> Result<Self> {
        if grid_size < 3 {
            return Err(Error::Argument(format!("grid_size {grid_size} must be at least 3")));
        }
        let nodes = domain.nodes(grid_size);
        let log_probs = nodes
            .iter()
            .map(|&phi| Ok(profile_at(phi)?.probs().map(f64::ln)))
            .collect::<Result<Vec<_>>>()?;
        let mut log_prior = Vec::with_capacity(grid_size);
        for &phi in &nodes {
            let w = prior.weight(phi);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Argument(format!("prior weight {w} at phi={phi} is not a finite nonnegative number")));
            }
            log_prior.push(if prior.is_uniform() { 0.0 } else { w.ln() });
        }
        if log_prior.iter().all(|&w| w == f64::NEG_INFINITY) {
            return Err(Error::Argument("prior weight is identically zero on the grid".into()));
        }
        Ok(Self {
            domain,
            nodes,
            log_probs,
            log_prior,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn domain(&self) -> PhiDomain {
        self.domain
    }

    pub fn grid_size(&self) -> usize {
        self.nodes.len()
    }

    /// Normalized posterior for one count record.
    pub fn posterior(&self, counts: &MeasurementCounts) -> Result<PosteriorGrid> {
        let mut log_post: Vec<f64> = self
            .log_probs
            .iter()
            .zip(&self.log_prior)
            .map(|(lp, &prior)| prior + log_likelihood_kernel(lp, counts))
            .collect();
        let peak = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY || peak.is_nan() {
            return Err(Error::DegenerateEvidence { counts: counts.0 });
        }
        for v in &mut log_post {
            *v = (*v - peak).exp();
        }
        PosteriorGrid::from_unnormalized(self.domain, self.nodes.clone(), log_post)
            .map_err(|_| Error::DegenerateEvidence { counts: counts.0 })
    }
}

/// Normalized posterior P̃(φ | counts) = w(φ) · likelihood(φ) / A on a uniform
/// grid of `grid_size` nodes.
pub fn posterior(
    profile_at: impl Fn(f64) -> Result<ProbabilityProfile>,
    counts: &MeasurementCounts,
    prior: &Prior,
    domain: PhiDomain,
    grid_size: usize,
) -> Result<PosteriorGrid> {
    ProfileTable::build(profile_at, prior, domain, grid_size)?.posterior(counts)
}

/// Interval [a, b] and the posterior mass it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

impl ConfidenceInterval {
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Posterior density on a uniform grid together with its cumulative mass.
#[derive(Debug, Clone)]
pub struct PosteriorGrid {
    domain: PhiDomain,
    step: f64,
    nodes: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PosteriorGrid {
    /// Normalizes nonnegative node weights over `nodes`, which must be the
    /// uniform grid of `domain`.
    pub fn from_unnormalized(domain: PhiDomain, nodes: Vec<f64>, mut weights: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes.len() != weights.len() {
            return Err(Error::Argument("posterior needs at least 3 nodes with one weight each".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Argument("posterior weights must be finite and nonnegative".into()));
        }
        let step = domain.width() / (nodes.len() - 1) as f64;
        let area = trapezoid(&weights, step);
        if !(area > 0.0) {
            return Err(Error::Argument("posterior weights integrate to zero".into()));
        }
        for w in &mut weights {
            *w /= area;
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for pair in weights.windows(2) {
            acc += 0.5 * step * (pair[0] + pair[1]);
            cumulative.push(acc);
        }
        Ok(Self {
            domain,
            step,
            nodes,
            density: weights,
            cumulative,
        })
    }

    pub fn domain(&self) -> PhiDomain {
        self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Grid node with the largest density; ties go to the smallest angle.
    pub fn most_probable(&self) -> f64 {
        let mut best = 0;
        for (j, &d) in self.density.iter().enumerate() {
            if d > self.density[best] {
                best = j;
            }
        }
        self.nodes[best]
    }

    fn cell_of(&self, phi: f64) -> usize {
        let last = self.nodes.len() - 2;
        let k = ((phi - self.domain.lo()) / self.step).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(last)
        }
    }

    /// Mass on [lo, phi] of the interpolated density.
    pub fn cdf(&self, phi: f64) -> f64 {
        let phi = phi.clamp(self.domain.lo(), self.domain.hi());
        let k = self.cell_of(phi);
        let t = (phi - self.nodes[k]).clamp(0.0, self.step);
        let (d0, d1) = (self.density[k], self.density[k + 1]);
        self.cumulative[k] + d0 * t + (d1 - d0) * t * t / (2.0 * self.step)
    }

    /// Smallest angle whose cumulative mass reaches `mass`, searching cells
    /// from `start` on. Returns the cell the answer fell in along with it.
    fn inverse_cdf_from(&self, mass: f64, start: usize) -> (f64, usize) {
        let last = self.nodes.len() - 2;
        let mut k = start.min(last);
        while k < last && self.cumulative[k + 1] < mass {
            k += 1;
        }
        let residual = (mass - self.cumulative[k]).max(0.0);
        let (d0, d1) = (self.density[k], self.density[k + 1]);
        let slope = (d1 - d0) / self.step;
        // Solve d0·t + slope·t²/2 = residual for the root in [0, step].
        let disc = (d0 * d0 + 2.0 * slope * residual).max(0.0);
        let denom = d0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * residual / denom } else { 0.0 };
        (self.nodes[k] + t.clamp(0.0, self.step), k)
    }

    /// Smallest angle whose cumulative mass reaches `mass`.
    pub fn inverse_cdf(&self, mass: f64) -> f64 {
        let k = self.cumulative.partition_point(|&c| c < mass).saturating_sub(1);
        self.inverse_cdf_from(mass, k).0
    }

    /// Posterior mass between `a` and `b`.
    pub fn interval_probability(&self, a: f64, b: f64) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::Argument(format!("interval endpoints a={a} > b={b}")));
        }
        Ok((self.cdf(b) - self.cdf(a)).max(0.0))
    }

    /// Length of the shortest interval starting at `a` holding mass `y`, or
    /// `None` when not enough mass lies to the right of `a`.
    fn span_from(&self, a: f64, y: f64) -> Option<(f64, f64)> {
        let target = self.cdf(a) + y;
        if target > self.cumulative[self.cumulative.len() - 1] {
            return None;
        }
        let b = self.inverse_cdf(target);
        Some((b - a, b))
    }

    /// Shortest interval whose posterior mass is `y` to within `tau`.
    ///
    /// A two-pointer scan over the cumulative table gives, for every node used
    /// as the left endpoint, the right endpoint that closes mass `y`. The best
    /// node is then refined by a golden-section search for the left endpoint
    /// between its neighbours, each candidate's right endpoint found by
    /// inverting the interpolated cumulative mass.
    pub fn min_confidence_interval(&self, y: f64, tau: f64) -> Result<ConfidenceInterval> {
        if !(y > 0.0 && y < 1.0) {
            return Err(Error::Argument(format!("confidence level {y} must lie in (0, 1)")));
        }
        if !(tau > 0.0) {
            return Err(Error::Argument(format!("tolerance {tau} must be positive")));
        }
        let total = self.cumulative[self.cumulative.len() - 1];
        let n = self.nodes.len();

        let mut best_len = f64::INFINITY;
        let mut best = (self.domain.lo(), self.domain.hi());
        let mut best_node = 0;
        let mut cell = 0;
        for i in 0..n {
            let target = self.cumulative[i] + y;
            if target > total {
                break;
            }
            let (b, k) = self.inverse_cdf_from(target, cell);
            cell = k;
            let len = b - self.nodes[i];
            if len < best_len {
                best_len = len;
                best = (self.nodes[i], b);
                best_node = i;
            }
        }
        // The interval flush against the upper end has a non-node left endpoint.
        let a_max = self.inverse_cdf(total - y);
        let b_end = self.domain.hi();
        if b_end - a_max < best_len {
            best_len = b_end - a_max;
            best = (a_max, b_end);
            best_node = self.cell_of(a_max);
        }

        // Golden-section search on the left endpoint around the best node.
        let lo = self.nodes[best_node.saturating_sub(1)];
        let hi = self.nodes[(best_node + 1).min(n - 1)].min(a_max);
        if hi > lo {
            let span = |a: f64| self.span_from(a, y).map_or(f64::INFINITY, |(len, _)| len);
            let ratio = (5f64.sqrt() - 1.0) / 2.0;
            let (mut x0, mut x1) = (lo, hi);
            let mut c = x1 - ratio * (x1 - x0);
            let mut d = x0 + ratio * (x1 - x0);
            let (mut fc, mut fd) = (span(c), span(d));
            for _ in 0..80 {
                if fc <= fd {
                    x1 = d;
                    d = c;
                    fd = fc;
                    c = x1 - ratio * (x1 - x0);
                    fc = span(c);
                } else {
                    x0 = c;
                    c = d;
                    fc = fd;
                    d = x0 + ratio * (x1 - x0);
                    fd = span(d);
                }
                if x1 - x0 <= 1e-14 * self.domain.width() {
                    break;
                }
            }
            let a = 0.5 * (x0 + x1);
            if let Some((len, b)) = self.span_from(a, y) {
                if len < best_len {
                    best = (a, b);
                }
            }
        }

        let (a, b) = best;
        let mass = self.interval_probability(a, b)?;
        if (mass - y).abs() > tau || !best_len.is_finite() {
            return Err(Error::Convergence {
                target: y,
                tau,
                best_mass: mass,
                best_a: a,
                best_b: b,
            });
        }
        Ok(ConfidenceInterval { a, b, mass })
    }
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (inner + 0.5 * (values[0] + values[values.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{measurement_probabilities, NoiseModel, ProbeParam};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn uniform(grid_size: usize) -> PosteriorGrid {
        let domain = PhiDomain::default();
        PosteriorGrid::from_unnormalized(domain, domain.nodes(grid_size), vec![1.0; grid_size]).unwrap()
    }

    fn shaped(domain: PhiDomain, grid_size: usize, f: impl Fn(f64) -> f64) -> PosteriorGrid {
        let nodes = domain.nodes(grid_size);
        let w = nodes.iter().map(|&x| f(x)).collect();
        PosteriorGrid::from_unnormalized(domain, nodes, w).unwrap()
    }

    fn down_up_profile(phi: f64) -> Result<ProbabilityProfile> {
        measurement_probabilities(ProbeParam::new(1.0)?, phi, &NoiseModel::noiseless())
    }

    #[test]
    fn empty_record_has_unit_likelihood() {
        let counts = MeasurementCounts::default();
        for phi in [0.0, 0.4, 1.2] {
            let l = likelihood(down_up_profile, &counts, phi).unwrap();
            assert!((l - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_down_up_likelihood_is_cos4() {
        let counts = MeasurementCounts::new([0, 1, 0, 0]);
        for phi in [0.0, 0.3, 1.0, 2.5] {
            let l = likelihood(down_up_profile, &counts, phi).unwrap();
            assert!((l - (phi / 2.0).cos().powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn multinomial_factor_is_included() {
        let counts = MeasurementCounts::new([1, 1, 0, 0]);
        let phi = 0.7;
        let p = down_up_profile(phi).unwrap().probs();
        let l = likelihood(down_up_profile, &counts, phi).unwrap();
        assert!((l - 2.0 * p[0] * p[1]).abs() < 1e-14);
    }

    #[test]
    fn empty_record_posterior_is_flat() {
        let grid = posterior(
            down_up_profile,
            &MeasurementCounts::default(),
            &Prior::uniform(),
            PhiDomain::default(),
            DEFAULT_GRID_SIZE,
        )
        .unwrap();
        for d in grid.density() {
            assert!((d - 2.0 / PI).abs() < 1e-12);
        }
        assert!((grid.cumulative().last().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(grid.most_probable(), 0.0);
    }

    #[test]
    fn impossible_record_is_degenerate() {
        // Outcome 3 has zero probability everywhere.
        let zero_profile = |_phi: f64| ProbabilityProfile::new([0.5, 0.5, 0.0, 0.0]);
        let err = posterior(
            zero_profile,
            &MeasurementCounts::new([0, 0, 3, 0]),
            &Prior::uniform(),
            PhiDomain::default(),
            64,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateEvidence { counts: [0, 0, 3, 0] }));
    }

    #[test]
    fn grid_size_must_be_at_least_three() {
        assert!(posterior(
            down_up_profile,
            &MeasurementCounts::default(),
            &Prior::uniform(),
            PhiDomain::default(),
            2
        )
        .is_err());
    }

    #[test]
    fn zero_prior_is_rejected() {
        let prior = Prior::from_fn(|_| 0.0);
        assert!(ProfileTable::build(down_up_profile, &prior, PhiDomain::default(), 16).is_err());
        let prior = Prior::from_fn(|_| -1.0);
        assert!(ProfileTable::build(down_up_profile, &prior, PhiDomain::default(), 16).is_err());
    }

    #[test]
    fn most_probable_examples() {
        let domain = PhiDomain::new(0.0, PI).unwrap();
        let grid = shaped(domain, 1025, |x| (x / 2.0).cos().powi(4));
        assert_eq!(grid.most_probable(), 0.0);
        let grid = shaped(PhiDomain::default(), 1025, |x| x.sin().powi(2));
        assert_eq!(grid.most_probable(), FRAC_PI_2);
    }

    #[test]
    fn interval_probability_examples() {
        let grid = uniform(1024);
        assert!((grid.interval_probability(0.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(grid.interval_probability(0.3, 0.3).unwrap(), 0.0);
        assert!((grid.interval_probability(0.0, FRAC_PI_2 / 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(grid.interval_probability(0.5, 0.4).is_err());
    }

    #[test]
    fn flat_posterior_interval_length() {
        let ci = uniform(1024).min_confidence_interval(0.95, 1e-3).unwrap();
        assert!((ci.length() - 0.95 * FRAC_PI_2).abs() < 1e-9);
        assert!((ci.mass - 0.95).abs() <= 1e-3);
    }

    #[test]
    fn inverse_cdf_inverts_cdf() {
        let grid = shaped(PhiDomain::default(), 257, |x| 1.0 + x.sin() * 3.0);
        for m in [0.0, 0.01, 0.3, 0.77, 0.999] {
            let x = grid.inverse_cdf(m);
            assert!((grid.cdf(x) - m).abs() < 1e-12, "mass {m}");
        }
    }

    #[test]
    fn interval_rejects_bad_level() {
        let grid = uniform(64);
        assert!(grid.min_confidence_interval(1.0, 1e-3).is_err());
        assert!(grid.min_confidence_interval(0.0, 1e-3).is_err());
        assert!(grid.min_confidence_interval(0.5, 0.0).is_err());
    }

    #[test]
    fn bimodal_picks_the_narrow_peak() {
        // Tall narrow bump at 0.3 holding most of the mass, broad low hump at 1.2.
        let f = |x: f64| 8.0 * (-((x - 0.3) / 0.02).powi(2)).exp() + 0.05 * (-((x - 1.2) / 0.3).powi(2)).exp();
        let grid = shaped(PhiDomain::default(), 2048, f);
        let ci = grid.min_confidence_interval(0.5, 1e-3).unwrap();
        assert!(ci.a > 0.2 && ci.b < 0.4, "{ci:?}");
    }
}
