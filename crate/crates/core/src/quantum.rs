//! Two-qubit probe states, the rotation they undergo, dephasing noise, and
//! the resulting outcome probabilities in the computational basis.
//!
//! Basis order is (↓↓, ↓↑, ↑↓, ↑↑) with qubit 1 as the leading tensor factor,
//! so index `2 * q1 + q2` with ↓ = 0 and ↑ = 1.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "the finite reals",
        })
    }
}

/// Weight `alpha` of the |↓↑⟩ component in the probe family
/// `√alpha |↓↑⟩ + √(1 − alpha) |↑↓⟩`.
///
/// `alpha = 0` is the separable state |↑↓⟩ and `alpha = 1/2` the Bell state Ψ⁺.
/// The halves `[0, 1/2]` and `[1/2, 1]` are related by swapping the qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParam(f64);

impl ProbeParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain {
                name: "alpha",
                value: alpha,
                range: "[0, 1]",
            })
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// Dephasing strength `eta` applied in `n_steps` discrete slices of the
/// rotation. `eta = 1` is noiseless, `eta = 0` is total dephasing per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    eta: f64,
    n_steps: u32,
}

impl NoiseModel {
    pub fn new(eta: f64, n_steps: u32) -> Result<Self> {
        check_eta(eta)?;
        if n_steps == 0 {
            return Err(Error::Domain {
                name: "n_steps",
                value: 0.0,
                range: "the positive integers",
            });
        }
        Ok(Self { eta, n_steps })
    }

    pub fn noiseless() -> Self {
        Self { eta: 1.0, n_steps: 1 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_steps(&self) -> u32 {
        self.n_steps
    }

    pub fn is_noiseless(&self) -> bool {
        self.eta == 1.0
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "eta",
            value: eta,
            range: "[0, 1]",
        })
    }
}

/// Normalized pure state of the two-qubit probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPureState(Vector4<Complex64>);

impl TwoQubitPureState {
    /// Builds a state from raw amplitudes, rejecting anything whose norm
    /// deviates from one by more than 1e-12.
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Argument("non-finite amplitude".into()));
        }
        let v = Vector4::from(amplitudes);
        let norm_sqr: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "state is not normalized (squared norm {norm_sqr})"
            )));
        }
        Ok(Self(v))
    }

    /// Computational basis state with index `2 * q1 + q2`.
    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::zeros();
        v[index] = real(1.0);
        Self(v)
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn as_vector(&self) -> &Vector4<Complex64> {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome probabilities |⟨ξ_i|ψ⟩|².
    pub fn probabilities(&self) -> ProbabilityProfile {
        ProbabilityProfile::from_raw([
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
            self.0[3].norm_sqr(),
        ])
    }
}

/// 4×4 density matrix. The checked constructor enforces Hermiticity, unit
/// trace and positive semidefiniteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl DensityMatrix4 {
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        let rho = Self(entries);
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Argument("non-finite density matrix entry".into()));
        }
        if rho.hermiticity_defect() > 1e-12 {
            return Err(Error::Argument("density matrix is not Hermitian".into()));
        }
        if (rho.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "density matrix trace {} differs from 1",
                rho.trace()
            )));
        }
        if rho.min_eigenvalue() < -1e-10 {
            return Err(Error::Argument("density matrix is not positive semidefinite".into()));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Largest entrywise deviation from Hermiticity, max |ρ_ij − conj(ρ_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues of the Hermitian part, in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let hermitian = (self.0 + self.0.adjoint()).map(|a| a * 0.5);
        let eig = hermitian.symmetric_eigenvalues();
        let mut values = [eig[0], eig[1], eig[2], eig[3]];
        values.sort_by(f64::total_cmp);
        values
    }

    /// Populations ρ_ii, i.e. the outcome probabilities in the computational
    /// basis.
    pub fn populations(&self) -> ProbabilityProfile {
        ProbabilityProfile::from_raw([
            self.0[(0, 0)].re,
            self.0[(1, 1)].re,
            self.0[(2, 2)].re,
            self.0[(3, 3)].re,
        ])
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &Unitary4) -> Self {
        Self(u.0 * self.0 * u.0.adjoint())
    }

    /// Σ_k K_k ρ K_k† for an arbitrary operator set.
    pub fn apply_kraus(&self, operators: &[Matrix4<Complex64>]) -> Self {
        let mut out = Matrix4::from_element(ZERO);
        for k in operators {
            out += k * self.0 * k.adjoint();
        }
        Self(out)
    }
}

/// 4×4 unitary acting on the two-qubit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4(Matrix4<Complex64>);

impl Unitary4 {
    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// max |(U†U − I)_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.0.adjoint() * self.0;
        let identity = Matrix4::<Complex64>::identity();
        (product - identity).iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &TwoQubitPureState) -> TwoQubitPureState {
        TwoQubitPureState(self.0 * state.0)
    }
}

/// Probabilities Ξ_i of the four computational-basis outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityProfile([f64; 4]);

impl ProbabilityProfile {
    /// Validates and clamps computed probabilities. Entries may undershoot 0 or
    /// overshoot 1 by 1e-12 and the total must be 1 within 1e-10.
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs
            .iter()
            .any(|p| !p.is_finite() || *p < -1e-12 || *p > 1.0 + 1e-12)
        {
            return Err(Error::Argument(format!("probabilities {probs:?} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!(
                "probabilities {probs:?} sum to {total}"
            )));
        }
        Ok(Self::from_raw(probs))
    }

    fn from_raw(probs: [f64; 4]) -> Self {
        Self(probs.map(|p| p.clamp(0.0, 1.0)))
    }

    pub fn probs(&self) -> [f64; 4] {
        self.0
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.0[outcome]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// `√alpha |↓↑⟩ + √(1 − alpha) |↑↓⟩`.
pub fn probe_state(p: ProbeParam) -> TwoQubitPureState {
    let a = p.alpha();
    TwoQubitPureState(Vector4::new(ZERO, real(a.sqrt()), real((1.0 - a).sqrt()), ZERO))
}

/// Single-qubit rotation [[cos φ/2, sin φ/2], [−sin φ/2, cos φ/2]].
pub fn single_qubit_rotation(phi: f64) -> Matrix2<Complex64> {
    let (s, c) = (phi / 2.0).sin_cos();
    Matrix2::new(real(c), real(s), real(-s), real(c))
}

/// The same rotation applied to both qubits, R(φ) ⊗ R(φ).
pub fn rotation_unitary(phi: f64) -> Result<Unitary4> {
    check_finite("phi", phi)?;
    let r = single_qubit_rotation(phi);
    Ok(Unitary4(r.kronecker(&r).fixed_view::<4, 4>(0, 0).into_owned()))
}

pub fn evolve_pure(state: &TwoQubitPureState, phi: f64) -> Result<TwoQubitPureState> {
    Ok(rotation_unitary(phi)?.apply(state))
}

/// |ψ⟩⟨ψ|.
pub fn pure_to_density(state: &TwoQubitPureState) -> DensityMatrix4 {
    DensityMatrix4(state.0 * state.0.adjoint())
}

/// Single-qubit dephasing Kraus pair K₀ = √((1+√η)/2)·I, K₁ = √((1−√η)/2)·Z.
pub fn single_qubit_kraus(eta: f64) -> Result<[Matrix2<Complex64>; 2]> {
    check_eta(eta)?;
    let root = eta.sqrt();
    let k0 = ((1.0 + root) / 2.0).sqrt();
    let k1 = ((1.0 - root) / 2.0).sqrt();
    Ok([
        Matrix2::new(real(k0), ZERO, ZERO, real(k0)),
        Matrix2::new(real(k1), ZERO, ZERO, real(-k1)),
    ])
}

/// The four products K_j ⊗ K_l, ordered (j, l) = (0,0), (0,1), (1,0), (1,1).
pub fn two_qubit_kraus(eta: f64) -> Result<[Matrix4<Complex64>; 4]> {
    let k = single_qubit_kraus(eta)?;
    let kron = |a: &Matrix2<Complex64>, b: &Matrix2<Complex64>| -> Matrix4<Complex64> {
        a.kronecker(b).fixed_view::<4, 4>(0, 0).into_owned()
    };
    Ok([
        kron(&k[0], &k[0]),
        kron(&k[0], &k[1]),
        kron(&k[1], &k[0]),
        kron(&k[1], &k[1]),
    ])
}

/// Independent dephasing of both qubits, Σ_{j,l} (K_j⊗K_l) ρ (K_j⊗K_l)†.
///
/// Populations are untouched; each coherence ρ_rc shrinks by √η for every
/// qubit whose label differs between r and c.
pub fn dephase_two_qubit(rho: &DensityMatrix4, eta: f64) -> Result<DensityMatrix4> {
    Ok(rho.apply_kraus(&two_qubit_kraus(eta)?))
}

/// Rotation by `phi` split into `n_steps` slices, each preceded by a full
/// dephasing step: (U_{φ/n} ∘ D_η)ⁿ applied to ρ.
pub fn noisy_rotation(rho: &DensityMatrix4, phi: f64, noise: &NoiseModel) -> Result<DensityMatrix4> {
    let kraus = two_qubit_kraus(noise.eta())?;
    let step = rotation_unitary(phi / f64::from(noise.n_steps()))?;
    let mut state = *rho;
    for _ in 0..noise.n_steps() {
        state = state.apply_kraus(&kraus).conjugate(&step);
    }
    Ok(state)
}

/// Ξ_i(φ) = Tr(|ξ_i⟩⟨ξ_i| ρ_f) for the probe `p` rotated by `phi` under `noise`.
pub fn measurement_probabilities(
    p: ProbeParam,
    phi: f64,
    noise: &NoiseModel,
) -> Result<ProbabilityProfile> {
    let rho = pure_to_density(&probe_state(p));
    let rho_f = noisy_rotation(&rho, phi, noise)?;
    ProbabilityProfile::new([
        rho_f.entry(0, 0).re,
        rho_f.entry(1, 1).re,
        rho_f.entry(2, 2).re,
        rho_f.entry(3, 3).re,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b}");
    }

    #[test]
    fn probe_state_endpoints() {
        let sep = probe_state(ProbeParam::new(0.0).unwrap());
        assert_eq!(sep, TwoQubitPureState::basis(2));

        let bell = probe_state(ProbeParam::new(0.5).unwrap()).amplitudes();
        assert_close(bell[1], real(FRAC_1_SQRT_2), 1e-15);
        assert_close(bell[2], real(FRAC_1_SQRT_2), 1e-15);
        assert_eq!(bell[0], ZERO);
        assert_eq!(bell[3], ZERO);

        let third = probe_state(ProbeParam::new(1.0 / 3.0).unwrap()).amplitudes();
        assert_close(third[1], real((1.0f64 / 3.0).sqrt()), 1e-15);
        assert_close(third[2], real((2.0f64 / 3.0).sqrt()), 1e-15);
    }

    #[test]
    fn probe_param_rejects_out_of_range() {
        assert!(ProbeParam::new(-0.01).is_err());
        assert!(ProbeParam::new(1.01).is_err());
        assert!(ProbeParam::new(f64::NAN).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(1.5, 5).is_err());
        assert!(NoiseModel::new(-0.1, 5).is_err());
        assert!(NoiseModel::new(0.5, 0).is_err());
        assert!(NoiseModel::new(0.0, 1).is_ok());
    }

    #[test]
    fn zero_rotation_is_identity() {
        let u = rotation_unitary(0.0).unwrap();
        assert_eq!(*u.entries(), Matrix4::identity());
        assert!(rotation_unitary(f64::INFINITY).is_err());
    }

    #[test]
    fn half_turn_swaps_down_up_with_sign() {
        let out = evolve_pure(&TwoQubitPureState::basis(1), PI).unwrap().amplitudes();
        // cos(π/2) is not exactly zero in floating point.
        let expected = [ZERO, ZERO, real(-1.0), ZERO];
        for (a, b) in out.iter().zip(expected) {
            assert_close(*a, b, 1e-15);
        }
    }

    #[test]
    fn bell_state_quarter_turn() {
        let bell = probe_state(ProbeParam::new(0.5).unwrap());
        let out = evolve_pure(&bell, FRAC_PI_2).unwrap().amplitudes();
        let expected = [FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2];
        for (a, b) in out.iter().zip(expected) {
            assert_close(*a, real(b), 1e-15);
        }
    }

    #[test]
    fn up_down_quarter_turn() {
        let out = evolve_pure(&TwoQubitPureState::basis(2), FRAC_PI_2)
            .unwrap()
            .amplitudes();
        for (a, b) in out.iter().zip([0.5, -0.5, 0.5, -0.5]) {
            assert_close(*a, real(b), 1e-15);
        }
    }

    #[test]
    fn density_of_bell_state() {
        let rho = pure_to_density(&probe_state(ProbeParam::new(0.5).unwrap()));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (1..=2).contains(&i) && (1..=2).contains(&j) { 0.5 } else { 0.0 };
                assert_close(rho.entry(i, j), real(expected), 1e-15);
            }
        }
        let eig = rho.eigenvalues();
        for (e, want) in eig.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((e - want).abs() < 1e-10);
        }
    }

    #[test]
    fn dephasing_endpoints() {
        let rho = pure_to_density(&probe_state(ProbeParam::new(0.3).unwrap()));
        let same = dephase_two_qubit(&rho, 1.0).unwrap();
        for (a, b) in same.entries().iter().zip(rho.entries().iter()) {
            assert_close(*a, *b, 1e-15);
        }
        let flat = dephase_two_qubit(&rho, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    assert_close(flat.entry(i, j), rho.entry(i, j), 1e-15);
                } else {
                    assert_close(flat.entry(i, j), ZERO, 1e-15);
                }
            }
        }
        assert!(dephase_two_qubit(&rho, 1.2).is_err());
    }

    #[test]
    fn bell_coherence_shrinks_by_eta() {
        let rho = pure_to_density(&probe_state(ProbeParam::new(0.5).unwrap()));
        let out = dephase_two_qubit(&rho, 0.81).unwrap();
        assert_close(out.entry(1, 2), real(0.5 * 0.81), 1e-15);
        assert_close(out.entry(2, 1), real(0.5 * 0.81), 1e-15);
        assert_close(out.entry(1, 1), real(0.5), 1e-15);
        assert_close(out.entry(2, 2), real(0.5), 1e-15);
    }

    #[test]
    fn profile_examples() {
        let noiseless = NoiseModel::noiseless();
        let p = measurement_probabilities(ProbeParam::new(0.3).unwrap(), 0.0, &noiseless)
            .unwrap()
            .probs();
        for (a, b) in p.iter().zip([0.0, 0.3, 0.7, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = measurement_probabilities(ProbeParam::new(0.5).unwrap(), FRAC_PI_2, &noiseless)
            .unwrap()
            .probs();
        for (a, b) in p.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = measurement_probabilities(ProbeParam::new(0.0).unwrap(), FRAC_PI_2, &noiseless)
            .unwrap()
            .probs();
        for a in p {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn profile_clamps_tiny_negatives() {
        let p = ProbabilityProfile::new([-1e-13, 0.5, 0.5 + 1e-13, 0.0]).unwrap();
        assert_eq!(p.get(0), 0.0);
        assert!(ProbabilityProfile::new([-1e-6, 0.5, 0.5, 0.0]).is_err());
        assert!(ProbabilityProfile::new([0.3, 0.3, 0.3, 0.0]).is_err());
    }
}
