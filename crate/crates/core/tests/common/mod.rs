//! Reference computations that do not go through the library's own kernels.

#![allow(dead_code)]

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// R(φ) ⊗ R(φ) written out entry by entry: (R⊗R)[2i+j][2k+l] = R[i][k]·R[j][l].
pub fn rotation_by_hand(phi: f64) -> Matrix4<C> {
    let (s, co) = (phi / 2.0).sin_cos();
    let r = [[co, s], [-s, co]];
    Matrix4::from_fn(|row, col| c(r[row / 2][col / 2] * r[row % 2][col % 2]))
}

/// The four K_j ⊗ K_l as diagonal matrices: K₀ = a·I, K₁ = b·diag(1, −1).
pub fn kraus_by_hand(eta: f64) -> Vec<Matrix4<C>> {
    let a = ((1.0 + eta.sqrt()) / 2.0).sqrt();
    let b = ((1.0 - eta.sqrt()) / 2.0).sqrt();
    let single = [[a, a], [b, -b]];
    let mut out = Vec::new();
    for j in 0..2 {
        for l in 0..2 {
            out.push(Matrix4::from_fn(|row, col| {
                if row == col {
                    c(single[j][row / 2] * single[l][row % 2])
                } else {
                    c(0.0)
                }
            }));
        }
    }
    out
}

/// Sums Λ_seq ρ Λ_seq† over all 4ⁿ Kraus index sequences, where
/// Λ_seq = Π_m U_{φ/n} K_{seq_m}.
pub fn kraus_sequence_oracle(rho: &Matrix4<C>, phi: f64, eta: f64, n: u32) -> Matrix4<C> {
    let u = rotation_by_hand(phi / n as f64);
    let ks = kraus_by_hand(eta);
    let total = 4usize.pow(n);
    let mut out = Matrix4::zeros();
    for code in 0..total {
        let mut op = Matrix4::<C>::identity();
        let mut rest = code;
        for _ in 0..n {
            let k = &ks[rest % 4];
            rest /= 4;
            op = u * k * op;
        }
        out += op * rho * op.adjoint();
    }
    out
}

/// Random full-rank density matrix G G† / Tr(G G†) with Gaussian-ish entries.
pub fn random_density(seed: u64) -> Matrix4<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Matrix4::from_fn(|_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = g * g.adjoint();
    let tr = rho.trace();
    rho.map(|x| x / tr)
}

/// Random normalized pure state.
pub fn random_pure(seed: u64) -> Vector4<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = Vector4::from_fn(|_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.map(|x| x / norm)
}

pub fn max_abs_diff(a: &Matrix4<C>, b: &Matrix4<C>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// ∫₀^b cos⁴(φ/2) dφ = 3b/8 + sin(b)/2 + sin(2b)/16.
pub fn cos4_integral(b: f64) -> f64 {
    3.0 * b / 8.0 + b.sin() / 2.0 + (2.0 * b).sin() / 16.0
}

/// Normalized density (8 / 3π) cos⁴(φ/2) on [0, π].
pub fn cos4_density(phi: f64) -> f64 {
    8.0 / (3.0 * std::f64::consts::PI) * (phi / 2.0).cos().powi(4)
}

/// Root of cos4_integral(b) / (3π/8) = mass by bisection on [0, π].
pub fn cos4_quantile(mass: f64) -> f64 {
    let total = cos4_integral(std::f64::consts::PI);
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cos4_integral(mid) / total < mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shortest node-to-node interval of a cumulative table with mass at least
/// `mass`, by exhaustive scan over all pairs.
pub fn shortest_node_interval(nodes: &[f64], cumulative: &[f64], mass: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..nodes.len() {
        for j in i..nodes.len() {
            if cumulative[j] - cumulative[i] >= mass {
                let len = nodes[j] - nodes[i];
                best = Some(best.map_or(len, |b: f64| b.min(len)));
                break;
            }
        }
    }
    best
}
