//! Lyapunov exponent: the observable Φ_E, a Monte-Carlo product estimator
//! and the operator estimator L ≈ T_E^ℓ Φ_E.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SpectrumError;
use crate::cocycle::{transfer_matrix, ProjectivePoint, Sign};
use crate::stats::{mean, std_error};
use crate::transferop::{build_operator, power_orbit, FourierVector, Frame, OperatorMatrix, Variant, LEAK_TOLERANCE};

pub const MC_BURN_IN: usize = 1000;
pub const MC_BATCHES: usize = 100;

/// Φ_E(θ) = Av± log‖g±(E)·(cos θ, sin θ)ᵀ‖.
pub fn phi_e(energy: f64, lambda: f64, p: ProjectivePoint) -> f64 {
    phi_at(energy, lambda, p.x())
}

fn phi_at(energy: f64, lambda: f64, x: f64) -> f64 {
    let (s, c) = (std::f64::consts::PI * x).sin_cos();
    let half_log = |v: f64| {
        let u = (energy + v) * c - s;
        0.5 * (u * u + c * c).ln()
    };
    0.5 * (half_log(lambda) + half_log(-lambda))
}

/// ∂_E Φ_E(θ) = Av± u± cos θ / (u±² + cos²θ), u± = (E ± λ)cos θ − sin θ.
pub fn dphi_de(energy: f64, lambda: f64, x: f64) -> f64 {
    let (s, c) = (std::f64::consts::PI * x).sin_cos();
    let term = |v: f64| {
        let u = (energy + v) * c - s;
        u * c / (u * u + c * c)
    };
    0.5 * (term(lambda) + term(-lambda))
}

/// Fourier coefficients of Φ_E from `m` samples.
pub fn phi_fourier(energy: f64, lambda: f64, n_max: usize, m: usize) -> FourierVector {
    FourierVector::from_fn(|x| phi_at(energy, lambda, x), n_max, m)
}

pub fn dphi_de_fourier(energy: f64, lambda: f64, n_max: usize, m: usize) -> FourierVector {
    FourierVector::from_fn(|x| dphi_de(energy, lambda, x), n_max, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Products of i.i.d. fair g±(E) applied to a unit vector, renormalized each
/// step; 10³ burn-in steps, standard error from 100 batch means.
pub fn lyapunov_mc(energy: f64, lambda: f64, steps: usize, seed: u64) -> Result<Estimate, SpectrumError> {
    lyapunov_mc_batches(energy, lambda, steps, seed, MC_BATCHES)
}

pub fn lyapunov_mc_batches(
    energy: f64,
    lambda: f64,
    steps: usize,
    seed: u64,
    batches: usize,
) -> Result<Estimate, SpectrumError> {
    if steps < 1000 || batches < 2 || steps < batches {
        return Err(SpectrumError::InvalidParameters(format!(
            "need steps ≥ 10³ and ≥ batches (steps = {steps}, batches = {batches})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gp = transfer_matrix(energy, lambda, Sign::Plus);
    let gm = transfer_matrix(energy, lambda, Sign::Minus);
    let (mut v0, mut v1) = (1.0f64, 0.0f64);
    let mut step = |rng: &mut ChaCha8Rng| {
        let g = if rng.random::<bool>() { &gp } else { &gm };
        let (a, b) = (g.a * v0 + g.b * v1, g.c * v0 + g.d * v1);
        let n = a.hypot(b);
        v0 = a / n;
        v1 = b / n;
        n.ln()
    };
    for _ in 0..MC_BURN_IN {
        step(&mut rng);
    }
    let per_batch = steps / batches;
    let means: Vec<f64> = (0..batches)
        .map(|_| (0..per_batch).map(|_| step(&mut rng)).sum::<f64>() / per_batch as f64)
        .collect();
    Ok(Estimate {
        value: mean(&means),
        stderr: std_error(&means),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOperator {
    pub ell: usize,
    /// Grid mean of T^ℓ Φ_E (= its zeroth coefficient).
    pub value: f64,
    /// sup − inf of T^ℓ Φ_E on the dense grid.
    pub residual: f64,
    pub max_leakage: f64,
}

/// L ≈ mean of T_E^ℓ Φ_E for a raw-frame plain operator.
pub fn lyapunov_operator(op: &OperatorMatrix, ell: usize) -> Result<LyapunovOperator, SpectrumError> {
    let meta = &op.meta;
    if meta.frame != Frame::Raw || meta.variant != Variant::Plain {
        return Err(SpectrumError::InvalidParameters(
            "lyapunov_operator needs the raw-frame plain operator".into(),
        ));
    }
    let m = meta.quadrature.max(4 * (2 * meta.n_max + 1));
    let phi = phi_fourier(meta.energy, meta.lambda, meta.n_max, m);
    let orbit = power_orbit(op, &phi, ell);
    let leak = orbit.max_leakage();
    if leak > LEAK_TOLERANCE {
        return Err(SpectrumError::TruncationLeak(leak));
    }
    let last = orbit.last();
    Ok(LyapunovOperator {
        ell,
        value: last.get(0).re,
        residual: last.oscillation(),
        max_leakage: leak,
    })
}

/// Builds the raw-frame operator and evaluates [`lyapunov_operator`].
pub fn lyapunov_operator_at(
    energy: f64,
    lambda: f64,
    ell: usize,
    n_max: usize,
    quadrature: usize,
) -> Result<LyapunovOperator, SpectrumError> {
    let op = build_operator(energy, lambda, n_max, quadrature, Variant::Plain, Frame::Raw)?;
    lyapunov_operator(&op, ell)
}
