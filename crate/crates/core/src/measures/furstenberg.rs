//! The μ-stationary measure of μ = ½(δ_{g₊} + δ_{g₋}) on the projective line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MeasureError, MeasureEstimate, MeasureMeta, MeasureSource};
use crate::cocycle::project;
use crate::seeds::derive_seed;
use crate::stats::std_error;
use crate::transferop::{build_operator, frame_matrices, FourierVector, Frame, OperatorMatrix, Variant};

pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 100_000;
/// Independent orbits merged (in index order) by [`furstenberg_mc`].
pub const MC_CHAINS: usize = 8;
const MC_BATCHES_PER_CHAIN: usize = 16;

/// ‖ν̂ − A*ν̂‖₂.
pub fn stationarity_residual(op: &OperatorMatrix, nu: &FourierVector) -> f64 {
    op.apply_adjoint(nu).sub(&nu.resized(op.n_max())).l2_norm()
}

/// Solves ν̂ = A*ν̂, ν̂(0) = 1, by power iteration with the adjoint of a plain
/// Galerkin matrix; the frame is that of the operator.
pub fn furstenberg_fixed_point(op: &OperatorMatrix) -> Result<MeasureEstimate, MeasureError> {
    if op.meta.variant != Variant::Plain {
        return Err(MeasureError::InvalidParameters(
            "stationary measures need the plain operator".into(),
        ));
    }
    let n_max = op.n_max();
    let mut nu = FourierVector::constant(n_max, 1.0);
    let mut change = f64::INFINITY;
    for it in 1..=FIXED_POINT_MAX_ITERATIONS {
        let mut next = op.apply_adjoint(&nu);
        let c0 = next.get(0);
        for c in next.coeffs_mut() {
            *c /= c0;
        }
        next.set(0, Complex64::new(1.0, 0.0));
        change = next.sub(&nu).l2_norm();
        nu = next;
        if change < FIXED_POINT_TOLERANCE {
            return Ok(MeasureEstimate::new(
                nu,
                None,
                (0.0, 1.0),
                MeasureMeta {
                    source: MeasureSource::FixedPoint,
                    energy: Some(op.meta.energy),
                    lambda: op.meta.lambda,
                    seed: None,
                    frame: Some(op.meta.frame),
                    work: it,
                },
            ));
        }
    }
    Err(MeasureError::NonConvergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        change,
    })
}

pub fn furstenberg_fixed_point_at(
    energy: f64,
    lambda: f64,
    n_max: usize,
    quadrature: usize,
    frame: Frame,
) -> Result<MeasureEstimate, MeasureError> {
    let op = build_operator(energy, lambda, n_max, quadrature, Variant::Plain, frame)?;
    furstenberg_fixed_point(&op)
}

/// Random orbit x ← τ_{g±}(x) with fair signs; empirical ν̂(n) = mean e(−n x)
/// over [`MC_CHAINS`] independent chains, each with its own burn-in.
pub fn furstenberg_mc(
    energy: f64,
    lambda: f64,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    frame: Frame,
    n_max: usize,
) -> Result<MeasureEstimate, MeasureError> {
    use rayon::prelude::*;
    if n_samples < 10_000 {
        return Err(MeasureError::InvalidParameters(format!(
            "n_samples = {n_samples} below 10⁴"
        )));
    }
    let [gp, gm] = frame_matrices(energy, lambda, frame)?;
    let per_chain = n_samples / MC_CHAINS;
    let per_batch = per_chain / MC_BATCHES_PER_CHAIN;
    let dim = 2 * n_max + 1;

    // Each chain returns batch means of e(−n x) for n = 0..=n_max.
    let chains: Vec<Vec<Vec<Complex64>>> = (0..MC_CHAINS as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "furstenberg_mc", c));
            let mut x: f64 = rng.random();
            let step = |rng: &mut ChaCha8Rng, x: f64| {
                let g = if rng.random::<bool>() { &gp } else { &gm };
                project(g, x).0
            };
            for _ in 0..burn_in {
                x = step(&mut rng, x);
            }
            (0..MC_BATCHES_PER_CHAIN)
                .map(|_| {
                    let mut acc = vec![Complex64::new(0.0, 0.0); n_max + 1];
                    for _ in 0..per_batch {
                        x = step(&mut rng, x);
                        let z = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x);
                        let mut p = Complex64::new(1.0, 0.0);
                        for a in acc.iter_mut() {
                            *a += p;
                            p *= z;
                        }
                    }
                    acc.into_iter().map(|a| a / per_batch as f64).collect()
                })
                .collect()
        })
        .collect();

    let batches: Vec<&Vec<Complex64>> = chains.iter().flatten().collect();
    let mut fourier = FourierVector::zeros(n_max);
    let mut stderr = vec![0.0; dim];
    for n in 0..=n_max {
        let re: Vec<f64> = batches.iter().map(|b| b[n].re).collect();
        let im: Vec<f64> = batches.iter().map(|b| b[n].im).collect();
        let mean = Complex64::new(
            re.iter().sum::<f64>() / re.len() as f64,
            im.iter().sum::<f64>() / im.len() as f64,
        );
        let se = std_error(&re).hypot(std_error(&im));
        let c = if n == 0 { Complex64::new(1.0, 0.0) } else { mean };
        fourier.set(n as i64, c);
        fourier.set(-(n as i64), c.conj());
        stderr[n_max + n] = if n == 0 { 0.0 } else { se };
        stderr[n_max - n] = stderr[n_max + n];
    }
    Ok(MeasureEstimate::new(
        fourier,
        Some(stderr),
        (0.0, 1.0),
        MeasureMeta {
            source: MeasureSource::MonteCarlo,
            energy: Some(energy),
            lambda,
            seed: Some(seed),
            frame: Some(frame),
            work: per_batch * MC_BATCHES_PER_CHAIN * MC_CHAINS,
        },
    ))
}
