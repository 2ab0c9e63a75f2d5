//! Restricted operator norms ‖Q_K A Q_K‖ on the modes |n| ≥ K.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{galerkin_average, OperatorMatrix, Variant};
use super::TransferOpError;
use crate::cocycle::{expander_family, Mat2};
use crate::numberfield::AlgebraicNumber;

pub const POWER_TOLERANCE: f64 = 1e-6;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedNorm {
    pub k: usize,
    pub n_max: usize,
    pub norm: f64,
    pub iterations: usize,
    /// Same estimate on the n_max/2 truncation.
    pub half_size_norm: f64,
    /// |norm − half_size_norm|
    pub sensitivity: f64,
}

impl RestrictedNorm {
    pub fn gap(&self) -> f64 {
        1.0 - self.norm
    }
}

/// Operator norm of Q_K A Q_K by power iteration on (Q_K A Q_K)*(Q_K A Q_K),
/// plus the same estimate at half the cutoff.
pub fn restricted_norm(a: &OperatorMatrix, k: usize) -> Result<RestrictedNorm, TransferOpError> {
    let n_max = a.n_max();
    if 2 * k >= n_max {
        return Err(TransferOpError::InvalidParameters(format!(
            "K = {k} must be below n_max/2 = {}",
            n_max / 2
        )));
    }
    let (norm, iterations) = q_norm(a.entries(), n_max, k)?;
    let half = a.truncated(n_max / 2);
    let (half_size_norm, _) = q_norm(half.entries(), n_max / 2, k)?;
    Ok(RestrictedNorm {
        k,
        n_max,
        norm,
        iterations,
        half_size_norm,
        sensitivity: (norm - half_size_norm).abs(),
    })
}

/// Restricted norms over a list of K values.
pub fn restricted_norm_scan(a: &OperatorMatrix, ks: &[usize]) -> Result<Vec<RestrictedNorm>, TransferOpError> {
    ks.iter().map(|&k| restricted_norm(a, k)).collect()
}

/// Power iteration for the largest singular value of the block |n|, |n′| ≥ K.
pub fn q_norm(entries: &DMatrix<Complex64>, n_max: usize, k: usize) -> Result<(f64, usize), TransferOpError> {
    let keep: Vec<usize> = (0..2 * n_max + 1)
        .filter(|&i| (i as i64 - n_max as i64).unsigned_abs() as usize >= k)
        .collect();
    if keep.is_empty() {
        return Ok((0.0, 0));
    }
    let b = entries.select_rows(&keep).select_columns(&keep);
    let dim = keep.len();
    // Deterministic start with no special symmetry.
    let mut v = DVector::from_fn(dim, |i, _| {
        Complex64::new(1.0 + 0.5 * (i as f64 * 0.7).sin(), 0.3 * (i as f64 * 1.3).cos())
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut sigma_sq = 0.0;
    for it in 1..=POWER_MAX_ITERATIONS {
        let bv = &b * &v;
        let w = b.ad_mul(&bv);
        let rayleigh = bv.norm_squared();
        let wn = w.norm();
        if wn == 0.0 {
            return Ok((0.0, it));
        }
        let residual = (&w - &v * Complex64::new(rayleigh, 0.0)).norm();
        let settled = (rayleigh - sigma_sq).abs() <= POWER_TOLERANCE * rayleigh;
        sigma_sq = rayleigh;
        v = w / Complex64::new(wn, 0.0);
        if settled && residual <= POWER_TOLERANCE * rayleigh {
            return Ok((sigma_sq.sqrt(), it));
        }
    }
    Err(TransferOpError::PowerIterationStall {
        iterations: POWER_MAX_ITERATIONS,
    })
}

/// Spectral radius of the Hermitian part of the block |n|, |n′| ≥ K, by a
/// dense eigensolver. Symmetrised averages have clustered top spectra on
/// which power iteration crawls.
pub fn hermitian_q_norm(entries: &DMatrix<Complex64>, n_max: usize, k: usize) -> f64 {
    let keep: Vec<usize> = (0..2 * n_max + 1)
        .filter(|&i| (i as i64 - n_max as i64).unsigned_abs() as usize >= k)
        .collect();
    if keep.is_empty() {
        return 0.0;
    }
    let b = entries.select_rows(&keep).select_columns(&keep);
    let h = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpanderNorm {
    pub family_size: usize,
    pub k: usize,
    pub norm: f64,
    /// Whether the (asymptotic) 1/2 bound is already met at this R.
    pub below_half: bool,
}

/// ‖Q_K (1/2R)Σ_r (ρ_{g_r} + ρ_{g_r⁻¹}) Q_K‖ for an explicit family.
pub fn expander_average_norm_for(
    family: &[Mat2<f64>],
    k: usize,
    n_max: usize,
    quadrature: usize,
) -> Result<ExpanderNorm, TransferOpError> {
    if family.is_empty() {
        return Err(TransferOpError::InvalidParameters("empty family".into()));
    }
    if 2 * k >= n_max {
        return Err(TransferOpError::InvalidParameters(format!(
            "K = {k} must be below n_max/2 = {}",
            n_max / 2
        )));
    }
    let maps: Vec<Mat2<f64>> = family
        .iter()
        .flat_map(|g| [g.clone(), g.inverse_unimodular()])
        .collect();
    let (entries, _) = galerkin_average(&maps, 0.0, n_max, quadrature, Variant::Unitary)?;
    let norm = hermitian_q_norm(&entries, n_max, k);
    Ok(ExpanderNorm {
        family_size: family.len(),
        k,
        norm,
        below_half: norm < 0.5,
    })
}

/// [`expander_average_norm_for`] over the family g_r, r ≤ ⌊λ^{−τ}⌋.
pub fn expander_average_norm(
    alpha: &AlgebraicNumber,
    tau: f64,
    k: usize,
    n_max: usize,
    quadrature: usize,
) -> Result<ExpanderNorm, TransferOpError> {
    let family = expander_family(alpha, tau)?;
    expander_average_norm_for(&family, k, n_max, quadrature)
}
