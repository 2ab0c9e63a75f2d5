//! Furstenberg measures of the Bernoulli cocycle on the projective line and
//! classical Bernoulli convolutions on ℝ, with Fourier-decay diagnostics.

mod bernoulli;
mod furstenberg;
mod smoothness;

pub use bernoulli::{
    bernoulli_estimate, bernoulli_fourier, bernoulli_fourier_with, default_terms, pisot_nondecay_probe, BernoulliValue,
    MAX_TERMS,
};
pub use furstenberg::{
    furstenberg_fixed_point, furstenberg_fixed_point_at, furstenberg_mc, stationarity_residual,
    FIXED_POINT_MAX_ITERATIONS, FIXED_POINT_TOLERANCE, MC_CHAINS,
};
pub use smoothness::{density_smoothness_probe, BlockEnergy, DensityVerdict, SmoothnessReport};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transferop::{FourierVector, Frame, TransferOpError};

pub const HISTOGRAM_BINS: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("fixed-point iteration did not converge after {iterations} iterations (last change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },
    #[error("only {0} dyadic blocks available (need 4)")]
    InsufficientCutoff(usize),
    #[error(transparent)]
    TransferOp(#[from] TransferOpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSource {
    FixedPoint,
    MonteCarlo,
    ProductFormula,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureMeta {
    pub source: MeasureSource,
    pub energy: Option<f64>,
    pub lambda: f64,
    pub seed: Option<u64>,
    pub frame: Option<Frame>,
    /// Power iterations (fixed point) or recorded samples (Monte Carlo).
    pub work: usize,
}

/// Fourier coefficients ν̂(n) = ∫ e(−n t) dν(t) in the unit-interval
/// coordinate t, and a Fejér-smoothed histogram over `support`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub fourier: FourierVector,
    /// Per-coefficient standard errors (Monte Carlo only).
    pub stderr: Option<Vec<f64>>,
    pub histogram: Vec<f64>,
    /// Real interval mapped affinely onto t ∈ [0, 1).
    pub support: (f64, f64),
    pub meta: MeasureMeta,
}

impl MeasureEstimate {
    pub(crate) fn new(
        fourier: FourierVector,
        stderr: Option<Vec<f64>>,
        support: (f64, f64),
        meta: MeasureMeta,
    ) -> Self {
        let histogram = fejer_histogram(&fourier, HISTOGRAM_BINS);
        Self {
            fourier,
            stderr,
            histogram,
            support,
            meta,
        }
    }

    /// ν̂(n), zero beyond the stored cutoff.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.fourier.get(n)
    }

    /// ⟨ν, f⟩ = Σ f̂(n) ν̂(−n).
    pub fn pair(&self, f: &FourierVector) -> Complex64 {
        f.modes().map(|(n, c)| c * self.fourier.get(-n)).sum()
    }

    /// Bin edges and masses, one row per bin.
    pub fn histogram_csv(&self) -> String {
        let (a, b) = self.support;
        let w = (b - a) / self.histogram.len() as f64;
        let mut out = String::from("lo,hi,mass\n");
        for (i, m) in self.histogram.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", a + w * i as f64, a + w * (i + 1) as f64, m));
        }
        out
    }
}

/// Bin masses of the Fejér mean Σ (1 − |n|/(N+1)) ν̂(n) e(n t), integrated
/// exactly over each bin and normalized to total mass 1.
pub fn fejer_histogram(fourier: &FourierVector, bins: usize) -> Vec<f64> {
    let n_max = fourier.n_max() as i64;
    let width = 1.0 / bins as f64;
    let mut masses: Vec<f64> = (0..bins)
        .map(|i| {
            let a = i as f64 * width;
            fourier
                .modes()
                .map(|(n, c)| {
                    let fejer = 1.0 - n.unsigned_abs() as f64 / (n_max + 1) as f64;
                    // ν̂(n) = ∫ e(−n t) dν, so the density is Σ ν̂(n) e(n t).
                    let integral = if n == 0 {
                        Complex64::new(width, 0.0)
                    } else {
                        let w = 2.0 * PI * n as f64;
                        (Complex64::from_polar(1.0, w * (a + width)) - Complex64::from_polar(1.0, w * a))
                            / Complex64::new(0.0, w)
                    };
                    (c * integral * fejer).re
                })
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    let total: f64 = masses.iter().sum();
    if total > 0.0 {
        for m in &mut masses {
            *m /= total;
        }
    }
    masses
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_histogram_is_flat() {
        let h = fejer_histogram(&FourierVector::constant(16, 1.0), 64);
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for m in h {
            assert!((m - 1.0 / 64.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_histogram_concentrates() {
        // ν = δ_{0.3}: ν̂(n) = e(−0.3 n)
        let mut f = FourierVector::zeros(64);
        for n in -64i64..=64 {
            f.set(n, Complex64::from_polar(1.0, -2.0 * PI * 0.3 * n as f64));
        }
        let h = fejer_histogram(&f, 100);
        let peak = h
            .iter()
            .cloned()
            .enumerate()
            .fold((0, 0.0), |b, (i, m)| if m > b.1 { (i, m) } else { b });
        assert!(peak.0 == 29 || peak.0 == 30);
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
