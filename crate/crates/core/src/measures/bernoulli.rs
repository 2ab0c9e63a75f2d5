//! Bernoulli convolutions ν_λ, the law of Σ_{n≥0} ±λⁿ, through the cosine
//! product ν̂_λ(ξ) = ∏ cos(2πλⁿξ).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MeasureError, MeasureEstimate, MeasureMeta, MeasureSource};
use crate::transferop::FourierVector;

pub const MAX_TERMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliValue {
    pub value: f64,
    /// Bound on |ν̂ − value| from the neglected factors.
    pub tail_bound: f64,
    pub terms: usize,
}

fn check_lambda(lambda: f64) -> Result<(), MeasureError> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(MeasureError::InvalidParameters(format!("λ = {lambda} not in (0, 1)")))
    }
}

/// Smallest index T with λ^T ≤ 10⁻¹⁶ and 2π|ξ|λ^T ≤ 10⁻¹⁶, capped at
/// [`MAX_TERMS`].
pub fn default_terms(lambda: f64, xi: f64) -> usize {
    let scale = (2.0 * PI * xi.abs()).max(1.0);
    let t = ((1e-16f64).ln() - scale.ln()) / lambda.ln();
    (t.ceil().max(0.0) as usize).min(MAX_TERMS)
}

/// ∏_{n=0}^{terms} cos(2πλⁿξ), with the tail bound exp(S/2) − 1 where
/// S = Σ_{n>terms} (2πλⁿξ)².
pub fn bernoulli_fourier_with(lambda: f64, xi: f64, terms: usize) -> Result<BernoulliValue, MeasureError> {
    check_lambda(lambda)?;
    let mut value = 1.0;
    let mut p = 1.0;
    for _ in 0..=terms {
        value *= (2.0 * PI * p * xi).cos();
        p *= lambda;
    }
    let s = (2.0 * PI * xi * p).powi(2) / (1.0 - lambda * lambda);
    Ok(BernoulliValue {
        value,
        tail_bound: (s / 2.0).exp_m1(),
        terms,
    })
}

pub fn bernoulli_fourier(lambda: f64, xi: f64) -> Result<BernoulliValue, MeasureError> {
    bernoulli_fourier_with(lambda, xi, default_terms(lambda, xi))
}

/// |ν̂_λ(λ^{−k})| for k = 0..=k_max.
pub fn pisot_nondecay_probe(lambda: f64, k_max: u32) -> Result<Vec<f64>, MeasureError> {
    (0..=k_max)
        .map(|k| bernoulli_fourier(lambda, lambda.powi(-(k as i32))).map(|v| v.value.abs()))
        .collect()
}

/// ν_λ on its support [−s, s], s = 1/(1 − λ), mapped to t = (x + s)/(2s):
/// the coefficients are (−1)ⁿ ν̂_λ(n/(2s)).
pub fn bernoulli_estimate(lambda: f64, n_max: usize) -> Result<MeasureEstimate, MeasureError> {
    check_lambda(lambda)?;
    let s = 1.0 / (1.0 - lambda);
    let period = 2.0 * s;
    let mut fourier = FourierVector::zeros(n_max);
    for n in 0..=n_max as i64 {
        let v = bernoulli_fourier(lambda, n as f64 / period)?.value;
        let c = Complex64::new(if n % 2 == 0 { v } else { -v }, 0.0);
        fourier.set(n, c);
        fourier.set(-n, c);
    }
    fourier.set(0, Complex64::new(1.0, 0.0));
    Ok(MeasureEstimate::new(
        fourier,
        None,
        (-s, s),
        MeasureMeta {
            source: MeasureSource::ProductFormula,
            energy: None,
            lambda,
            seed: None,
            frame: None,
            work: n_max + 1,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinc4(xi: f64) -> f64 {
        (4.0 * PI * xi).sin() / (4.0 * PI * xi)
    }

    #[test]
    fn half_is_uniform_on_minus_two_two() {
        for xi in [0.3, 1.7, 5.25] {
            let v = bernoulli_fourier(0.5, xi).unwrap();
            assert!((v.value - sinc4(xi)).abs() < 1e-10);
            assert!(v.tail_bound < 1e-20);
        }
        assert_eq!(bernoulli_fourier(0.5, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn truncation_bound_holds() {
        let exact = sinc4(0.3);
        for t in [2, 5, 10] {
            let v = bernoulli_fourier_with(0.5, 0.3, t).unwrap();
            assert!((v.value - exact).abs() <= v.tail_bound + 1e-15);
        }
    }

    #[test]
    fn dyadic_probe_decays() {
        let p = pisot_nondecay_probe(0.5, 12).unwrap();
        assert_eq!(p.len(), 13);
        assert!(p[12] <= 1e-3);
        assert!((p[0] - sinc4(1.0).abs()).abs() < 1e-12);
    }

    #[test]
    fn uniform_estimate_histogram() {
        let nu = bernoulli_estimate(0.5, 64).unwrap();
        assert_eq!(nu.support, (-2.0, 2.0));
        // Interior bins of the uniform law on [−2, 2] are flat.
        let mid = &nu.histogram[256..768];
        for m in mid {
            assert!((m * 1024.0 - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn bad_lambda() {
        assert!(bernoulli_fourier(1.0, 0.2).is_err());
        assert!(bernoulli_estimate(0.0, 8).is_err());
    }
}
