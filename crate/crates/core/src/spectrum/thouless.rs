//! The Thouless formula L(E) = ∫ log|E − E′| d𝒩(E′), its inverse through the
//! Hilbert transform, Halperin's Hölder exponent and an empirical modulus
//! of continuity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ids::{free_ids, free_lyapunov};
use super::SpectrumError;
use crate::stats::{fit_line, LineFit};

/// Mass allowed outside the sampled window.
pub const SUPPORT_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThoulessDirection {
    NToL,
    LToN,
}

/// Both directions, evaluated on the input grid.
pub fn thouless(data: &[(f64, f64)], direction: ThoulessDirection) -> Result<Vec<(f64, f64)>, SpectrumError> {
    match direction {
        ThoulessDirection::NToL => {
            let energies: Vec<f64> = data.iter().map(|p| p.0).collect();
            lyapunov_from_ids(data, &energies)
        }
        ThoulessDirection::LToN => ids_from_lyapunov(data),
    }
}

fn check_grid(data: &[(f64, f64)]) -> Result<(), SpectrumError> {
    if data.len() < 3 {
        return Err(SpectrumError::InvalidParameters("need at least 3 grid points".into()));
    }
    if data.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(SpectrumError::InvalidParameters(
            "energies must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// ∫_a^b log|t| dt = F(b) − F(a) with F(t) = t log|t| − t.
fn log_primitive(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.abs().ln() - t
    }
}

/// L at arbitrary energies: d𝒩 is spread uniformly over each grid cell and
/// the log kernel is integrated exactly on every cell.
pub fn lyapunov_from_ids(ids: &[(f64, f64)], energies: &[f64]) -> Result<Vec<(f64, f64)>, SpectrumError> {
    check_grid(ids)?;
    let first = ids[0].1;
    let last = ids[ids.len() - 1].1;
    if last < 1.0 - SUPPORT_TOLERANCE || first > SUPPORT_TOLERANCE {
        return Err(SpectrumError::SupportTruncated {
            n_min: first,
            n_max: last,
        });
    }
    Ok(energies
        .iter()
        .map(|&e| {
            let l: f64 = ids
                .windows(2)
                .map(|w| {
                    let ((a, na), (b, nb)) = (w[0], w[1]);
                    (nb - na) / (b - a) * (log_primitive(b - e) - log_primitive(a - e))
                })
                .sum();
            (e, l)
        })
        .collect())
}

/// N = N₀ − (1/π)·H[L − L₀] with H the Hilbert transform on the window
/// (PV by singularity subtraction, trapezoid weights, cosine taper on the
/// outer 5% of the window).
pub fn ids_from_lyapunov(data: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, SpectrumError> {
    check_grid(data)?;
    let n = data.len();
    let xs: Vec<f64> = data.iter().map(|p| p.0).collect();
    let (a, b) = (xs[0], xs[n - 1]);
    let width = b - a;
    let taper = |x: f64| {
        let edge = 0.05 * width;
        let d = (x - a).min(b - x);
        if d >= edge {
            1.0
        } else {
            0.5 * (1.0 - (PI * d / edge).cos())
        }
    };
    let u: Vec<f64> = data.iter().map(|&(x, l)| (l - free_lyapunov(x)) * taper(x)).collect();
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { xs[i] - xs[i - 1] } else { 0.0 };
            let right = if i + 1 < n { xs[i + 1] - xs[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let deriv = |i: usize| {
        if i == 0 {
            (u[1] - u[0]) / (xs[1] - xs[0])
        } else if i == n - 1 {
            (u[n - 1] - u[n - 2]) / (xs[n - 1] - xs[n - 2])
        } else {
            (u[i + 1] - u[i - 1]) / (xs[i + 1] - xs[i - 1])
        }
    };
    Ok((0..n)
        .map(|i| {
            let x = xs[i];
            let mut pv: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| weights[j] * (u[j] - u[i]) / (x - xs[j]))
                .sum();
            pv -= weights[i] * deriv(i);
            if u[i] != 0.0 {
                pv += u[i] * ((x - a) / (b - x)).ln();
            }
            let hilbert = pv / PI;
            (x, free_ids(x) - hilbert / PI)
        })
        .collect())
}

/// α₀ = 2 log 2 / arccosh(1 + λ).
pub fn halperin_alpha(lambda: f64) -> f64 {
    2.0 * std::f64::consts::LN_2 / (1.0 + lambda).acosh()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub alpha_hat: f64,
    pub r_squared: f64,
    /// (scale, oscillation) pairs entering the fit.
    pub points: Vec<(f64, f64)>,
}

/// Slope of log osc(N; I) against log |I|, with osc over all windows of
/// width |I| anchored at grid points (N linearly interpolated).
pub fn holder_probe(ids: &[(f64, f64)], window_scales: &[f64]) -> Result<HolderFit, SpectrumError> {
    check_grid(ids)?;
    let xs: Vec<f64> = ids.iter().map(|p| p.0).collect();
    let span = xs[xs.len() - 1] - xs[0];
    let min_step = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let interp = |x: f64| {
        let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[j - 1], xs[j]);
        let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        ids[j - 1].1 * (1.0 - t) + ids[j].1 * t
    };
    let mut points = Vec::new();
    for &s in window_scales {
        if !(s >= min_step * (1.0 - 1e-12) && s <= span / 2.0) {
            continue;
        }
        let osc = ids
            .iter()
            .filter(|p| p.0 + s <= xs[xs.len() - 1] + 1e-12)
            .map(|p| (interp(p.0 + s) - p.1).abs())
            .fold(0.0, f64::max);
        if osc > 0.0 {
            points.push((s, osc));
        }
    }
    if points.len() < 4 {
        return Err(SpectrumError::InsufficientResolution(points.len()));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let LineFit { slope, r_squared, .. } =
        fit_line(&lx, &ly).ok_or(SpectrumError::InsufficientResolution(points.len()))?;
    Ok(HolderFit {
        alpha_hat: slope,
        r_squared,
        points,
    })
}

/// Dyadic window widths span·2^{−j}, j = 1..=count.
pub fn dyadic_scales(span: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| span / 2f64.powi(j as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_data(lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .map(|i| {
                let e = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                (e, free_ids(e))
            })
            .collect()
    }

    #[test]
    fn free_laplacian_potential() {
        let data = free_data(-2.5, 2.5, 1001);
        let l = lyapunov_from_ids(&data, &[-1.5, 0.0, 0.7, 1.9, 3.0]).unwrap();
        for &(e, v) in &l[..4] {
            assert!(v.abs() < 1e-2, "L({e}) = {v}");
        }
        assert!((l[4].1 - 1.5f64.acosh()).abs() < 1e-2);
    }

    #[test]
    fn truncated_support_is_rejected() {
        let data = free_data(-1.0, 1.0, 50);
        assert!(matches!(
            thouless(&data, ThoulessDirection::NToL),
            Err(SpectrumError::SupportTruncated { .. })
        ));
    }

    #[test]
    fn free_inverse_returns_free_ids() {
        let data: Vec<(f64, f64)> = free_data(-3.0, 3.0, 601)
            .into_iter()
            .map(|(e, _)| (e, free_lyapunov(e)))
            .collect();
        let n = thouless(&data, ThoulessDirection::LToN).unwrap();
        for (e, v) in n {
            assert!((v - free_ids(e)).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_smeared_spectrum() {
        // N = free IDS convolved with a uniform kernel of half-width 0.3.
        let w = 0.3;
        let smeared = |e: f64| {
            let k = 200;
            (0..k)
                .map(|j| free_ids(e - w + 2.0 * w * (j as f64 + 0.5) / k as f64))
                .sum::<f64>()
                / k as f64
        };
        let data: Vec<(f64, f64)> = (0..801)
            .map(|i| {
                let e = -4.0 + 8.0 * i as f64 / 800.0;
                (e, smeared(e))
            })
            .collect();
        let l = thouless(&data, ThoulessDirection::NToL).unwrap();
        let back = thouless(&l, ThoulessDirection::LToN).unwrap();
        for ((e, n0), (_, n1)) in data.iter().zip(&back) {
            if e.abs() < 3.0 {
                assert!((n0 - n1).abs() < 2e-2, "E = {e}: {n0} vs {n1}");
            }
        }
    }

    #[test]
    fn halperin_values() {
        assert!((halperin_alpha(5f64.sqrt() - 2.0) - 2.0557).abs() < 1e-3);
        assert!((halperin_alpha(1.0) - 1.0527).abs() < 1e-4);
        assert!(halperin_alpha(0.1) > halperin_alpha(0.2));
    }

    #[test]
    fn holder_synthetic() {
        let lin: Vec<(f64, f64)> = (0..257).map(|i| (i as f64 / 256.0, i as f64 / 256.0)).collect();
        let fit = holder_probe(&lin, &dyadic_scales(1.0, 7)).unwrap();
        assert!((fit.alpha_hat - 1.0).abs() < 0.05);
        let step: Vec<(f64, f64)> = (0..257)
            .map(|i| (i as f64 / 256.0, if i < 128 { 0.0 } else { 1.0 }))
            .collect();
        let fit = holder_probe(&step, &dyadic_scales(1.0, 7)).unwrap();
        assert!(fit.alpha_hat.abs() < 0.05);
        assert!(matches!(
            holder_probe(&lin, &[0.5, 0.25]),
            Err(SpectrumError::InsufficientResolution(2))
        ));
    }
}
