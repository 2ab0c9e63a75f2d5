//! Measured smoothing curves: boundedness of T^m, decay on high modes,
//! Sobolev envelopes, decay of derivatives of T^ℓ f, and deviation from the
//! stationary mean.

use serde::{Deserialize, Serialize};

use super::{
    build_operator, power_orbit, FourierVector, Frame, OperatorMatrix, TransferOpError, Variant, LEAK_TOLERANCE,
};
use crate::measures::MeasureEstimate;
use crate::seeds::task_rng;
use crate::spectrum::phi_fourier;
use crate::stats::fit_line;

/// y ≈ amplitude · e^{−rate·x}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub rate: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares of log y on x over the strictly positive ys.
pub fn exp_fit(xs: &[f64], ys: &[f64]) -> Option<ExpFit> {
    let (px, py): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > 0.0 && y.is_finite())
        .map(|(&x, &y)| (x, y.ln()))
        .unzip();
    let line = fit_line(&px, &py)?;
    Some(ExpFit {
        rate: -line.slope,
        amplitude: line.intercept.exp(),
        r_squared: line.r_squared,
        points: line.points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Level the curve settles to; the fit is of ys − floor.
    pub floor: f64,
    pub fit: Option<ExpFit>,
}

impl DecayCurve {
    fn new(label: impl Into<String>, ys: Vec<f64>, floor: f64) -> Self {
        let xs: Vec<f64> = (0..ys.len()).map(|m| m as f64).collect();
        let shifted: Vec<f64> = ys.iter().map(|y| y - floor).collect();
        let fit = exp_fit(&xs, &shifted);
        Self {
            label: label.into(),
            xs,
            ys,
            floor,
            fit,
        }
    }

    /// ys[b] / ys[a].
    pub fn ratio(&self, a: usize, b: usize) -> f64 {
        self.ys[b] / self.ys[a]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub n_max: usize,
    pub quadrature: usize,
    /// Lemma 2 test functions live on 2^k < |n| ≤ n_max/2.
    pub ks: Vec<u32>,
    pub m_max: usize,
    /// Random test functions per curve.
    pub samples: usize,
    pub seed: u64,
    /// Sobolev orders for the envelope curves.
    pub sobolev: Vec<f64>,
    /// Sobolev order of the derivative curve.
    pub derivative_sobolev: f64,
    pub ell_max: usize,
    /// Test function of the derivative curve (Φ_E when absent).
    pub f: Option<FourierVector>,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            n_max: 256,
            quadrature: 4096,
            ks: vec![3, 4, 5],
            m_max: 60,
            samples: 8,
            seed: 0,
            sobolev: vec![1.0, 2.0],
            derivative_sobolev: 1.0,
            ell_max: 30,
            f: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub energy: f64,
    pub lambda: f64,
    /// sup over samples of ‖T^m f‖₂/‖f‖₂.
    pub boundedness: DecayCurve,
    /// Mean over samples of ‖T^m f‖₂/‖f‖₂ for f on |n| > 2^k, one per k.
    pub high_mode_decay: Vec<(u32, DecayCurve)>,
    /// sup over samples of ‖T^m f‖_{H^s}/‖f‖_{H^s}, one per s; the floor
    /// is the settled level C‖f‖₂/‖f‖_{H^s}.
    pub sobolev_envelope: Vec<(f64, DecayCurve)>,
    /// ‖(T^ℓ f)′‖∞ in the raw frame.
    pub derivative_sup: DecayCurve,
    /// ‖(T^ℓ f)′‖_{H^s} in the raw frame.
    pub derivative_sobolev: DecayCurve,
    /// Some high-mode curve keeps at least half its mass.
    pub no_gap: bool,
    pub max_leakage: f64,
}

fn sample(params: &SmoothingParams, tag: &str, i: usize, lo: usize) -> FourierVector {
    let mut rng = task_rng(params.seed, tag, i as u64);
    FourierVector::random_real(&mut rng, params.n_max, lo, params.n_max / 2)
}

pub fn smoothing_suite(energy: f64, lambda: f64, params: &SmoothingParams) -> Result<SmoothingReport, TransferOpError> {
    let largest = params.ks.iter().copied().max().unwrap_or(0);
    if params.n_max < 1usize << (largest + 2) || params.samples == 0 || params.m_max == 0 {
        return Err(TransferOpError::InvalidParameters(format!(
            "n_max = {} must be ≥ 2^(k+2) for k = {largest}, with samples and m_max positive",
            params.n_max
        )));
    }
    let tilde = build_operator(
        energy,
        lambda,
        params.n_max,
        params.quadrature,
        Variant::Plain,
        Frame::Tilde,
    )?;
    let raw = build_operator(
        energy,
        lambda,
        params.n_max,
        params.quadrature,
        Variant::Plain,
        Frame::Raw,
    )?;
    let m = params.m_max;
    let mut leak: f64 = 0.0;

    let mut bound = vec![0.0f64; m + 1];
    let mut sob = vec![vec![0.0f64; m + 1]; params.sobolev.len()];
    let mut sob_floor = vec![0.0f64; params.sobolev.len()];
    for i in 0..params.samples {
        let f = sample(params, "smoothing_bounded", i, 0);
        let orbit = power_orbit(&tilde, &f, m);
        leak = leak.max(orbit.max_leakage());
        let base = f.l2_norm();
        for (j, g) in orbit.iterates.iter().enumerate() {
            bound[j] = bound[j].max(g.l2_norm() / base);
        }
        for (si, &s) in params.sobolev.iter().enumerate() {
            let hs = f.hs_norm(s);
            for (j, g) in orbit.iterates.iter().enumerate() {
                sob[si][j] = sob[si][j].max(g.hs_norm(s) / hs);
            }
            sob_floor[si] = sob_floor[si].max(orbit.last().hs_norm(s) / hs);
        }
    }
    let boundedness = DecayCurve::new("sup ||T^m f||_2 / ||f||_2", bound, 0.0);
    let sobolev_envelope = params
        .sobolev
        .iter()
        .zip(sob)
        .zip(sob_floor)
        .map(|((&s, ys), floor)| {
            // Fit the transient above the settled level.
            let floor = floor * (1.0 - 1e-9);
            (s, DecayCurve::new(format!("||T^m f||_H{s} / ||f||_H{s}"), ys, floor))
        })
        .collect();

    let mut high_mode_decay = Vec::new();
    let mut no_gap = false;
    for &k in &params.ks {
        let lo = (1usize << k) + 1;
        let mut acc = vec![0.0f64; m + 1];
        for i in 0..params.samples {
            let f = sample(params, &format!("smoothing_high_{k}"), i, lo);
            let orbit = power_orbit(&tilde, &f, m);
            leak = leak.max(orbit.max_leakage());
            let base = f.l2_norm();
            for (j, g) in orbit.iterates.iter().enumerate() {
                acc[j] += g.l2_norm() / base / params.samples as f64;
            }
        }
        if acc[m] >= 0.5 * acc[0] {
            no_gap = true;
        }
        high_mode_decay.push((k, DecayCurve::new(format!("||T^m f||_2, |n| > 2^{k}"), acc, 0.0)));
    }

    let f = match &params.f {
        Some(f) => f.resized(params.n_max),
        None => phi_fourier(energy, lambda, params.n_max, params.quadrature),
    };
    let orbit = power_orbit(&raw, &f, params.ell_max);
    leak = leak.max(orbit.max_leakage());
    let derivative_sup = DecayCurve::new(
        "||(T^l f)'||_inf",
        orbit.iterates.iter().map(|g| g.d_theta().sup_norm()).collect(),
        0.0,
    );
    let s = params.derivative_sobolev;
    let derivative_sobolev = DecayCurve::new(
        format!("||(T^l f)'||_H{s}"),
        orbit.iterates.iter().map(|g| g.d_theta().hs_norm(s)).collect(),
        0.0,
    );

    Ok(SmoothingReport {
        energy,
        lambda,
        boundedness,
        high_mode_decay,
        sobolev_envelope,
        derivative_sup,
        derivative_sobolev,
        no_gap,
        max_leakage: leak,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationDecay {
    /// ⟨ν, f⟩.
    pub mean: f64,
    /// d_ℓ = ‖T^ℓ f − ⟨ν, f⟩‖∞, ℓ = 0..=ℓ_max.
    pub values: Vec<f64>,
    pub fit: Option<ExpFit>,
}

/// Sup-distance of T^ℓ f from the stationary mean of f.
pub fn deviation_decay(
    op: &OperatorMatrix,
    f: &FourierVector,
    ell_max: usize,
    nu: &MeasureEstimate,
) -> Result<DeviationDecay, TransferOpError> {
    if nu.meta.frame.is_some_and(|fr| fr != op.meta.frame) {
        return Err(TransferOpError::InvalidParameters(
            "measure and operator live in different frames".into(),
        ));
    }
    let f = f.resized(op.n_max());
    let mean = nu.pair(&f).re;
    let orbit = power_orbit(op, &f, ell_max);
    if let Some((step, &leakage)) = orbit.leakage.iter().enumerate().find(|(_, &l)| l > LEAK_TOLERANCE) {
        return Err(TransferOpError::TruncationLeak { step, leakage });
    }
    let shift = FourierVector::constant(op.n_max(), mean);
    let values: Vec<f64> = orbit.iterates.iter().map(|g| g.sub(&shift).sup_norm()).collect();
    let xs: Vec<f64> = (0..values.len()).map(|l| l as f64).collect();
    let fit = exp_fit(&xs, &values);
    Ok(DeviationDecay { mean, values, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::furstenberg_fixed_point;
    use num_complex::Complex64;

    #[test]
    fn exp_fit_recovers_rate() {
        let xs: Vec<f64> = (0..10).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (-0.7 * x).exp()).collect();
        let fit = exp_fit(&xs, &ys).unwrap();
        assert!((fit.rate - 0.7).abs() < 1e-12);
        assert!((fit.amplitude - 3.0).abs() < 1e-12);
        assert!(exp_fit(&xs, &vec![0.0; 10]).is_none());
    }

    fn small() -> SmoothingParams {
        SmoothingParams {
            n_max: 64,
            quadrature: 1024,
            ks: vec![3],
            m_max: 20,
            samples: 2,
            ell_max: 10,
            ..SmoothingParams::default()
        }
    }

    #[test]
    fn resonant_free_case_has_no_gap() {
        let r = smoothing_suite(0.0, 0.0, &small()).unwrap();
        assert!(r.no_gap);
        assert!(r.boundedness.ys.iter().all(|&y| y <= 1.0 + 1e-9));
    }

    #[test]
    fn coupled_case_decays() {
        let r = smoothing_suite(0.5, 5f64.sqrt() - 2.0, &small()).unwrap();
        assert!(!r.no_gap);
        let c = &r.high_mode_decay[0].1;
        assert!(c.ys[20] < c.ys[0]);
        assert!(r.derivative_sup.ratio(5, 10) < 1.0);
        assert_eq!(r.sobolev_envelope.len(), 2);
        assert!(smoothing_suite(0.5, 0.2, &SmoothingParams { ks: vec![5], ..small() }).is_err());
    }

    #[test]
    fn single_mode_norm_is_monotone() {
        let op = build_operator(0.7, 0.05, 64, 1024, Variant::Plain, Frame::Tilde).unwrap();
        let f = FourierVector::mode(64, 9);
        let orbit = power_orbit(&op, &f, 20);
        for w in orbit.iterates.windows(2) {
            assert!(w[1].l2_norm() <= w[0].l2_norm() + 1e-6);
        }
    }

    #[test]
    fn deviation_of_constants_and_free_rotation() {
        let op = build_operator(0.7, 0.0, 32, 512, Variant::Plain, Frame::Tilde).unwrap();
        let nu = furstenberg_fixed_point(&op).unwrap();
        let d = deviation_decay(&op, &FourierVector::constant(32, 2.0), 10, &nu).unwrap();
        assert!(d.values.iter().all(|&v| v < 1e-12));

        let kappa = (0.7f64 / 2.0).acos();
        let r = ((Complex64::new(1.0, 0.0) + 2.0 * Complex64::from_polar(1.0, 2.0 * kappa)) / 3.0).norm();
        let d = deviation_decay(&op, &FourierVector::mode(32, 1), 10, &nu).unwrap();
        for (l, v) in d.values.iter().enumerate() {
            assert!((v / r.powi(l as i32) - 1.0).abs() < 1e-3, "{l}: {v}");
        }
    }
}
