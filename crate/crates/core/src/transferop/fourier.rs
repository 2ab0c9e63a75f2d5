//! Trigonometric polynomials on ℝ/ℤ in the basis e(nx) = exp(2πinx).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Coefficients ĉ_n for |n| ≤ n_max, stored at index n + n_max.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierVector {
    n_max: usize,
    coeffs: Vec<Complex64>,
}

impl FourierVector {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n_max + 1],
        }
    }

    /// Panics unless `coeffs.len()` is odd.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient vector must have odd length");
        Self {
            n_max: coeffs.len() / 2,
            coeffs,
        }
    }

    pub fn constant(n_max: usize, c: f64) -> Self {
        let mut v = Self::zeros(n_max);
        v.set(0, Complex64::new(c, 0.0));
        v
    }

    /// The single mode e(nx).
    pub fn mode(n_max: usize, n: i64) -> Self {
        let mut v = Self::zeros(n_max);
        v.set(n, Complex64::new(1.0, 0.0));
        v
    }

    /// Coefficients of a real function from M equispaced samples on [0, 1)
    /// (trapezoid rule, exact for degree < M/2).
    pub fn from_samples(values: &[f64], n_max: usize) -> Self {
        let m = values.len();
        assert!(m > 2 * n_max, "need more samples than modes");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        let coeffs = (-(n_max as i64)..=n_max as i64)
            .map(|n| buf[n.rem_euclid(m as i64) as usize] * scale)
            .collect();
        Self { n_max, coeffs }
    }

    /// Samples `f` on M equispaced points and expands.
    pub fn from_fn(f: impl Fn(f64) -> f64, n_max: usize, m: usize) -> Self {
        let values: Vec<f64> = (0..m).map(|j| f(j as f64 / m as f64)).collect();
        Self::from_samples(&values, n_max)
    }

    /// Random real trigonometric polynomial supported on `lo ≤ |n| ≤ hi`,
    /// Gaussian coefficients, unit ℓ² norm.
    pub fn random_real<R: Rng>(rng: &mut R, n_max: usize, lo: usize, hi: usize) -> Self {
        let mut sample = || rng.sample::<f64, _>(StandardNormal);
        let mut v = Self::zeros(n_max);
        for n in lo.max(1)..=hi.min(n_max) {
            let c = Complex64::new(sample(), sample());
            v.set(n as i64, c);
            v.set(-(n as i64), c.conj());
        }
        if lo == 0 {
            v.set(0, Complex64::new(sample(), 0.0));
        }
        let norm = v.l2_norm();
        if norm > 0.0 {
            v.scale_mut(1.0 / norm);
        }
        v
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// ĉ_n, zero outside the stored range.
    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.n_max as i64) as usize]
        }
    }

    pub fn set(&mut self, n: i64, c: Complex64) {
        let i = (n + self.n_max as i64) as usize;
        self.coeffs[i] = c;
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.n_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - off, c))
    }

    /// Zero-pad or truncate to a new cutoff.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut out = Self::zeros(n_max);
        let m = n_max.min(self.n_max) as i64;
        for n in -m..=m {
            out.set(n, self.get(n));
        }
        out
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖f‖_{H^s} with weight (1 + (2πn)²)^{s/2}.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.modes()
            .map(|(n, c)| hs_weight(n, s).powi(2) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ℓ² mass on |n| ≥ `from`.
    pub fn tail_norm(&self, from: usize) -> f64 {
        self.modes()
            .filter(|(n, _)| n.unsigned_abs() as usize >= from)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Zero every mode with |n| < k.
    pub fn project_out_low(&self, k: usize) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if (i as i64 - self.n_max as i64).unsigned_abs() < k as u64 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// d/dθ with θ = πx: ĉ_n ↦ 2in·ĉ_n.
    pub fn d_theta(&self) -> Self {
        let mut out = self.clone();
        for (n, c) in self.modes() {
            out.set(n, c * Complex64::new(0.0, 2.0 * n as f64));
        }
        out
    }

    /// Multiply by sin²(πx) = ½ − (e(x) + e(−x))/4; the cutoff grows by one.
    pub fn mul_sin_sq(&self) -> Self {
        let mut out = Self::zeros(self.n_max + 1);
        for (n, c) in self.modes() {
            out.coeffs[(n + out.n_max as i64) as usize] += c * 0.5;
            out.coeffs[(n + 1 + out.n_max as i64) as usize] -= c * 0.25;
            out.coeffs[(n - 1 + out.n_max as i64) as usize] -= c * 0.25;
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let n_max = self.n_max.max(o.n_max);
        let mut out = self.resized(n_max);
        for (n, c) in o.modes() {
            out.coeffs[(n + n_max as i64) as usize] += c;
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    fn scale_mut(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// Real parts of f on the grid j/G, j = 0..G, by inverse FFT (G > 2·n_max).
    pub fn eval_grid(&self, g: usize) -> Vec<f64> {
        assert!(g > 2 * self.n_max, "grid too coarse for the cutoff");
        let mut buf = vec![Complex64::new(0.0, 0.0); g];
        for (n, c) in self.modes() {
            buf[n.rem_euclid(g as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(g).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.modes()
            .map(|(n, c)| c * Complex64::from_polar(1.0, 2.0 * PI * n as f64 * x))
            .sum()
    }

    /// Default dense grid for sup norms: 4(2·n_max + 1) points.
    pub fn sup_grid_size(&self) -> usize {
        4 * (2 * self.n_max + 1)
    }

    /// sup |f| on the dense grid.
    pub fn sup_norm(&self) -> f64 {
        self.eval_grid(self.sup_grid_size())
            .into_iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// sup f − inf f on the dense grid.
    pub fn oscillation(&self) -> f64 {
        let vals = self.eval_grid(self.sup_grid_size());
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo
    }

    /// Largest |ĉ_n − conj(ĉ_{−n})|; zero for real functions.
    pub fn hermitian_defect(&self) -> f64 {
        self.modes()
            .map(|(n, c)| (c - self.get(-n).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// (1 + (2πn)²)^{s/2}
pub fn hs_weight(n: i64, s: f64) -> f64 {
    (1.0 + (2.0 * PI * n as f64).powi(2)).powf(s / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn samples_round_trip() {
        let f = |x: f64| 1.0 + (2.0 * PI * 3.0 * x).cos() - 0.5 * (2.0 * PI * 5.0 * x).sin();
        let v = FourierVector::from_fn(f, 8, 64);
        assert!((v.get(0).re - 1.0).abs() < 1e-14);
        assert!((v.get(3) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((v.get(5) - Complex64::new(0.0, 0.25)).norm() < 1e-14);
        let grid = v.eval_grid(40);
        for (j, g) in grid.iter().enumerate() {
            assert!((g - f(j as f64 / 40.0)).abs() < 1e-13);
        }
        assert!(v.hermitian_defect() < 1e-15);
    }

    #[test]
    fn hs_norm_of_mode() {
        let e = FourierVector::mode(16, 5);
        for s in [1.0, 2.0] {
            let expect = (1.0 + (10.0 * PI).powi(2)).powf(s / 2.0);
            assert!((e.hs_norm(s) / expect - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sin_squared_multiplication() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = FourierVector::random_real(&mut rng, 10, 0, 10);
        let g = f.mul_sin_sq();
        for x in [0.1, 0.37, 0.8] {
            let s = (PI * x).sin().powi(2);
            assert!((g.eval(x) - f.eval(x) * s).norm() < 1e-13);
        }
    }

    #[test]
    fn theta_derivative() {
        // f = cos(2θ) = cos(2πx) ⇒ f′(θ) = −2 sin(2θ)
        let f = FourierVector::from_fn(|x| (2.0 * PI * x).cos(), 4, 32);
        let d = f.d_theta();
        let x: f64 = 0.2;
        assert!((d.eval(x).re + 2.0 * (2.0 * PI * x).sin()).abs() < 1e-13);
    }

    #[test]
    fn random_real_is_hermitian_unit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = FourierVector::random_real(&mut rng, 32, 5, 20);
        assert!((f.l2_norm() - 1.0).abs() < 1e-14);
        assert!(f.hermitian_defect() < 1e-15);
        assert_eq!(f.get(4), Complex64::new(0.0, 0.0));
        assert_eq!(f.get(21), Complex64::new(0.0, 0.0));
    }
}
