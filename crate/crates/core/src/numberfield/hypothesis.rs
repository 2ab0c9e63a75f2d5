//! Arithmetic hypotheses on the coupling: degree and height bounds,
//! large conjugates, the Pisot property, and the explicit diophantine floor.

use serde::{Deserialize, Serialize};

use super::algebraic::{conjugates, AlgebraicNumber, Irreducibility};
use super::NumberFieldError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub lambda: f64,
    pub degree: usize,
    pub degree_bound: f64,
    pub degree_ok: bool,
    pub height: u64,
    /// (1/λ)^C
    pub height_bound: f64,
    pub height_ok: bool,
    pub max_conjugate_modulus: f64,
    /// Some conjugate has |λ'| ≥ 1.
    pub conjugate_ok: bool,
    /// Some conjugate of 2λ has modulus ≥ 2 (equivalent to `conjugate_ok`).
    pub brenner_ok: bool,
    /// Some conjugate has |λ'| ≥ 2 (the parabolic-parameter-λ form).
    pub strong_conjugate_ok: bool,
    pub pisot: bool,
    pub irreducibility: Irreducibility,
}

impl HypothesisReport {
    /// Degree, height and conjugate conditions together.
    pub fn all_ok(&self) -> bool {
        self.degree_ok && self.height_ok && self.conjugate_ok && self.brenner_ok
    }
}

/// N = a_d, so that Nλ is an algebraic integer.
pub fn integrality_scale(alpha: &AlgebraicNumber) -> u64 {
    alpha.leading().unsigned_abs()
}

pub fn hypothesis_check(alpha: &AlgebraicNumber, c: f64) -> Result<HypothesisReport, NumberFieldError> {
    let lambda = alpha.value();
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(NumberFieldError::OutOfUnitInterval(lambda));
    }
    let roots = conjugates(alpha)?;
    let max_mod = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let degree = alpha.degree();
    let height = alpha.height();
    let height_bound = (1.0 / lambda).powf(c);
    Ok(HypothesisReport {
        lambda,
        degree,
        degree_bound: c,
        degree_ok: (degree as f64) < c,
        height,
        height_bound,
        height_ok: (height as f64) < height_bound,
        max_conjugate_modulus: max_mod,
        conjugate_ok: max_mod >= 1.0,
        brenner_ok: roots.iter().any(|z| (2.0 * z).norm() >= 2.0),
        strong_conjugate_ok: max_mod >= 2.0,
        pisot: pisot_check(alpha)?,
        irreducibility: alpha.irreducibility(),
    })
}

/// True iff λ⁻¹ is a Pisot number.
pub fn pisot_check(alpha: &AlgebraicNumber) -> Result<bool, NumberFieldError> {
    let lambda = alpha.value();
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(NumberFieldError::OutOfUnitInterval(lambda));
    }
    // x^d P(1/x) has leading coefficient a₀; with content 1 it is monic up
    // to sign exactly when |a₀| = 1.
    if alpha.coeffs()[0].unsigned_abs() != 1 {
        return Ok(false);
    }
    let roots = conjugates(alpha)?;
    // Reciprocal conjugates lie strictly inside the unit disk iff |λⱼ| > 1.
    Ok(roots.iter().skip(1).all(|z| z.norm() > 1.0))
}

/// A positive real carried in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogScalar {
    pub ln: f64,
    /// value = mantissa · 10^exponent with 1 ≤ mantissa < 10.
    pub mantissa: f64,
    pub exponent: i64,
    /// Double approximation (may underflow to 0).
    pub approx: f64,
}

impl LogScalar {
    pub fn from_ln(ln: f64) -> Self {
        let log10 = ln / std::f64::consts::LN_10;
        let exponent = log10.floor() as i64;
        Self {
            ln,
            mantissa: 10f64.powf(log10 - exponent as f64),
            exponent,
            approx: ln.exp(),
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

/// Certified lower bound N^{-dD}·[(2+R)(1+H)]^{-2ℓ(d-1)} with D = 2ℓ on
/// ‖w − 1‖ for nontrivial words of length ≤ ℓ.
pub fn diophantine_floor(alpha: &AlgebraicNumber, r: u64, ell: u64) -> LogScalar {
    let d = alpha.degree() as f64;
    let n = integrality_scale(alpha) as f64;
    let h = alpha.height() as f64;
    let big_d = 2.0 * ell as f64;
    let ln = -d * big_d * n.ln() - 2.0 * ell as f64 * (d - 1.0) * ((2.0 + r as f64) * (1.0 + h)).ln();
    LogScalar::from_ln(ln)
}

#[cfg(test)]
mod tests {
    use super::super::algebraic::real_root_f64;
    use super::*;

    fn sqrt5m2() -> AlgebraicNumber {
        real_root_f64(&[-1, 4, 1], 0.2, 0.3).unwrap()
    }

    #[test]
    fn integrality_examples() {
        assert_eq!(integrality_scale(&sqrt5m2()), 1);
        assert_eq!(integrality_scale(&real_root_f64(&[-1, 2], 0.4, 0.6).unwrap()), 2);
        let a = real_root_f64(&[-1, -1, 3], 0.7, 0.8).unwrap();
        assert_eq!(integrality_scale(&a), 3);
        // μ = 3λ satisfies μ² − μ − 3 = 0
        let mu = 3.0 * a.value();
        assert!((mu * mu - mu - 3.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt5_report_all_true() {
        let r = hypothesis_check(&sqrt5m2(), 3.0).unwrap();
        assert!(r.degree_ok && r.height_ok && r.conjugate_ok && r.brenner_ok && r.pisot);
        assert!(r.strong_conjugate_ok);
        assert!((r.max_conjugate_modulus - 4.2360680).abs() < 1e-6);
    }

    #[test]
    fn rational_third_has_no_large_conjugate() {
        let a = real_root_f64(&[-1, 3], 0.3, 0.4).unwrap();
        let r = hypothesis_check(&a, 3.0).unwrap();
        assert!(!r.conjugate_ok && !r.brenner_ok);
    }

    #[test]
    fn degree_bound_is_strict() {
        let a = real_root_f64(&[-1, 2], 0.4, 0.6).unwrap();
        assert!(!hypothesis_check(&a, 1.0).unwrap().degree_ok);
    }

    #[test]
    fn pisot_examples() {
        assert!(pisot_check(&sqrt5m2()).unwrap());
        assert!(pisot_check(&real_root_f64(&[-1, 2], 0.4, 0.6).unwrap()).unwrap());
        assert!(!pisot_check(&real_root_f64(&[-2, 3], 0.6, 0.7).unwrap()).unwrap());
        // 1/φ: x² + x − 1
        assert!(pisot_check(&real_root_f64(&[-1, 1, 1], 0.6, 0.7).unwrap()).unwrap());
    }

    #[test]
    fn pisot_independent_of_interval() {
        let a = real_root_f64(&[-1, 4, 1], 0.2, 0.3).unwrap();
        let b = real_root_f64(&[-1, 4, 1], 0.01, 0.9).unwrap();
        assert_eq!(pisot_check(&a).unwrap(), pisot_check(&b).unwrap());
    }

    #[test]
    fn floor_examples() {
        // N^{-dD}·[(2+R)(1+H)]^{-2ℓ(d-1)} with d = 2, N = 1, H = 4, R = 4, ℓ = 3
        let f = diophantine_floor(&sqrt5m2(), 4, 3);
        assert!((f.ln - (-6.0 * 30f64.ln())).abs() < 1e-9);
        assert!((f.approx / 30f64.powi(-6) - 1.0).abs() < 1e-9);
        let g = diophantine_floor(&sqrt5m2(), 4, 6);
        assert!((g.ln - 2.0 * f.ln).abs() < 1e-9);
        let third = real_root_f64(&[-1, 3], 0.3, 0.4).unwrap();
        let h = diophantine_floor(&third, 7, 5);
        assert!((h.ln - (-10.0 * 3f64.ln())).abs() < 1e-12);
        assert!((g.approx / 30f64.powi(-12) - 1.0).abs() < 1e-9);
        let m = LogScalar::from_ln(-12.0 * 30f64.ln());
        assert!(m.mantissa >= 1.0 && m.mantissa < 10.0);
        assert_eq!(m.exponent, -18);
    }
}
