//! Energy derivatives of T_E^ℓ Φ_E through the chain-rule expansion, with a
//! finite-difference cross-check and second-order nested terms.

use serde::{Deserialize, Serialize};

use super::lyapunov::{dphi_de_fourier, phi_fourier};
use super::SpectrumError;
use crate::stats::{fit_line, LineFit};
use crate::transferop::{build_operator, power_orbit, FourierVector, Frame, OperatorMatrix, Variant};

/// Step of the centered difference in E.
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedTerm {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeProbe {
    pub energy: f64,
    pub lambda: f64,
    pub order: usize,
    pub ell: usize,
    pub h: f64,
    /// ‖∂_E(T^j Φ_E)‖∞ from the expansion, j = 0..=ℓ.
    pub expansion_sup: Vec<f64>,
    /// Grid mean of ∂_E(T^ℓ Φ_E).
    pub expansion_mean: f64,
    /// ‖expansion − centered difference‖∞ at j = ℓ.
    pub finite_difference_error: f64,
    /// ‖(T^m Φ_E)′‖∞, m = 0..=ℓ.
    pub phi_derivative_sup: Vec<f64>,
    /// Terms T^{m₁}(sin²θ (T^{m₂}(sin²θ (T^{m₃}Φ_E)′))′), order 2 only.
    pub nested: Vec<NestedTerm>,
    /// log sup vs m₂ + m₃.
    pub nested_fit: Option<LineFit>,
}

/// (T − I/3) f, the part of T whose maps depend on E.
fn moving_part(op: &OperatorMatrix, f: &FourierVector) -> FourierVector {
    op.apply(f).sub(&f.scaled(1.0 / 3.0))
}

/// f′ sin²θ, truncated back to the operator cutoff.
fn sin_sq_derivative(f: &FourierVector, n_max: usize) -> FourierVector {
    f.d_theta().mul_sin_sq().resized(n_max)
}

/// ∂_E(T^ℓ Φ_E) via
/// T^ℓ ∂_EΦ_E − Σ_{m=1}^{ℓ} T^{ℓ−m}(T − I/3)[(T^{m−1}Φ_E)′ sin²θ]
/// using ∂_E τ_g = −sin²τ_g for g = g±; the identity letter carries no E.
pub fn energy_derivative_probe(
    energy: f64,
    lambda: f64,
    order: usize,
    ell: usize,
    n_max: usize,
    quadrature: usize,
) -> Result<DerivativeProbe, SpectrumError> {
    if !(1..=2).contains(&order) {
        return Err(SpectrumError::InvalidParameters(format!(
            "derivative order {order} not in 1..=2"
        )));
    }
    let build = |e: f64| build_operator(e, lambda, n_max, quadrature, Variant::Plain, Frame::Raw);
    let op = build(energy)?;
    let m = quadrature.max(4 * (2 * n_max + 1));
    let phi = phi_fourier(energy, lambda, n_max, m);
    let orbit = power_orbit(&op, &phi, ell);

    let mut d = dphi_de_fourier(energy, lambda, n_max, m);
    let mut expansion_sup = vec![d.sup_norm()];
    for j in 1..=ell {
        let src = sin_sq_derivative(&orbit.iterates[j - 1], n_max);
        d = op.apply(&d).sub(&moving_part(&op, &src));
        expansion_sup.push(d.sup_norm());
    }

    let h = FD_STEP;
    let shifted = |e: f64| -> Result<FourierVector, SpectrumError> {
        let o = build(e)?;
        let p = phi_fourier(e, lambda, n_max, m);
        Ok(power_orbit(&o, &p, ell).last().clone())
    };
    let fd = shifted(energy + h)?.sub(&shifted(energy - h)?).scaled(0.5 / h);
    let finite_difference_error = d.sub(&fd).sup_norm();

    let phi_derivative_sup = orbit.iterates.iter().map(|f| f.d_theta().sup_norm()).collect();

    let (nested, nested_fit) = if order == 2 {
        let terms: Vec<NestedTerm> = (0..=ell)
            .map(|s| {
                let m2 = s / 2;
                let m3 = s - m2;
                let m1 = ell - s;
                let inner = sin_sq_derivative(&orbit.iterates[m3], n_max);
                let mid = power_orbit(&op, &inner, m2).last().clone();
                let outer = sin_sq_derivative(&mid, n_max);
                let sup = power_orbit(&op, &outer, m1).last().sup_norm();
                NestedTerm { m1, m2, m3, sup }
            })
            .collect();
        let xs: Vec<f64> = terms.iter().map(|t| (t.m2 + t.m3) as f64).collect();
        let ys: Vec<f64> = terms.iter().map(|t| t.sup.max(f64::MIN_POSITIVE).ln()).collect();
        let fit = fit_line(&xs, &ys);
        (terms, fit)
    } else {
        (Vec::new(), None)
    };

    Ok(DerivativeProbe {
        energy,
        lambda,
        order,
        ell,
        h,
        expansion_sup,
        expansion_mean: d.get(0).re,
        finite_difference_error,
        phi_derivative_sup,
        nested,
        nested_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_difference_quotient() {
        let l = 5f64.sqrt() - 2.0;
        let p = energy_derivative_probe(0.5, l, 1, 8, 48, 1024).unwrap();
        assert!(p.finite_difference_error < 1e-6, "{}", p.finite_difference_error);
        assert_eq!(p.expansion_sup.len(), 9);
    }

    #[test]
    fn free_case_mean_vanishes() {
        let e = 2.0 * (std::f64::consts::PI * (3.0 - 5f64.sqrt()) / 2.0).cos();
        let p = energy_derivative_probe(e, 0.0, 1, 200, 32, 512).unwrap();
        assert!(p.expansion_mean.abs() < 1e-6);
    }

    #[test]
    fn nested_terms_shrink() {
        let l = 5f64.sqrt() - 2.0;
        let p = energy_derivative_probe(0.5, l, 2, 12, 48, 1024).unwrap();
        assert_eq!(p.nested.len(), 13);
        assert!(p.nested_fit.unwrap().slope < 0.0);
        assert!(energy_derivative_probe(0.5, l, 3, 4, 16, 256).is_err());
    }
}
