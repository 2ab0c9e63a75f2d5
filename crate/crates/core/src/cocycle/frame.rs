//! Transfer matrices of the Anderson–Bernoulli cocycle, the parabolic pair
//! they generate, and the Figotin–Pastur frame in which they become
//! perturbed rotations.

use serde::{Deserialize, Serialize};

use super::{CocycleError, Mat2, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// g± = [[E ± λ, −1], [1, 0]].
pub fn transfer_matrix(energy: f64, lambda: f64, sign: Sign) -> Mat2<f64> {
    Mat2::new(energy + sign.factor() * lambda, -1.0, 1.0, 0.0)
}

/// Transfer matrix over an arbitrary scalar domain.
pub fn transfer_matrix_in<T: Scalar>(energy: &T, lambda: &T, sign: Sign) -> Mat2<T> {
    let diag = match sign {
        Sign::Plus => energy.add(lambda),
        Sign::Minus => energy.sub(lambda),
    };
    Mat2::new(diag, energy.one_like().neg(), energy.one_like(), energy.zero_like())
}

/// h₁ = g₊g₋⁻¹ and h₂ = g₊⁻¹g₋, checked against [[1, 2λ], [0, 1]] and
/// [[1, 0], [2λ, 1]].
pub fn parabolic_pair<T: Scalar>(energy: &T, lambda: &T) -> Result<(Mat2<T>, Mat2<T>), CocycleError> {
    let gp = transfer_matrix_in(energy, lambda, Sign::Plus);
    let gm = transfer_matrix_in(energy, lambda, Sign::Minus);
    let h1 = gp.mul(&gm.inverse_unimodular());
    let h2 = gp.inverse_unimodular().mul(&gm);
    let two_lambda = lambda.add(lambda);
    let one = energy.one_like();
    let zero = energy.zero_like();
    let h1_closed = Mat2::new(one.clone(), two_lambda.clone(), zero.clone(), one.clone());
    let h2_closed = Mat2::new(one.clone(), zero, two_lambda, one);
    if !h1.approx_eq(&h1_closed, 1e-12) || !h2.approx_eq(&h2_closed, 1e-12) {
        return Err(CocycleError::IdentityMismatch);
    }
    Ok((h1, h2))
}

/// Parabolic generators A = [[1, μ], [0, 1]], B = [[1, 0], [μ, 1]].
pub fn parabolic_generators<T: Scalar>(mu: &T) -> (Mat2<T>, Mat2<T>) {
    let one = mu.one_like();
    let zero = mu.zero_like();
    (
        Mat2::new(one.clone(), mu.clone(), zero.clone(), one.clone()),
        Mat2::new(one.clone(), zero, mu.clone(), one),
    )
}

/// Figotin–Pastur frame at energy E = 2 cos κ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FpFrame {
    pub energy: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub s: Mat2<f64>,
    pub s_inv: Mat2<f64>,
    pub g_plus_tilde: Mat2<f64>,
    pub g_minus_tilde: Mat2<f64>,
    /// ‖S‖·‖S⁻¹‖
    pub conditioning: f64,
}

impl FpFrame {
    /// rotation(κ) ± λ·[[1, cot κ], [0, 0]]
    pub fn closed_form(&self, sign: Sign) -> Mat2<f64> {
        let (s, c) = self.kappa.sin_cos();
        let l = sign.factor() * self.lambda;
        Mat2::rotation(self.kappa).add(&Mat2::new(l, l * c / s, 0.0, 0.0))
    }

    pub fn tilde(&self, sign: Sign) -> &Mat2<f64> {
        match sign {
            Sign::Plus => &self.g_plus_tilde,
            Sign::Minus => &self.g_minus_tilde,
        }
    }
}

pub fn fp_frame(energy: f64, lambda: f64) -> Result<FpFrame, CocycleError> {
    if !(energy.abs() < 2.0) {
        return Err(CocycleError::EnergyOutOfRange(energy));
    }
    let kappa = (energy / 2.0).acos();
    let (sk, ck) = kappa.sin_cos();
    let scale = sk.sqrt().recip();
    let s = Mat2::new(1.0, -ck, 0.0, sk).scale(scale);
    let s_inv = s.inverse_unimodular();
    let conj = |sign| s.mul(&transfer_matrix(energy, lambda, sign)).mul(&s_inv);
    let frame = FpFrame {
        energy,
        lambda,
        kappa,
        g_plus_tilde: conj(Sign::Plus),
        g_minus_tilde: conj(Sign::Minus),
        conditioning: s.norm() * s_inv.norm(),
        s,
        s_inv,
    };
    // Rounding in S·g·S⁻¹ grows like the conditioning of S.
    let tol = 1e-12 * frame.conditioning.max(1.0);
    for sign in [Sign::Plus, Sign::Minus] {
        if !frame.tilde(sign).approx_eq(&frame.closed_form(sign), tol) {
            return Err(CocycleError::IdentityMismatch);
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{real_root_f64, FieldElement, NumberField};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn transfer_examples() {
        assert_eq!(transfer_matrix(0.0, 0.0, Sign::Plus), Mat2::new(0.0, -1.0, 1.0, 0.0));
        let l = 5f64.sqrt() - 2.0;
        let g = transfer_matrix(0.5, l, Sign::Plus);
        assert!((g.a - 0.7360680).abs() < 1e-7);
        for k in 0..100 {
            let e = -3.0 + 0.06 * k as f64;
            let lam = 0.013 * k as f64;
            assert_eq!(transfer_matrix(e, lam, Sign::Minus).det(), 1.0);
        }
    }

    #[test]
    fn parabolic_pair_in_doubles() {
        let (h1, h2) = parabolic_pair(&0.0, &0.0).unwrap();
        assert!(h1.approx_eq(&Mat2::identity(), 0.0) && h2.approx_eq(&Mat2::identity(), 0.0));
        let l = 5f64.sqrt() - 2.0;
        let (a, _) = parabolic_pair(&0.37, &l).unwrap();
        let (b, _) = parabolic_pair(&-1.2, &l).unwrap();
        assert!((a.b - 0.4721360).abs() < 1e-7);
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn parabolic_pair_exact() {
        let k = NumberField::new(&real_root_f64(&[-1, 4, 1], 0.2, 0.3).unwrap());
        let lam = FieldElement::generator(&k);
        let e = FieldElement::from_rational(&k, BigRational::new(BigInt::from(37), BigInt::from(100)));
        let (h1, _) = parabolic_pair(&e, &lam).unwrap();
        assert_eq!(h1.b, lam.add(&lam));
    }

    #[test]
    fn frame_examples() {
        let l = 0.1;
        let f = fp_frame(0.0, l).unwrap();
        assert!((f.kappa - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(f.s.approx_eq(&Mat2::identity(), 1e-15));
        assert!(f.g_plus_tilde.approx_eq(&Mat2::new(l, -1.0, 1.0, 0.0), 1e-15));

        let f = fp_frame(1.0, l).unwrap();
        assert!((f.kappa - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert!(f.g_minus_tilde.approx_eq(&f.closed_form(Sign::Minus), 1e-12));

        let f = fp_frame(1.99, l).unwrap();
        assert!((f.kappa.sin() - 0.0999).abs() < 1e-3);
        assert!(f.conditioning > 10.0);
        assert!(f.s.det() - 1.0 < 1e-12);

        assert!(matches!(fp_frame(2.0, l), Err(CocycleError::EnergyOutOfRange(_))));
    }

    #[test]
    fn frame_perturbation_size() {
        // ‖g̃± − R(κ)‖ = λ·‖[[1, cot κ], [0, 0]]‖ = λ / sin κ
        let l = 0.05;
        for k in 1..40 {
            let e = -1.9 + 3.8 * k as f64 / 40.0;
            let f = fp_frame(e, l).unwrap();
            let diff = f.g_plus_tilde.add(&Mat2::rotation(f.kappa).scale(-1.0)).norm();
            assert!(diff <= l / f.kappa.sin() * (1.0 + 1e-9));
        }
    }
}
