//! The projective action of SL₂(ℝ) on P¹(ℝ) ≅ [0, 1), x ↔ θ = πx.

use serde::{Deserialize, Serialize};

use super::Mat2;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ProjectivePoint(f64);

impl ProjectivePoint {
    pub fn new(x: f64) -> Self {
        Self(wrap_unit(x))
    }

    pub fn x(self) -> f64 {
        self.0
    }

    pub fn theta(self) -> f64 {
        std::f64::consts::PI * self.0
    }
}

/// Reduce into [0, 1).
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Image coordinate and derivative of the projective map at `x`.
///
/// With v = (cos θ, sin θ), `g·v = (u, w)`; the image angle is atan2(w, u)
/// reduced mod π and τ′ = 1/(u² + w²).
#[inline]
pub fn project(g: &Mat2<f64>, x: f64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::PI * x).sin_cos();
    let u = g.a * c + g.b * s;
    let w = g.c * c + g.d * s;
    let y = w.atan2(u) * std::f64::consts::FRAC_1_PI;
    (wrap_unit(y), 1.0 / (u * u + w * w))
}

pub fn mobius_angle(g: &Mat2<f64>, p: ProjectivePoint) -> ProjectivePoint {
    ProjectivePoint(project(g, p.0).0)
}

/// τ′_g at `p`; the derivative is the same in θ and in x.
pub fn mobius_derivative(g: &Mat2<f64>, p: ProjectivePoint) -> f64 {
    project(g, p.0).1
}

/// Signed difference y − x lifted to (−1/2, 1/2].
pub fn circle_diff(y: f64, x: f64) -> f64 {
    let d = (y - x).rem_euclid(1.0);
    if d > 0.5 {
        d - 1.0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl2() -> impl Strategy<Value = Mat2<f64>> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_filter_map("singular", |(a, b, c)| {
            // choose d so that ad − bc = 1
            if a.abs() < 0.2 {
                None
            } else {
                Some(Mat2::new(a, b, c, (1.0 + b * c) / a))
            }
        })
    }

    #[test]
    fn identity_and_rotation() {
        for x in [0.0, 0.1, 0.5, 0.77] {
            let p = ProjectivePoint::new(x);
            assert!(circle_diff(mobius_angle(&Mat2::identity(), p).x(), x).abs() < 1e-15);
            assert!((mobius_derivative(&Mat2::identity(), p) - 1.0).abs() < 1e-15);
            let k = 1.1;
            let y = mobius_angle(&Mat2::rotation(k), p).x();
            assert!(circle_diff(y, x + k / std::f64::consts::PI).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_fixed_point_and_tight_sandwich() {
        let g = Mat2::new(2.0, 0.0, 0.0, 0.5);
        let y = mobius_angle(&g, ProjectivePoint::new(0.5)).x();
        assert!(circle_diff(y, 0.5).abs() < 1e-15);
        // tan θ ↦ tan θ / 4
        let y = mobius_angle(&g, ProjectivePoint::new(0.25)).x();
        assert!(circle_diff(y, 0.25f64.atan() / std::f64::consts::PI).abs() < 1e-15);
        let dx = mobius_derivative(&g, ProjectivePoint::new(0.0));
        assert!((dx - 0.25).abs() < 1e-15);
        assert!((dx - g.norm().powi(-2)).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn derivative_matches_finite_difference(g in sl2(), x in 0.0f64..1.0) {
            let h = 1e-6;
            let fd = circle_diff(
                mobius_angle(&g, ProjectivePoint::new(x + h)).x(),
                mobius_angle(&g, ProjectivePoint::new(x - h)).x(),
            ) / (2.0 * h);
            let an = mobius_derivative(&g, ProjectivePoint::new(x));
            prop_assert!((fd - an).abs() <= 1e-5 * an);
        }

        #[test]
        fn action_is_a_cocycle(g in sl2(), h in sl2(), x in 0.0f64..1.0) {
            let p = ProjectivePoint::new(x);
            let lhs = mobius_angle(&g.mul(&h), p).x();
            let rhs = mobius_angle(&g, mobius_angle(&h, p)).x();
            prop_assert!(circle_diff(lhs, rhs).abs() < 1e-10);
            let dl = mobius_derivative(&g.mul(&h), p);
            let dr = mobius_derivative(&g, mobius_angle(&h, p)) * mobius_derivative(&h, p);
            prop_assert!((dl - dr).abs() <= 1e-8 * dl);
        }

        #[test]
        fn result_stays_in_unit_interval(g in sl2(), x in -3.0f64..3.0) {
            let y = mobius_angle(&g, ProjectivePoint::new(x)).x();
            prop_assert!((0.0..1.0).contains(&y));
        }
    }
}
