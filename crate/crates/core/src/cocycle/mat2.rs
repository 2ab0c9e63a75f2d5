use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::numberfield::FieldElement;

/// Scalars that 2×2 matrices can be built over.
pub trait Scalar: Clone + Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Equality; exact domains ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for FieldElement {
    fn add(&self, other: &Self) -> Self {
        FieldElement::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        FieldElement::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        FieldElement::mul(self, other)
    }
    fn neg(&self) -> Self {
        FieldElement::neg(self)
    }
    fn zero_like(&self) -> Self {
        FieldElement::zero(self.field())
    }
    fn one_like(&self) -> Self {
        FieldElement::one(self.field())
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn to_f64(&self) -> f64 {
        FieldElement::to_f64(self)
    }
}

/// A 2×2 matrix [[a, b], [c, d]].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity_like(x: &T) -> Self {
        Self::new(x.one_like(), x.zero_like(), x.zero_like(), x.one_like())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn det(&self) -> T {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// Inverse of a unit-determinant matrix (the adjugate).
    pub fn inverse_unimodular(&self) -> Self {
        Self::new(self.d.clone(), self.b.neg(), self.c.neg(), self.a.clone())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.a.neg(), self.b.neg(), self.c.neg(), self.d.neg())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a.sub(&o.a), self.b.sub(&o.b), self.c.sub(&o.c), self.d.sub(&o.d))
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.a.approx_eq(&o.a, tol)
            && self.b.approx_eq(&o.b, tol)
            && self.c.approx_eq(&o.c, tol)
            && self.d.approx_eq(&o.d, tol)
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }
}

impl Mat2<f64> {
    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn rotation(kappa: f64) -> Self {
        let (s, c) = kappa.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    /// Spectral norm (largest singular value).
    pub fn norm(&self) -> f64 {
        let fro2 = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.a * self.d - self.b * self.c;
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
        (0.5 * (fro2 + disc.sqrt())).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// |det − 1| ≤ 10⁻¹⁰·‖g‖².
    pub fn is_unimodular(&self) -> bool {
        let n = self.norm();
        (self.det() - 1.0).abs() <= 1e-10 * n * n.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let g = Mat2::new(2.0, 0.0, 0.0, 0.5);
        assert!((g.norm() - 2.0).abs() < 1e-15);
        assert!((Mat2::rotation(0.3).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_of_unimodular() {
        let g = Mat2::new(1.5, -1.0, 1.0, 0.0);
        let p = g.mul(&g.inverse_unimodular());
        assert!(p.approx_eq(&Mat2::identity(), 1e-15));
    }
}
