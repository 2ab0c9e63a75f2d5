//! Exact arithmetic in ℚ(λ) = ℚ[x]/(P), power basis 1, λ, …, λ^{d-1}.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::algebraic::AlgebraicNumber;
use super::poly::{rational_to_f64, QPoly};
use super::NumberFieldError;

#[derive(Debug, PartialEq)]
pub struct NumberField {
    /// Monic modulus P/a_d.
    modulus: QPoly,
    degree: usize,
    generator_value: f64,
}

impl NumberField {
    pub fn new(alpha: &AlgebraicNumber) -> Arc<Self> {
        let p = alpha.min_poly();
        let lead = p.leading().unwrap().clone();
        Arc::new(Self {
            modulus: p.scale(&(BigRational::one() / lead)),
            degree: alpha.degree(),
            generator_value: alpha.value(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    /// Float value of λ under the real embedding fixed by the isolating interval.
    pub fn generator_value(&self) -> f64 {
        self.generator_value
    }
}

#[derive(Clone, PartialEq)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl FieldElement {
    pub fn from_coords(field: &Arc<NumberField>, coords: Vec<BigRational>) -> Self {
        let reduced = QPoly::new(coords).rem(&field.modulus);
        Self::from_poly(field, reduced)
    }

    fn from_poly(field: &Arc<NumberField>, p: QPoly) -> Self {
        let mut coords = p.coeffs().to_vec();
        coords.resize(field.degree, BigRational::zero());
        Self {
            field: Arc::clone(field),
            coords,
        }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        let mut coords = vec![BigRational::zero(); field.degree];
        coords[0] = q;
        Self {
            field: Arc::clone(field),
            coords,
        }
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 1)
    }

    /// The generator λ itself.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_coords(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    fn poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    fn check_field(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "field elements from different number fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let prod = self.poly().mul(&other.poly()).rem(&self.field.modulus);
        Self::from_poly(&self.field, prod)
    }

    /// Inverse via the extended Euclidean algorithm against the modulus.
    pub fn inv(&self) -> Result<Self, NumberFieldError> {
        if self.is_zero() {
            return Err(NumberFieldError::DivisionByZero);
        }
        // Invariant: s_i · a ≡ r_i (mod P).
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.poly());
        let (mut s0, mut s1) = (QPoly::zero(), QPoly::new(vec![BigRational::one()]));
        while r1.degree().is_some_and(|d| d > 0) {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r1.is_zero() {
            // gcd(a, P) nontrivial: P was not irreducible.
            return Err(NumberFieldError::DivisionByZero);
        }
        let c = r1.coeffs()[0].clone();
        Ok(Self::from_poly(
            &self.field,
            s1.scale(&(BigRational::one() / c)).rem(&self.field.modulus),
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, NumberFieldError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Value under an embedding λ ↦ `root` (real or complex).
    pub fn embed(&self, root: num_complex::Complex64) -> num_complex::Complex64 {
        self.coords
            .iter()
            .rev()
            .fold(num_complex::Complex64::zero(), |acc, c| acc * root + rational_to_f64(c))
    }

    pub fn to_f64(&self) -> f64 {
        self.embed(num_complex::Complex64::new(self.field.generator_value, 0.0))
            .re
    }

    /// Field norm N(a) = det of multiplication-by-a, computed exactly.
    pub fn norm(&self) -> BigRational {
        let d = self.field.degree;
        let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        let mut basis = Self::one(&self.field);
        let lam = Self::generator(&self.field);
        for _ in 0..d {
            m.push(self.mul(&basis).coords);
            basis = basis.mul(&lam);
        }
        determinant(m)
    }

    /// Upper bound on |Σ cₖ zᵏ| from coefficient magnitudes.
    pub fn abs_upper_bound(&self, root: num_complex::Complex64) -> f64 {
        let r = root.norm();
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in &self.coords {
            acc += rational_to_f64(&c.abs()) * pow;
            pow *= r;
        }
        acc * (1.0 + 1e-12)
    }
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}
