//! Real algebraic numbers given by an integer minimal polynomial and an
//! isolating interval.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{int, rational_to_f64, QPoly};
use super::NumberFieldError;

/// Width below which the isolating interval is considered refined.
const REFINED_WIDTH: f64 = 1e-12;

/// How irreducibility of the minimal polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    /// Checked exactly (degree ≤ 4).
    Verified,
    /// Degree ≥ 5: accepted as declared.
    DeclaredUnverified,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    coeffs: Vec<i64>,
    #[serde(skip)]
    interval: Option<(BigRational, BigRational)>,
    interval_f64: (f64, f64),
    float_value: f64,
    irreducibility: Irreducibility,
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.interval == other.interval
    }
}

impl AlgebraicNumber {
    /// Minimal polynomial coefficients a₀..a_d (content 1, a_d > 0).
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// H = max |aⱼ|.
    pub fn height(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    pub fn value(&self) -> f64 {
        self.float_value
    }

    pub fn isolating_interval(&self) -> (BigRational, BigRational) {
        self.interval.clone().expect("interval is populated on construction")
    }

    pub fn isolating_interval_f64(&self) -> (f64, f64) {
        self.interval_f64
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn min_poly(&self) -> QPoly {
        QPoly::from_ints(&self.coeffs)
    }

    /// Residual bound 10⁻⁹·(d+1)·H·max(1,|x|)^d used to validate `float_value`.
    pub fn value_residual_ok(&self) -> bool {
        let x = self.float_value;
        residual(&self.coeffs, Complex64::new(x, 0.0)).norm() <= 1e-9 * residual_scale(&self.coeffs, x.abs())
    }

    /// Rebuild from the serialized form (f64 interval endpoints are exact binary rationals).
    pub fn revalidate(&self) -> Result<Self, NumberFieldError> {
        let (lo, hi) = self.interval_f64;
        real_root(
            &self.coeffs,
            (
                BigRational::from_float(lo).ok_or(NumberFieldError::InvalidInterval)?,
                BigRational::from_float(hi).ok_or(NumberFieldError::InvalidInterval)?,
            ),
        )
    }
}

fn residual(coeffs: &[i64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, &c| acc * z + c as f64)
}

fn residual_scale(coeffs: &[i64], modulus: f64) -> f64 {
    let d = coeffs.len() - 1;
    let h = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(1) as f64;
    (d as f64 + 1.0) * h * modulus.max(1.0).powi(d as i32)
}

/// Normalize to content 1 with positive leading coefficient.
fn normalize(coeffs: &[i64]) -> Result<Vec<i64>, NumberFieldError> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(NumberFieldError::ZeroPolynomial);
    }
    if c.len() < 2 {
        return Err(NumberFieldError::ConstantPolynomial);
    }
    let g = c.iter().fold(0i64, |g, &x| g.gcd(&x));
    let sign = if *c.last().unwrap() < 0 { -1 } else { 1 };
    for x in &mut c {
        *x = sign * *x / g;
    }
    Ok(c)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            if k * k != n {
                out.push(n / k);
            }
        }
        k += 1;
    }
    out
}

fn has_rational_root(poly: &QPoly, coeffs: &[i64]) -> bool {
    if coeffs[0] == 0 {
        return true;
    }
    let ps = divisors(coeffs[0].unsigned_abs());
    let qs = divisors(coeffs.last().unwrap().unsigned_abs());
    for &p in &ps {
        for &q in &qs {
            for sign in [1i64, -1] {
                let r = BigRational::new(BigInt::from(sign * p as i64), BigInt::from(q as i64));
                if poly.eval(&r).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

/// Search for an integer factorization of a quartic into two quadratics
/// (p x² + q x + r)(s x² + t x + u).
fn quartic_splits(c: &[i64]) -> bool {
    let (a0, a1, a2, a3, a4) = (c[0], c[1], c[2], c[3], c[4]);
    let norm2: f64 = c.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    // Coefficient bound for a quadratic factor (Mignotte, with slack).
    let bound = (2.0 * norm2 * a4.unsigned_abs() as f64).ceil() as i64 + 1;
    let check = |p: i64, q: i64, r: i64, s: i64, t: i64, u: i64| {
        p * s == a4 && p * t + q * s == a3 && p * u + q * t + r * s == a2 && q * u + r * t == a1 && r * u == a0
    };
    for p in divisors(a4.unsigned_abs()) {
        let p = p as i64;
        let s = a4 / p;
        for r_abs in divisors(a0.unsigned_abs()) {
            for r in [r_abs as i64, -(r_abs as i64)] {
                let u = a0 / r;
                let det = s * r - p * u;
                if det != 0 {
                    // [s p; u r] [q; t] = [a3; a1]
                    let qn = a3 * r - p * a1;
                    let tn = s * a1 - u * a3;
                    if qn % det == 0 && tn % det == 0 && check(p, qn / det, r, s, tn / det, u) {
                        return true;
                    }
                } else {
                    for q in -bound..=bound {
                        let rest = a3 - q * s;
                        if rest % p != 0 {
                            continue;
                        }
                        if check(p, q, r, s, rest / p, u) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Exact reducibility test for degree ≤ 4; `None` when not decidable here.
fn is_reducible(poly: &QPoly, coeffs: &[i64]) -> Option<bool> {
    match coeffs.len() - 1 {
        1 => Some(false),
        2 | 3 => Some(has_rational_root(poly, coeffs)),
        4 => Some(has_rational_root(poly, coeffs) || quartic_splits(coeffs)),
        _ => None,
    }
}

/// Construct the unique real root of `coeffs` inside the open interval `(lo, hi)`.
pub fn real_root(coeffs: &[i64], interval: (BigRational, BigRational)) -> Result<AlgebraicNumber, NumberFieldError> {
    let coeffs = normalize(coeffs)?;
    let (mut lo, mut hi) = interval;
    if lo >= hi {
        return Err(NumberFieldError::InvalidInterval);
    }
    let poly = QPoly::from_ints(&coeffs);
    let irreducibility = match is_reducible(&poly, &coeffs) {
        Some(true) => return Err(NumberFieldError::ReduciblePolynomial),
        Some(false) => Irreducibility::Verified,
        None => Irreducibility::DeclaredUnverified,
    };

    let chain = poly.sturm_chain();
    let mut count = QPoly::count_roots(&chain, &lo, &hi);
    if poly.eval(&hi).is_zero() {
        count -= 1;
    }
    match count {
        0 => return Err(NumberFieldError::NoRootInInterval),
        1 => {}
        n => return Err(NumberFieldError::MultipleRootsInInterval(n)),
    }

    let width_target = BigRational::from_float(REFINED_WIDTH).unwrap();
    let mut f_lo = poly.eval(&lo);
    if f_lo.is_zero() {
        // Root at lo is excluded from the open interval; nudge inward.
        let eps = (&hi - &lo) / int(1 << 20);
        lo = &lo + eps;
        f_lo = poly.eval(&lo);
    }
    while &hi - &lo >= width_target {
        let mid = (&lo + &hi) / int(2);
        let f_mid = poly.eval(&mid);
        if f_mid.is_zero() {
            let eps = &width_target / int(4);
            lo = &mid - &eps;
            hi = &mid + &eps;
            break;
        }
        if f_mid.is_positive() == f_lo.is_positive() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    // Keep halving a private copy until both endpoints round to the same double.
    let (mut flo, mut fhi, mut f_flo) = (lo.clone(), hi.clone(), f_lo);
    for _ in 0..200 {
        if rational_to_f64(&flo) == rational_to_f64(&fhi) {
            break;
        }
        let mid = (&flo + &fhi) / int(2);
        let f_mid = poly.eval(&mid);
        if f_mid.is_zero() {
            flo = mid.clone();
            fhi = mid;
            break;
        }
        if f_mid.is_positive() == f_flo.is_positive() {
            flo = mid;
            f_flo = f_mid;
        } else {
            fhi = mid;
        }
    }
    let float_value = rational_to_f64(&((&flo + &fhi) / int(2)));
    let out = AlgebraicNumber {
        coeffs,
        interval_f64: (rational_to_f64(&lo), rational_to_f64(&hi)),
        interval: Some((lo, hi)),
        float_value,
        irreducibility,
    };
    debug_assert!(out.value_residual_ok());
    Ok(out)
}

/// Convenience wrapper taking f64 interval endpoints (converted exactly).
pub fn real_root_f64(coeffs: &[i64], lo: f64, hi: f64) -> Result<AlgebraicNumber, NumberFieldError> {
    let lo = BigRational::from_float(lo).ok_or(NumberFieldError::InvalidInterval)?;
    let hi = BigRational::from_float(hi).ok_or(NumberFieldError::InvalidInterval)?;
    real_root(coeffs, (lo, hi))
}

/// All complex roots of the minimal polynomial, the real root `α` first,
/// the others by descending modulus.
pub fn conjugates(alpha: &AlgebraicNumber) -> Result<Vec<Complex64>, NumberFieldError> {
    let coeffs = alpha.coeffs();
    let d = alpha.degree();
    let lead = alpha.leading() as f64;
    let mut roots: Vec<Complex64> = if d == 1 {
        vec![Complex64::new(-(coeffs[0] as f64) / lead, 0.0)]
    } else {
        let mut companion = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            companion[(i, d - 1)] = -(coeffs[i] as f64) / lead;
        }
        companion.complex_eigenvalues().iter().copied().collect()
    };

    let deriv: Vec<i64> = coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as i64).collect();
    for z in roots.iter_mut() {
        let bound = |z: Complex64| 1e-8 * residual_scale(coeffs, z.norm());
        let mut ok = residual(coeffs, *z).norm() <= bound(*z);
        for _ in 0..100 {
            let f = residual(coeffs, *z);
            let df = residual(&deriv, *z);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *z -= step;
            ok = residual(coeffs, *z).norm() <= bound(*z);
            if ok && step.norm() <= 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        if !ok {
            return Err(NumberFieldError::ConvergenceFailure);
        }
        if z.im.abs() < 1e-14 * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }

    let x = alpha.value();
    let first = roots
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).norm().total_cmp(&(b.1 - x).norm()))
        .map(|(i, _)| i)
        .unwrap();
    let own = roots.remove(first);
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    roots.insert(0, own);
    Ok(roots)
}
