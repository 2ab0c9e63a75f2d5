//! Finite-length freeness certificates for the parabolic pair and the
//! expander family built from it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::words::{visit_words_from, Generators, Letter, Word};
use super::{parabolic_generators, CocycleError, Mat2};
use crate::numberfield::{
    conjugates, diophantine_floor, hypothesis_check, poly::rational_to_f64, AlgebraicNumber, FieldElement, LogScalar,
    NumberField,
};

/// Longest words `freeness_certificate` will enumerate.
pub const MAX_CERTIFICATE_LENGTH: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuMode {
    /// Parabolic parameter μ = λ.
    EntryLambda,
    /// Parabolic parameter μ = 2λ, the pair g₊g₋⁻¹, g₊⁻¹g₋.
    EntryTwoLambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreenessStatus {
    FreeUpToLength,
    CollisionFound,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreenessCertificate {
    pub lambda: f64,
    pub min_poly: Vec<i64>,
    pub mu_mode: MuMode,
    pub mu_entry: f64,
    pub max_length: usize,
    pub status: FreenessStatus,
    pub witness: Option<Word>,
    /// Evaluates to ±identity: +1 or −1 when a witness exists.
    pub witness_sign: Option<i8>,
    pub words_checked: u64,
    /// Smallest certified lower bound on ‖w − 1‖_∞ over non-collision words.
    pub min_distance: f64,
    pub min_distance_word: Option<Word>,
    /// Words whose certified distance fell below the floor for their length.
    pub floor_violations: u64,
    /// Words whose double-precision ‖w − 1‖_∞ fell below the certified bound.
    pub float_below_bound: u64,
    pub floor_r: u64,
    pub floor: LogScalar,
}

/// Lower bound on |e| for a nonzero e ∈ ℚ(λ): |N(e)| / Π_{j≥2} |σⱼ(e)|.
fn certified_abs_lower_bound(e: &FieldElement, others: &[Complex64]) -> f64 {
    let norm = rational_to_f64(&e.norm()).abs();
    let denom: f64 = others.iter().map(|&z| e.abs_upper_bound(z)).product();
    norm / denom
}

#[derive(Default)]
struct SearchState {
    checked: u64,
    collision: Option<(Word, i8)>,
    min_distance: Option<(f64, Word)>,
    floor_violations: u64,
    float_below_bound: u64,
}

impl SearchState {
    fn merge(mut self, o: SearchState) -> Self {
        self.checked += o.checked;
        self.floor_violations += o.floor_violations;
        self.float_below_bound += o.float_below_bound;
        self.collision = match (self.collision, o.collision) {
            (Some(a), Some(b)) => Some(if a.0.shortlex_key() <= b.0.shortlex_key() { a } else { b }),
            (a, b) => a.or(b),
        };
        self.min_distance = match (self.min_distance, o.min_distance) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Exhaustively evaluates every reduced word of length ≤ `max_length` in
/// the parabolic generators exactly in ℚ(λ).
pub fn freeness_certificate(
    alpha: &AlgebraicNumber,
    mode: MuMode,
    max_length: usize,
    floor_r: u64,
) -> Result<FreenessCertificate, CocycleError> {
    if max_length > MAX_CERTIFICATE_LENGTH {
        return Err(CocycleError::LengthCapExceeded(max_length));
    }
    let field = NumberField::new(alpha);
    let lam = FieldElement::generator(&field);
    let mu = match mode {
        MuMode::EntryLambda => lam.clone(),
        MuMode::EntryTwoLambda => lam.add(&lam),
    };
    let (a, b) = parabolic_generators(&mu);
    let gens = Generators::new(a, b);
    let roots = conjugates(alpha)?;
    let others = &roots[1..];
    let one = FieldElement::one(&field);
    let identity = Mat2::identity_like(&one);
    let minus_identity = identity.neg();
    let floors: Vec<f64> = (0..=max_length)
        .map(|l| diophantine_floor(alpha, floor_r, l as u64).ln)
        .collect();

    let state = Letter::ALL
        .par_iter()
        .map(|&first| {
            let mut st = SearchState::default();
            visit_words_from(&gens, first, max_length, &mut |letters, w| {
                st.checked += 1;
                let sign = if *w == identity {
                    Some(1)
                } else if *w == minus_identity {
                    Some(-1)
                } else {
                    None
                };
                if let Some(sign) = sign {
                    let word = Word::new(letters.to_vec()).expect("enumerated words are reduced");
                    let better = st
                        .collision
                        .as_ref()
                        .is_none_or(|(c, _)| word.shortlex_key() < c.shortlex_key());
                    if better {
                        st.collision = Some((word, sign));
                    }
                    return;
                }
                let diff = w.sub(&identity);
                let bound = diff
                    .entries()
                    .into_iter()
                    .filter(|e| !e.is_zero())
                    .map(|e| certified_abs_lower_bound(e, others))
                    .fold(0.0, f64::max);
                let float_dist = diff.to_f64().max_abs();
                // Doubles lose ~1e-12 relative accuracy to cancellation in c₀ + c₁λ + ….
                if float_dist < bound * (1.0 - 1e-9) {
                    st.float_below_bound += 1;
                }
                if bound.ln() < floors[letters.len()] {
                    st.floor_violations += 1;
                }
                if st.min_distance.as_ref().is_none_or(|(d, _)| bound < *d) {
                    st.min_distance = Some((bound, Word::new(letters.to_vec()).unwrap()));
                }
            });
            st
        })
        .reduce(SearchState::default, SearchState::merge);

    let (status, witness, witness_sign) = match state.collision {
        Some((w, s)) => (FreenessStatus::CollisionFound, Some(w), Some(s)),
        None => (FreenessStatus::FreeUpToLength, None, None),
    };
    Ok(FreenessCertificate {
        lambda: alpha.value(),
        min_poly: alpha.coeffs().to_vec(),
        mu_mode: mode,
        mu_entry: mu.to_f64(),
        max_length,
        status,
        witness,
        witness_sign,
        words_checked: state.checked,
        min_distance: state.min_distance.as_ref().map_or(f64::INFINITY, |m| m.0),
        min_distance_word: state.min_distance.map(|m| m.1),
        floor_violations: state.floor_violations,
        float_below_bound: state.float_below_bound,
        floor_r,
        floor: diophantine_floor(alpha, floor_r, max_length as u64),
    })
}

/// R = ⌊λ^{−τ}⌋.
pub fn expander_size(lambda: f64, tau: f64) -> u64 {
    lambda.abs().powf(-tau).floor() as u64
}

/// g_r = h₁ʳh₂ʳ = [[1, rλ], [0, 1]]·[[1, 0], [rλ, 1]] for r = 1..R, each
/// within λ^{1/2} of the identity.
pub fn expander_family_f64(lambda: f64, tau: f64) -> Result<Vec<Mat2<f64>>, CocycleError> {
    let r_max = expander_size(lambda, tau);
    let bound = lambda.abs().sqrt();
    (1..=r_max)
        .map(|r| {
            let t = r as f64 * lambda;
            let g = Mat2::new(1.0, t, 0.0, 1.0).mul(&Mat2::new(1.0, 0.0, t, 1.0));
            if g.sub(&Mat2::identity()).norm() < bound {
                Ok(g)
            } else {
                Err(CocycleError::NormBoundViolated { r, tau })
            }
        })
        .collect()
}

/// As [`expander_family_f64`], after checking that λ has a conjugate of
/// modulus ≥ 1 so the pair generates a free group.
pub fn expander_family(alpha: &AlgebraicNumber, tau: f64) -> Result<Vec<Mat2<f64>>, CocycleError> {
    let report = hypothesis_check(alpha, f64::INFINITY)?;
    if !report.brenner_ok {
        return Err(CocycleError::HypothesisFailed(
            "no conjugate of 2λ has modulus ≥ 2".into(),
        ));
    }
    expander_family_f64(alpha.value(), tau)
}
