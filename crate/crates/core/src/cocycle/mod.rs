//! SL₂ cocycles: transfer matrices, the Figotin–Pastur frame, the
//! projective action on [0, 1), reduced words and freeness certificates.

mod frame;
mod freeness;
mod mat2;
mod projective;
mod words;

pub use frame::{fp_frame, parabolic_generators, parabolic_pair, transfer_matrix, transfer_matrix_in, FpFrame, Sign};
pub use freeness::{
    expander_family, expander_family_f64, expander_size, freeness_certificate, FreenessCertificate, FreenessStatus,
    MuMode, MAX_CERTIFICATE_LENGTH,
};
pub use mat2::{Mat2, Scalar};
pub use projective::{circle_diff, mobius_angle, mobius_derivative, project, wrap_unit, ProjectivePoint};
pub use words::{
    count_reduced, reduced_words, visit_words_from, Generators, Letter, ReducedWords, Word, MAX_ENUMERATION_LENGTH,
};

use thiserror::Error;

use crate::numberfield::NumberFieldError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CocycleError {
    #[error("closed-form matrix identity failed (arithmetic bug)")]
    IdentityMismatch,
    #[error("energy {0} outside (-2, 2)")]
    EnergyOutOfRange(f64),
    #[error("word length {0} exceeds the enumeration cap")]
    LengthCapExceeded(usize),
    #[error("word is not reduced")]
    NotReduced,
    #[error("‖1 − g_r‖ ≥ λ^(1/2) at r = {r}; τ = {tau} too large")]
    NormBoundViolated { r: u64, tau: f64 },
    #[error("hypothesis not satisfied: {0}")]
    HypothesisFailed(String),
    #[error(transparent)]
    NumberField(#[from] NumberFieldError),
}
