//! Exact arithmetic in ℚ(λ) and the arithmetic hypotheses on the coupling λ.

mod algebraic;
mod field;
mod hypothesis;
pub mod poly;

pub use algebraic::{conjugates, real_root, real_root_f64, AlgebraicNumber, Irreducibility};
pub use field::{FieldElement, NumberField};
pub use hypothesis::{
    diophantine_floor, hypothesis_check, integrality_scale, pisot_check, HypothesisReport, LogScalar,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumberFieldError {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("isolating interval must satisfy lo < hi")]
    InvalidInterval,
    #[error("no real root in the isolating interval")]
    NoRootInInterval,
    #[error("{0} real roots in the isolating interval, expected one")]
    MultipleRootsInInterval(usize),
    #[error("minimal polynomial is reducible over ℚ")]
    ReduciblePolynomial,
    #[error("conjugate polishing did not converge")]
    ConvergenceFailure,
    #[error("division by zero in ℚ(λ)")]
    DivisionByZero,
    #[error("coupling {0} is not in (0, 1)")]
    OutOfUnitInterval(f64),
}
