//! Fourier–Galerkin discretization of the averaging operator
//! T f = (1/3)(f + f∘τ_{g₊} + f∘τ_{g₋}) and its unitary variant, with
//! restricted-norm estimation and the smoothing diagnostics built on it.

mod fourier;
mod norms;
mod operator;
mod smoothing;

pub use fourier::{hs_weight, FourierVector};
pub use norms::{
    expander_average_norm, expander_average_norm_for, hermitian_q_norm, q_norm, restricted_norm, restricted_norm_scan,
    ExpanderNorm, RestrictedNorm, POWER_MAX_ITERATIONS, POWER_TOLERANCE,
};
pub use operator::{
    apply_power, build_operator, frame_matrices, galerkin_average, min_quadrature, plain_norm_bound, power_orbit,
    Frame, OperatorMatrix, OperatorMeta, PowerOrbit, Variant, LEAK_TOLERANCE, QUADRATURE_TOLERANCE,
};
pub use smoothing::{
    deviation_decay, exp_fit, smoothing_suite, DecayCurve, DeviationDecay, ExpFit, SmoothingParams, SmoothingReport,
};

use thiserror::Error;

use crate::cocycle::CocycleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferOpError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("quadrature M = {m} under-resolved: doubling changes an entry by {change:e}")]
    QuadratureUnderResolved { m: usize, change: f64 },
    #[error("truncation leak {leakage:e} at step {step}; increase n_max")]
    TruncationLeak { step: usize, leakage: f64 },
    #[error("power iteration did not settle after {iterations} iterations")]
    PowerIterationStall { iterations: usize },
    #[error("corrupt operator cache: {0}")]
    CacheCorrupt(String),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}
