//! Lyapunov exponent and integrated density of states estimators, the
//! Thouless transform between them, Halperin's bound and energy-derivative
//! probes.

mod derivative;
mod ids;
mod lyapunov;
mod thouless;

pub use derivative::{energy_derivative_probe, DerivativeProbe, NestedTerm, FD_STEP};
pub use ids::{
    free_ids, free_lyapunov, ids_sturm, spectral_csv, sturm_count, EnergyGrid, IdsPoint, SpectralRow,
    SPECTRAL_CSV_HEADER,
};
pub use lyapunov::{
    dphi_de, dphi_de_fourier, lyapunov_mc, lyapunov_mc_batches, lyapunov_operator, lyapunov_operator_at, phi_e,
    phi_fourier, Estimate, LyapunovOperator, MC_BATCHES, MC_BURN_IN,
};
pub use thouless::{
    dyadic_scales, halperin_alpha, holder_probe, ids_from_lyapunov, lyapunov_from_ids, thouless, HolderFit,
    ThoulessDirection, SUPPORT_TOLERANCE,
};

use thiserror::Error;

use crate::transferop::TransferOpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("Sturm recurrence broke down at E = {0} after 3 perturbations")]
    SturmBreakdown(f64),
    #[error("spectrum window too small: N ranges over [{n_min}, {n_max}]")]
    SupportTruncated { n_min: f64, n_max: f64 },
    #[error("only {0} usable window scales (need 4)")]
    InsufficientResolution(usize),
    #[error("truncation leak {0:e}; increase n_max")]
    TruncationLeak(f64),
    #[error(transparent)]
    TransferOp(#[from] TransferOpError),
}
