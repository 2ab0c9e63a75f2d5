//! Dyadic-block Fourier energies of a measure and the regularity verdict
//! they support.

use serde::{Deserialize, Serialize};

use super::{MeasureError, MeasureEstimate};
use crate::stats::{fit_line, LineFit};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEnergy {
    pub k: u32,
    /// B_k = (Σ_{2^k ≤ |n| < 2^{k+1}} |ν̂(n)|²)^{1/2}.
    pub energy: f64,
    /// sup |⟨ν, f⟩| over f = e(n x) with n in the block.
    pub pairing_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityVerdict {
    /// Every block vanishes.
    Uniform,
    /// Blocks decay faster than 2^{−k(r + 1/2)}.
    SobolevDensity,
    /// Blocks decay, but not fast enough for H^r.
    SquareIntegrable,
    /// Blocks do not decay.
    NotADensity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub r: u32,
    pub blocks: Vec<BlockEnergy>,
    /// Slope of log₂ B_k against k (−∞ when every block vanishes).
    pub exponent: f64,
    pub fit: Option<LineFit>,
    pub verdict: DensityVerdict,
}

/// Energies of the complete blocks below the cutoff of `nu`, the fitted
/// exponent, and the verdict for H^r regularity.
pub fn density_smoothness_probe(nu: &MeasureEstimate, r: u32) -> Result<SmoothnessReport, MeasureError> {
    let n_max = nu.fourier.n_max() as i64;
    let mut blocks = Vec::new();
    let mut k = 0u32;
    while (1i64 << (k + 1)) - 1 <= n_max {
        let (lo, hi) = (1i64 << k, 1i64 << (k + 1));
        let mut sq = 0.0;
        let mut pairing_max: f64 = 0.0;
        for n in lo..hi {
            for m in [n, -n] {
                let a = nu.coeff(m).norm();
                sq += a * a;
                pairing_max = pairing_max.max(a);
            }
        }
        blocks.push(BlockEnergy {
            k,
            energy: sq.sqrt(),
            pairing_max,
        });
        k += 1;
    }
    if blocks.len() < 4 {
        return Err(MeasureError::InsufficientCutoff(blocks.len()));
    }
    let nonzero: Vec<&BlockEnergy> = blocks.iter().filter(|b| b.energy > 0.0).collect();
    let fit = if nonzero.len() >= 2 {
        let xs: Vec<f64> = nonzero.iter().map(|b| b.k as f64).collect();
        let ys: Vec<f64> = nonzero.iter().map(|b| b.energy.log2()).collect();
        fit_line(&xs, &ys)
    } else {
        None
    };
    let exponent = match (&fit, nonzero.len()) {
        (_, 0) => f64::NEG_INFINITY,
        (Some(f), _) => f.slope,
        (None, _) => 0.0,
    };
    let verdict = if nonzero.is_empty() {
        DensityVerdict::Uniform
    } else if exponent >= 0.0 {
        DensityVerdict::NotADensity
    } else if -exponent > r as f64 + 0.5 {
        DensityVerdict::SobolevDensity
    } else {
        DensityVerdict::SquareIntegrable
    };
    Ok(SmoothnessReport {
        r,
        blocks,
        exponent,
        fit,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{MeasureMeta, MeasureSource};
    use crate::transferop::FourierVector;
    use num_complex::Complex64;

    fn estimate(f: FourierVector) -> MeasureEstimate {
        MeasureEstimate::new(
            f,
            None,
            (0.0, 1.0),
            MeasureMeta {
                source: MeasureSource::FixedPoint,
                energy: None,
                lambda: 0.0,
                seed: None,
                frame: None,
                work: 0,
            },
        )
    }

    #[test]
    fn lebesgue_blocks_vanish() {
        let r = density_smoothness_probe(&estimate(FourierVector::constant(256, 1.0)), 1).unwrap();
        assert_eq!(r.blocks.len(), 8);
        assert!(r.blocks.iter().all(|b| b.energy == 0.0));
        assert_eq!(r.verdict, DensityVerdict::Uniform);
        assert_eq!(r.exponent, f64::NEG_INFINITY);
    }

    #[test]
    fn dirac_grows_like_half_power() {
        let mut f = FourierVector::zeros(256);
        for n in -256i64..=256 {
            f.set(
                n,
                Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * 0.37 * n as f64),
            );
        }
        let r = density_smoothness_probe(&estimate(f), 1).unwrap();
        assert!((r.exponent - 0.5).abs() < 0.05, "{}", r.exponent);
        assert_eq!(r.verdict, DensityVerdict::NotADensity);
        assert!(r.blocks.iter().all(|b| (b.pairing_max - 1.0).abs() < 1e-12));
    }

    #[test]
    fn smooth_density_decays() {
        let mut f = FourierVector::constant(256, 1.0);
        for n in 1i64..=256 {
            let c = Complex64::new(0.5 * (-0.3 * n as f64).exp(), 0.0);
            f.set(n, c);
            f.set(-n, c);
        }
        let r = density_smoothness_probe(&estimate(f), 2).unwrap();
        assert!(r.exponent < -2.5);
        assert_eq!(r.verdict, DensityVerdict::SobolevDensity);
    }

    #[test]
    fn short_cutoff_rejected() {
        assert_eq!(
            density_smoothness_probe(&estimate(FourierVector::constant(8, 1.0)), 1),
            Err(MeasureError::InsufficientCutoff(3))
        );
    }
}
