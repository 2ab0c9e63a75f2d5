//! Integrated density of states by Sturm counting on random Dirichlet
//! tridiagonals, energy grids and the per-energy spectral table.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpectrumError;
use crate::seeds::task_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    /// Band-edge margin δ, when the grid was built to respect one.
    pub delta: Option<f64>,
    pub points: Vec<f64>,
}

impl EnergyGrid {
    /// `count` equispaced points filling [−2 + δ, 2 − δ].
    pub fn with_margin(delta: f64, count: usize) -> Result<Self, SpectrumError> {
        Self::within_margin(-2.0 + delta, 2.0 - delta, count, delta)
    }

    /// `count` equispaced points on [lo, hi], checked against the margin δ.
    pub fn within_margin(lo: f64, hi: f64, count: usize, delta: f64) -> Result<Self, SpectrumError> {
        if !(delta > 0.0) {
            return Err(SpectrumError::InvalidParameters("δ must be positive".into()));
        }
        let tol = 1e-12;
        if lo < -2.0 + delta - tol || hi > 2.0 - delta + tol {
            return Err(SpectrumError::InvalidParameters(format!(
                "grid [{lo}, {hi}] leaves the window |E| ≤ 2 − δ = {}",
                2.0 - delta
            )));
        }
        let mut g = Self::uniform(lo, hi, count)?;
        g.delta = Some(delta);
        Ok(g)
    }

    /// Equispaced grid without a band-edge constraint (Thouless windows
    /// must cover the whole spectrum).
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Result<Self, SpectrumError> {
        if count == 0 || !(lo <= hi) || (count > 1 && lo == hi) {
            return Err(SpectrumError::InvalidParameters(format!(
                "bad grid [{lo}, {hi}] with {count} points"
            )));
        }
        let points = if count == 1 {
            vec![lo]
        } else {
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Ok(Self { delta: None, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdsPoint {
    pub energy: f64,
    pub n: f64,
    pub stderr: f64,
}

/// Number of eigenvalues below E of the Dirichlet matrix with diagonal `v`
/// and unit off-diagonal, via the ratio form of the Sturm recurrence.
pub fn sturm_count(v: &[f64], energy: f64) -> Result<usize, SpectrumError> {
    let mut e = energy;
    for attempt in 0..=3 {
        if let Some(c) = sturm_count_once(v, e) {
            return Ok(c);
        }
        if attempt < 3 {
            e = energy + 1e-12 * energy.abs().max(1.0) * (attempt + 1) as f64;
        }
    }
    Err(SpectrumError::SturmBreakdown(energy))
}

fn sturm_count_once(v: &[f64], energy: f64) -> Option<usize> {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &vi) in v.iter().enumerate() {
        q = if i == 0 { vi - energy } else { vi - energy - 1.0 / q };
        if q.abs() < f64::MIN_POSITIVE * 1e4 || !q.is_finite() {
            return None;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    Some(count)
}

/// N(E) = mean fraction of eigenvalues below E over `samples` draws of
/// V ∈ {±λ}^sites; each sample is reused across the whole grid.
pub fn ids_sturm(
    grid: &EnergyGrid,
    lambda: f64,
    sites: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<IdsPoint>, SpectrumError> {
    if sites < 100 || samples == 0 {
        return Err(SpectrumError::InvalidParameters(format!(
            "need sites ≥ 100 and samples ≥ 1 (sites = {sites}, samples = {samples})"
        )));
    }
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = task_rng(seed, "ids_sturm", s);
            let v: Vec<f64> = (0..sites)
                .map(|_| if rng.random::<bool>() { lambda } else { -lambda })
                .collect();
            grid.points
                .iter()
                .map(|&e| sturm_count(&v, e).map(|c| c as f64 / sites as f64))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(grid
        .points
        .iter()
        .enumerate()
        .map(|(i, &energy)| {
            let vals: Vec<f64> = per_sample.iter().map(|row| row[i]).collect();
            IdsPoint {
                energy,
                n: crate::stats::mean(&vals),
                stderr: crate::stats::std_error(&vals),
            }
        })
        .collect())
}

/// N₀(E) = 1 − arccos(E/2)/π for the free Laplacian (clamped outside [−2, 2]).
pub fn free_ids(energy: f64) -> f64 {
    1.0 - (energy / 2.0).clamp(-1.0, 1.0).acos() / std::f64::consts::PI
}

/// L₀(E) = arccosh(|E|/2) outside [−2, 2], zero inside.
pub fn free_lyapunov(energy: f64) -> f64 {
    if energy.abs() > 2.0 {
        (energy.abs() / 2.0).acosh()
    } else {
        0.0
    }
}

/// One row of the spectral table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SpectralRow {
    pub E: f64,
    pub L_mc: f64,
    pub L_mc_se: f64,
    pub L_op: f64,
    pub L_op_resid: f64,
    pub N: f64,
    pub N_se: f64,
    pub alpha0: f64,
}

pub const SPECTRAL_CSV_HEADER: &str = "E,L_mc,L_mc_se,L_op,L_op_resid,N,N_se,alpha0";

/// CSV with header, '\n' endings, shortest round-trip float formatting.
pub fn spectral_csv(rows: &[SpectralRow]) -> String {
    let mut out = String::from(SPECTRAL_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [r.E, r.L_mc, r.L_mc_se, r.L_op, r.L_op_resid, r.N, r.N_se, r.alpha0];
        let cells: Vec<String> = fields.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn grid_margins() {
        let g = EnergyGrid::with_margin(0.2, 5).unwrap();
        for (p, q) in g.points.iter().zip([-1.8, -0.9, 0.0, 0.9, 1.8]) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!(EnergyGrid::within_margin(-1.9, 1.0, 4, 0.2).is_err());
        assert!(EnergyGrid::uniform(-3.0, 3.0, 7).unwrap().delta.is_none());
    }

    #[test]
    fn sturm_matches_dense_eigensolve() {
        let n = 60;
        let v: Vec<f64> = (0..n).map(|i| if (i * 7) % 3 == 0 { 0.3 } else { -0.3 }).collect();
        let h = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                v[i]
            } else if i.abs_diff(j) == 1 {
                1.0
            } else {
                0.0
            }
        });
        let eig = h.symmetric_eigenvalues();
        for e in [-2.1, -1.0, -0.05, 0.4, 1.7, 2.5] {
            let dense = eig.iter().filter(|&&x| x < e).count();
            assert_eq!(sturm_count(&v, e).unwrap(), dense);
        }
    }

    #[test]
    fn free_ids_at_moderate_size() {
        let g = EnergyGrid::with_margin(0.2, 9).unwrap();
        let ids = ids_sturm(&g, 0.0, 1000, 1, 0).unwrap();
        for p in ids {
            assert!((p.n - free_ids(p.energy)).abs() < 2e-3);
        }
    }

    #[test]
    fn csv_layout() {
        let row = SpectralRow {
            E: 0.5,
            L_mc: 0.1,
            L_mc_se: 0.001,
            L_op: 0.1,
            L_op_resid: 1e-9,
            N: 0.6,
            N_se: 0.01,
            alpha0: 2.0,
        };
        let csv = spectral_csv(&[row]);
        assert_eq!(
            csv,
            "E,L_mc,L_mc_se,L_op,L_op_resid,N,N_se,alpha0\n0.5,0.1,0.001,0.1,0.000000001,0.6,0.01,2\n"
        );
    }
}
