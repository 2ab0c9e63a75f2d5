//! The JSON experiment configuration: one document, every section
//! defaulted, validated field by field.

use std::path::{Path, PathBuf};

use ablab_core::cocycle::MuMode;
use ablab_core::numberfield::{real_root_f64, AlgebraicNumber};
use ablab_core::spectrum::EnergyGrid;
use ablab_core::transferop::{min_quadrature, Frame, Variant};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A float coupling, or an exact one given by its minimal polynomial
/// (a₀..a_d) and an isolating interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Float(f64),
    Algebraic { min_poly: Vec<i64>, interval: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorSpec {
    /// Energy of the `gap`, `smoothing` and `measure` stages.
    pub energy: f64,
    pub n_max: usize,
    #[serde(rename = "M")]
    pub quadrature: usize,
    #[serde(rename = "K_list")]
    pub k_list: Vec<usize>,
    pub variant: Variant,
    pub frame: Frame,
    /// Restriction level of the expander average.
    pub expander_k: usize,
    pub expander_n_max: usize,
    #[serde(rename = "expander_M")]
    pub expander_quadrature: usize,
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self {
            energy: 0.5,
            n_max: 256,
            quadrature: 4096,
            k_list: (1..=16).map(|i| 4 * i).collect(),
            variant: Variant::Plain,
            frame: Frame::Tilde,
            expander_k: 32,
            expander_n_max: 256,
            expander_quadrature: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McSpec {
    pub steps: usize,
    pub samples: usize,
    pub sites: usize,
    pub burn_in: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            steps: 1_000_000,
            samples: 100,
            sites: 4000,
            burn_in: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FreeCertSpec {
    pub max_length: usize,
    pub mu_mode: MuMode,
    pub floor_r: u64,
}

impl Default for FreeCertSpec {
    fn default() -> Self {
        Self {
            max_length: 6,
            mu_mode: MuMode::EntryTwoLambda,
            floor_r: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumSpec {
    /// Points of the IDS window covering the whole spectrum.
    pub ids_points: usize,
    /// Extra room beyond [−2 − λ, 2 + λ] on each side.
    pub window_margin: f64,
    pub holder_scales: usize,
    pub operator_ell: usize,
    pub operator_n_max: usize,
    #[serde(rename = "operator_M")]
    pub operator_quadrature: usize,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            ids_points: 801,
            window_margin: 0.2,
            holder_scales: 8,
            operator_ell: 60,
            operator_n_max: 64,
            operator_quadrature: 1024,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingSpec {
    pub ks: Vec<u32>,
    pub m_max: usize,
    pub samples: usize,
    pub sobolev: Vec<f64>,
    pub derivative_sobolev: f64,
    pub ell_max: usize,
    /// ℓ of the deviation curve d_ℓ.
    pub deviation_ell: usize,
    /// ℓ and cutoff of the energy-derivative probe.
    pub derivative_ell: usize,
    pub derivative_order: usize,
    pub derivative_n_max: usize,
    #[serde(rename = "derivative_M")]
    pub derivative_quadrature: usize,
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        Self {
            ks: vec![3, 4, 5],
            m_max: 60,
            samples: 8,
            sobolev: vec![1.0, 2.0],
            derivative_sobolev: 1.0,
            ell_max: 30,
            deviation_ell: 40,
            derivative_ell: 20,
            derivative_order: 2,
            derivative_n_max: 128,
            derivative_quadrature: 2048,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureSpec {
    pub n_max: usize,
    #[serde(rename = "M")]
    pub quadrature: usize,
    pub frame: Frame,
    pub mc_samples: usize,
    /// Coefficients |n| ≤ compare_n enter the oracle comparison.
    pub compare_n: usize,
    pub smoothness_r: u32,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        Self {
            n_max: 256,
            quadrature: 4096,
            frame: Frame::Tilde,
            mc_samples: 1_000_000,
            compare_n: 32,
            smoothness_r: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BernoulliSpec {
    /// Couplings of the comparison; the configured λ is prepended when it
    /// lies in (0, 1).
    pub lambdas: Vec<f64>,
    pub xi: Vec<f64>,
    pub k_max: u32,
    pub n_max: usize,
}

impl Default for BernoulliSpec {
    fn default() -> Self {
        Self {
            lambdas: vec![0.5, 2.0 / (1.0 + 5f64.sqrt())],
            xi: vec![0.3, 1.0, 2.5],
            k_max: 20,
            n_max: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub lambda: LambdaSpec,
    #[serde(rename = "C")]
    pub c: f64,
    pub tau: f64,
    pub delta: f64,
    pub grid: GridSpec,
    pub operator: OperatorSpec,
    pub mc: McSpec,
    pub seed: u64,
    pub threads: usize,
    pub outdir: PathBuf,
    pub free_cert: FreeCertSpec,
    pub spectrum: SpectrumSpec,
    pub smoothing: SmoothingSpec,
    pub measure: MeasureSpec,
    pub bernoulli: BernoulliSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lambda: LambdaSpec::Algebraic {
                min_poly: vec![-1, 4, 1],
                interval: [0.2, 0.3],
            },
            c: 3.0,
            tau: 0.4,
            delta: 0.2,
            grid: GridSpec {
                lo: -1.5,
                hi: 1.5,
                count: 31,
            },
            operator: OperatorSpec::default(),
            mc: McSpec::default(),
            seed: 0,
            threads: 1,
            outdir: PathBuf::from("out"),
            free_cert: FreeCertSpec::default(),
            spectrum: SpectrumSpec::default(),
            smoothing: SmoothingSpec::default(),
            measure: MeasureSpec::default(),
            bernoulli: BernoulliSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::ConfigInvalid(vec![format!("parse: {e}")]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigInvalid(vec![format!("{}: {e}", path.display())]))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The exact coupling, when one was given.
    pub fn algebraic(&self) -> Result<Option<AlgebraicNumber>, CliError> {
        match &self.lambda {
            LambdaSpec::Float(_) => Ok(None),
            LambdaSpec::Algebraic { min_poly, interval } => real_root_f64(min_poly, interval[0], interval[1])
                .map(Some)
                .map_err(|e| CliError::ConfigInvalid(vec![format!("lambda: {e}")])),
        }
    }

    pub fn require_algebraic(&self) -> Result<AlgebraicNumber, CliError> {
        self.algebraic()?.ok_or_else(|| {
            CliError::ConfigInvalid(vec![
                "lambda: this subcommand needs {min_poly, interval}, not a float".into()
            ])
        })
    }

    pub fn lambda_value(&self) -> Result<f64, CliError> {
        match &self.lambda {
            LambdaSpec::Float(v) => Ok(*v),
            LambdaSpec::Algebraic { .. } => Ok(self.require_algebraic()?.value()),
        }
    }

    pub fn energy_grid(&self) -> Result<EnergyGrid, CliError> {
        EnergyGrid::within_margin(self.grid.lo, self.grid.hi, self.grid.count, self.delta)
            .map_err(|e| CliError::ConfigInvalid(vec![format!("grid: {e}")]))
    }

    /// Every violated constraint, one message per field.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errs = Vec::new();
        match self.lambda_value() {
            Ok(l) if !(0.0..1.0).contains(&l) => errs.push(format!("lambda: {l} not in [0, 1)")),
            Ok(_) => {}
            Err(CliError::ConfigInvalid(m)) => errs.extend(m),
            Err(e) => errs.push(e.to_string()),
        }
        if !(self.c > 0.0) {
            errs.push(format!("C: {} must be positive", self.c));
        }
        if !(self.tau > 0.0 && self.tau < 0.5) {
            errs.push(format!("tau: {} not in (0, 1/2)", self.tau));
        }
        if !(self.delta > 0.0) {
            errs.push(format!("delta: {} must be positive", self.delta));
        } else if let Err(CliError::ConfigInvalid(m)) = self.energy_grid() {
            errs.extend(m);
        }
        if self.threads == 0 {
            errs.push("threads: must be at least 1".into());
        }
        let op = &self.operator;
        check_operator(&mut errs, "operator", op.n_max, op.quadrature);
        if let Some(k) = op.k_list.iter().find(|&&k| 2 * k >= op.n_max) {
            errs.push(format!("operator.K_list: K = {k} not below n_max/2 = {}", op.n_max / 2));
        }
        if op.frame == Frame::Tilde && !(op.energy.abs() < 2.0) {
            errs.push(format!(
                "operator.energy: {} outside (−2, 2) for the tilde frame",
                op.energy
            ));
        }
        check_operator(
            &mut errs,
            "operator.expander",
            op.expander_n_max,
            op.expander_quadrature,
        );
        if 2 * op.expander_k >= op.expander_n_max {
            errs.push("operator.expander_k: must be below expander_n_max/2".into());
        }
        if self.mc.steps < 1000 {
            errs.push(format!("mc.steps: {} below 10³", self.mc.steps));
        }
        if self.mc.sites < 100 {
            errs.push(format!("mc.sites: {} below 100", self.mc.sites));
        }
        if self.mc.samples == 0 {
            errs.push("mc.samples: must be at least 1".into());
        }
        let s = &self.spectrum;
        if s.ids_points < 3 {
            errs.push("spectrum.ids_points: need at least 3".into());
        }
        if !(s.window_margin > 0.0) {
            errs.push("spectrum.window_margin: must be positive".into());
        }
        check_operator(&mut errs, "spectrum.operator", s.operator_n_max, s.operator_quadrature);
        let sm = &self.smoothing;
        let largest = sm.ks.iter().copied().max().unwrap_or(0);
        if op.n_max < 1usize << (largest + 2) {
            errs.push(format!(
                "smoothing.ks: n_max = {} below 2^(k+2) for k = {largest}",
                op.n_max
            ));
        }
        if sm.samples == 0 || sm.m_max == 0 {
            errs.push("smoothing: samples and m_max must be positive".into());
        }
        if !(1..=2).contains(&sm.derivative_order) {
            errs.push("smoothing.derivative_order: must be 1 or 2".into());
        }
        check_operator(
            &mut errs,
            "smoothing.derivative",
            sm.derivative_n_max,
            sm.derivative_quadrature,
        );
        let m = &self.measure;
        check_operator(&mut errs, "measure", m.n_max, m.quadrature);
        if m.mc_samples < 10_000 {
            errs.push(format!("measure.mc_samples: {} below 10⁴", m.mc_samples));
        }
        if m.compare_n > m.n_max {
            errs.push("measure.compare_n: exceeds measure.n_max".into());
        }
        if let Some(l) = self.bernoulli.lambdas.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            errs.push(format!("bernoulli.lambdas: {l} not in (0, 1)"));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::ConfigInvalid(errs))
        }
    }
}

fn check_operator(errs: &mut Vec<String>, field: &str, n_max: usize, quadrature: usize) {
    if n_max == 0 {
        errs.push(format!("{field}.n_max: must be positive"));
    } else if quadrature < min_quadrature(n_max) {
        errs.push(format!(
            "{field}.M: {quadrature} below 4(2 n_max + 1) = {}",
            min_quadrature(n_max)
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c =
            ExperimentConfig::from_json(r#"{"lambda": 0.0, "grid": {"lo": -1.8, "hi": 1.8, "count": 21}}"#).unwrap();
        assert_eq!(c.lambda, LambdaSpec::Float(0.0));
        assert_eq!(c.mc, McSpec::default());
        c.validate().unwrap();
    }

    #[test]
    fn field_level_messages() {
        let mut c = ExperimentConfig::default();
        c.tau = 0.5;
        c.delta = 0.1;
        c.grid.hi = 1.95;
        c.operator.quadrature = 100;
        let Err(CliError::ConfigInvalid(msgs)) = c.validate() else {
            panic!("expected ConfigInvalid");
        };
        assert!(msgs.iter().any(|m| m.starts_with("tau")));
        assert!(msgs.iter().any(|m| m.starts_with("grid")));
        assert!(msgs.iter().any(|m| m.starts_with("operator.M")));
    }

    #[test]
    fn algebraic_lambda() {
        let c = ExperimentConfig::default();
        assert!((c.lambda_value().unwrap() - (5f64.sqrt() - 2.0)).abs() < 1e-15);
        let f = ExperimentConfig {
            lambda: LambdaSpec::Float(0.3),
            ..ExperimentConfig::default()
        };
        assert!(f.require_algebraic().is_err());
    }
}
