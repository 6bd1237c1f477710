//! Experiment configuration (TOML).
//!
//! ```toml
//! seed = 7
//! reps = 200
//! n_grid = [250, 500, 1000]
//! d0 = [0.25]
//! outputs = "out/stationary"
//!
//! [generator]
//! family = "stationary_uniform"
//!
//! [[policies]]
//! kind = "resolve_single_sample"
//!
//! [[policies]]
//! kind = "fixed_price"
//! p = [0.75]
//!
//! [analysis]
//! regret = true
//! dual_convergence = true
//! state_deviation = true
//! fit = true
//! eps_d = 0.05
//! ```
//!
//! Unknown keys anywhere are errors.

use crate::algos::PolicySpec;
use crate::analysis::PriceReference;
use crate::gens::{Family, GeneratorSpec};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub reps: usize,
    pub n_grid: Vec<usize>,
    pub d0: Vec<f64>,
    pub outputs: PathBuf,
    pub generator: Family,
    pub policies: Vec<PolicySpec>,
    #[serde(default)]
    pub analysis: AnalysisToggles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisToggles {
    pub regret: bool,
    pub dual_convergence: bool,
    pub state_deviation: bool,
    pub fit: bool,
    /// Radius of the tracking ball around the δ-path.
    pub eps_d: f64,
    /// Policy tracked in `state_deviation.csv`; the first listed policy
    /// when absent.
    pub deviation_policy: Option<PolicySpec>,
    /// Emit every `deviation_stride`-th step of each deviation path.
    pub deviation_stride: usize,
    /// Consumption draws per step for the δ-path.
    pub delta_k: usize,
    pub price_reference: PriceReference,
}

impl Default for AnalysisToggles {
    fn default() -> Self {
        Self {
            regret: true,
            dual_convergence: false,
            state_deviation: false,
            fit: false,
            eps_d: 0.05,
            deviation_policy: None,
            deviation_stride: 1,
            delta_k: 256,
            price_reference: PriceReference::Exact,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn generator_spec(&self) -> Result<GeneratorSpec, ConfigError> {
        GeneratorSpec::new(self.generator.clone()).map_err(|e| ConfigError(format!("generator: {e}")))
    }

    /// Policy tracked by the state-deviation analysis.
    pub fn deviation_policy(&self) -> &PolicySpec {
        self.analysis.deviation_policy.as_ref().unwrap_or(&self.policies[0])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |s: String| Err(ConfigError(s));
        if self.n_grid.is_empty() {
            return err("n_grid: must not be empty".into());
        }
        if self.n_grid[0] < 2 {
            return err("n_grid: horizons must be at least 2".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return err("n_grid not increasing".into());
        }
        if self.reps < 2 {
            return err(format!("reps: must be at least 2 for standard errors, got {}", self.reps));
        }
        let spec = self.generator_spec()?;
        if self.d0.len() != spec.m {
            return err(format!("d0: has {} entries, generator has m = {}", self.d0.len(), spec.m));
        }
        if let Some(i) = self.d0.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return err(format!("d0: entry {i} must be positive"));
        }
        if self.policies.is_empty() {
            return err("policies: at least one policy is required".into());
        }
        for (i, p) in self.policies.iter().chain(self.analysis.deviation_policy.iter()).enumerate() {
            p.check(spec.m).map_err(|e| ConfigError(format!("policies[{i}]: {e}")))?;
        }
        let a = &self.analysis;
        if !(a.eps_d > 0.0 && a.eps_d.is_finite()) {
            return err(format!("analysis.eps_d: must be positive, got {}", a.eps_d));
        }
        if a.deviation_stride == 0 || a.delta_k == 0 {
            return err("analysis: deviation_stride and delta_k must be positive".into());
        }
        if let PriceReference::Saa { k } = a.price_reference {
            if k == 0 {
                return err("analysis.price_reference.k: must be positive".into());
            }
        }
        if a.fit && (!a.regret || self.n_grid.len() < 3) {
            return err("analysis.fit: needs regret enabled and at least 3 horizons".into());
        }
        Ok(())
    }
}
