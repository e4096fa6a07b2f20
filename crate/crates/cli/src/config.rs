//! JSON analysis configuration.

use std::path::Path;

use bloch_wco::{DomainSpec, SupConfig, SymbolPair};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Bloch,
    Hinf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Bounded,
    Compact,
    NormBounds,
    DirectNorm,
    Fields,
}

/// Engine settings that replace the defaults when present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_uniform: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_boundary: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shells: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl SupOverrides {
    /// Defaults with these overrides applied and the given seed.
    pub fn apply(&self, seed: u64) -> SupConfig {
        let d = SupConfig::default();
        SupConfig {
            seed,
            n_uniform: self.n_uniform.unwrap_or(d.n_uniform),
            n_boundary: self.n_boundary.unwrap_or(d.n_boundary),
            shells: self.shells.clone().unwrap_or(d.shells),
            refine_top_k: self.refine_top_k.unwrap_or(d.refine_top_k),
            refine_iters: self.refine_iters.unwrap_or(d.refine_iters),
            tol: self.tol.unwrap_or(d.tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub domain: DomainSpec,
    pub psi: String,
    pub phi: Vec<String>,
    #[serde(default)]
    pub target: Target,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub sup: SupOverrides,
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.checks.is_empty() {
            return Err(CliError::Config("checks must not be empty".into()));
        }
        if self.phi.len() != self.domain.dim() {
            return Err(CliError::Config(format!(
                "phi has {} components but the domain has dimension {}",
                self.phi.len(),
                self.domain.dim()
            )));
        }
        if self.target == Target::Hinf && self.checks.contains(&Check::DirectNorm) {
            return Err(CliError::Config("direct_norm is only available for the bloch target".into()));
        }
        self.pair()?;
        self.sup.apply(0).validate()?;
        Ok(())
    }

    pub fn pair(&self) -> Result<SymbolPair, CliError> {
        SymbolPair::parse(self.domain, &self.psi, &self.phi).map_err(|e| match e {
            bloch_wco::Error::Syntax { .. } | bloch_wco::Error::ConjNonConstant { .. } => {
                CliError::Config(format!("cannot parse expression: {e}"))
            }
            other => other.into(),
        })
    }
}
