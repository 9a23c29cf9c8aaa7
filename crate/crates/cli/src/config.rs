use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::pipeline::AnalysisSettings;

/// Environment variable consulted for the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TRIPARTITE_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Read { .. } | ConfigError::Parse(_) => 2,
            ConfigError::Invalid { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonRuleChoice {
    Connectivity,
    TargetLd,
    Both,
}

/// Every key is optional here; defaults are filled in by [`RawConfig::validate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub alpha_sq: Option<f64>,
    pub chi_over_lambda: Option<f64>,
    pub kappa_values: Option<Vec<f64>>,
    pub total_steps: Option<usize>,
    pub burn_in_steps: Option<usize>,
    pub epsilon_rule: Option<EpsilonRuleChoice>,
    pub target_ld: Option<f64>,
    pub n_cells: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub mle: Option<bool>,
    pub recurrence: Option<bool>,
    pub network: Option<bool>,
    pub returns: Option<bool>,
    pub spectrum: Option<bool>,
    pub delay_steps: Option<usize>,
    pub embedding_dimension: Option<usize>,
    pub theiler_window_steps: Option<usize>,
    pub fit_start_steps: Option<usize>,
    pub fit_end_steps: Option<usize>,
    pub plot_stride: Option<usize>,
    pub return_map_stride: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    /// Values present in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RawConfig) -> Self {
        overlay!(self, top; alpha_sq, chi_over_lambda, kappa_values, total_steps, burn_in_steps,
            epsilon_rule, target_ld, n_cells, output_dir, mle, recurrence, network, returns, spectrum,
            delay_steps, embedding_dimension, theiler_window_steps, fit_start_steps, fit_end_steps,
            plot_stride, return_map_stride);
        self
    }

    /// Checks and fills the analysis keys only; no physical parameters are needed.
    pub fn analysis_settings(&self) -> Result<AnalysisSettings, ConfigError> {
        let invalid = |field, reason: String| Err(ConfigError::Invalid { field, reason });
        let target_ld = self.target_ld.unwrap_or(0.02);
        if !(target_ld > 0.0 && target_ld <= 0.05) {
            return invalid("target_ld", format!("{target_ld} lies outside (0, 0.05]"));
        }
        let n_cells = self.n_cells.unwrap_or(50);
        if n_cells == 0 {
            return invalid("n_cells", "must be positive".into());
        }
        let fit_start_steps = self.fit_start_steps.unwrap_or(1);
        let fit_end_steps = self.fit_end_steps.unwrap_or(30);
        if fit_end_steps <= fit_start_steps {
            return invalid("fit_end_steps", format!("{fit_end_steps} must exceed fit_start_steps = {fit_start_steps}"));
        }
        for (field, value) in [
            ("delay_steps", self.delay_steps),
            ("embedding_dimension", self.embedding_dimension),
            ("plot_stride", self.plot_stride),
            ("return_map_stride", self.return_map_stride),
        ] {
            if value == Some(0) {
                return invalid(field, "must be positive".into());
            }
        }
        Ok(AnalysisSettings {
            analyses: Analyses {
                mle: self.mle.unwrap_or(true),
                recurrence: self.recurrence.unwrap_or(true),
                network: self.network.unwrap_or(true),
                returns: self.returns.unwrap_or(true),
                spectrum: self.spectrum.unwrap_or(true),
            },
            epsilon_rule: self.epsilon_rule.unwrap_or(EpsilonRuleChoice::Both),
            target_ld,
            n_cells,
            delay_steps: self.delay_steps,
            embedding_dimension: self.embedding_dimension,
            theiler_window_steps: self.theiler_window_steps,
            fit_range: (fit_start_steps, fit_end_steps),
            plot_stride: self.plot_stride.unwrap_or(10),
            return_map_stride: self.return_map_stride.unwrap_or(1),
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("tripartite-output"))
    }

    pub fn validate(&self) -> Result<SweepConfig, ConfigError> {
        let invalid = |field, reason: String| Err(ConfigError::Invalid { field, reason });
        let alpha_sq = self.alpha_sq.unwrap_or(25.0);
        if !(alpha_sq > 0.0 && alpha_sq.is_finite()) {
            return invalid("alpha_sq", format!("{alpha_sq} must be positive"));
        }
        let chi_over_lambda = self.chi_over_lambda.unwrap_or(5.0);
        if !(chi_over_lambda >= 0.0 && chi_over_lambda.is_finite()) {
            return invalid("chi_over_lambda", format!("{chi_over_lambda} must be non-negative"));
        }
        let Some(kappa_values) = self.kappa_values.clone() else {
            return invalid("kappa_values", "missing; give at least one value".into());
        };
        if kappa_values.is_empty() {
            return invalid("kappa_values", "must not be empty".into());
        }
        if let Some(k) = kappa_values.iter().find(|k| !(0.0..=1.0).contains(*k)) {
            return invalid("kappa_values", format!("{k} lies outside [0, 1]"));
        }
        if kappa_values.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("kappa_values", "values must be strictly increasing".into());
        }
        let total_steps = self.total_steps.unwrap_or(35_000);
        let burn_in_steps = self.burn_in_steps.unwrap_or(10_000);
        if total_steps <= burn_in_steps {
            return invalid("total_steps", format!("{total_steps} must exceed burn_in_steps = {burn_in_steps}"));
        }
        Ok(SweepConfig {
            alpha_sq,
            chi_over_lambda,
            kappa_values,
            total_steps,
            burn_in_steps,
            output_dir: self.output_dir(),
            analysis: self.analysis_settings()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Analyses {
    pub mle: bool,
    pub recurrence: bool,
    pub network: bool,
    pub returns: bool,
    pub spectrum: bool,
}

/// Fully resolved sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub alpha_sq: f64,
    pub chi_over_lambda: f64,
    pub kappa_values: Vec<f64>,
    pub total_steps: usize,
    pub burn_in_steps: usize,
    pub output_dir: PathBuf,
    pub analysis: AnalysisSettings,
}

pub fn validate_config(path: &Path) -> Result<SweepConfig, ConfigError> {
    RawConfig::from_path(path)?.validate()
}
