use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guarantees::Route;
use crate::solver::InnerSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    White,
    Black,
}

/// Every setting a command may read. Values come from `--config` first and
/// are overridden by flags; commands then fill in their defaults so the
/// embedded copy in a report is complete.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// JSON configuration file (a previous report is accepted too).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV side output (ξ_k table, γ* sweep).
    #[arg(long)]
    pub csv: Option<PathBuf>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub modes: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n_samples: Option<usize>,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub lambda_bar: Option<f64>,

    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Fractions of β spent on the three deficits of the data-only bound.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub split: Option<Vec<f64>>,
    /// Model-class constant of the a-priori bound.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub route: Option<Route>,

    #[arg(long)]
    pub tol_bisect: Option<f64>,
    #[arg(long)]
    pub tol_inner: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub inner: Option<InnerSolver>,
    /// Cap on enumerated windows.
    #[arg(long)]
    pub budget: Option<u64>,

    #[arg(long)]
    pub q_max: Option<usize>,
    #[arg(long)]
    pub spectral_target: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Nested sample sizes for a γ* sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,

    #[arg(long)]
    pub varepsilon: Option<f64>,
    #[arg(long = "chi-q")]
    pub chi_q: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Fields set in `top` win over `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; config, system, trajectories, pairs, out, csv, seed, n, modes, p, n_samples, horizon, k,
            lambda_bar, mode, beta, split, c, route, tol_bisect, tol_inner, max_iter, inner, budget, q_max,
            spectral_target, k_max, threshold, sweep, varepsilon, chi_q)
    }

    /// Loads a configuration file. A report file contributes the
    /// configuration embedded in its provenance.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let inner = value.pointer("/provenance/config").or_else(|| value.get("config")).cloned();
        let cfg = match inner {
            Some(v) if !v.is_null() => v,
            _ => value,
        };
        serde_json::from_value(cfg).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// Applies `--config` (if any) beneath the flags.
    pub fn resolve(flags: RunConfig) -> Result<RunConfig> {
        match &flags.config {
            Some(path) => Ok(RunConfig::load(path)?.overlay(flags)),
            None => Ok(flags),
        }
    }

    /// The configuration as embedded in reports. Output paths are left out
    /// so a rerun from a report reproduces it byte for byte.
    pub fn to_value(&self) -> serde_json::Value {
        let embedded = RunConfig {
            out: None,
            csv: None,
            ..self.clone()
        };
        serde_json::to_value(embedded).expect("config serializes")
    }
}
