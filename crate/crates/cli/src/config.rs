//! Experiment configuration.
//!
//! ```json
//! {
//!   "T": 0.5, "theta": 0.1, "r": 2.0,
//!   "method": "taylor",
//!   "d_range": {"min": 0, "max": 12},
//!   "signal": {"kind": "poisson", "params": {"a": 1.5}},
//!   "tgrid": {"t_min": -2.0, "t_max": 2.0, "n_points": 41},
//!   "grid": {"omega_max": 100.0, "n_points": 4096},
//!   "nu_range": [0.0, 0.01, 0.1],
//!   "p": 2,
//!   "eps_target": 1e-6,
//!   "output_dir": "out"
//! }
//! ```
//!
//! `precision` (`"double"` or `"extended"`) is optional and defaults to double.

use std::fs;
use std::path::{Path, PathBuf};

use horizon::kernels::{bump_kernel, TargetKernel};
use horizon::spectral::{GridSpec, TimeGridSpec};
use horizon::{Method, NoiseP, Precision, Signal, SpectralGrid, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Inclusive degree range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeRange {
    pub min: usize,
    pub max: usize,
}

impl DegreeRange {
    pub fn degrees(&self) -> Vec<usize> {
        (self.min..=self.max).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub theta: f64,
    pub r: f64,
    pub method: Method,
    pub d_range: DegreeRange,
    pub signal: Signal,
    pub tgrid: TimeGridSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub nu_range: Vec<f64>,
    pub p: NoiseP,
    pub eps_target: f64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub precision: Precision,
}

impl ExperimentConfig {
    /// Reads and validates a config file. Parse errors carry line and column.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|f| match f {
            Failure::Config(msg) => Failure::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Failure::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |key: &str, msg: String| Failure::Config(format!("key `{key}`: {msg}"));
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(bad("T", format!("must be finite and non-negative, got {}", self.horizon)));
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(bad("theta", format!("must be finite and non-negative, got {}", self.theta)));
        }
        if self.horizon + self.theta <= 0.0 {
            return Err(bad("theta", "T + theta must be positive".into()));
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(bad("r", format!("must be positive, got {}", self.r)));
        }
        if self.d_range.min > self.d_range.max {
            return Err(bad("d_range", format!("empty range {}..={}", self.d_range.min, self.d_range.max)));
        }
        if !(self.eps_target.is_finite() && self.eps_target > 0.0) {
            return Err(bad("eps_target", format!("must be positive, got {}", self.eps_target)));
        }
        if let Some(nu) = self.nu_range.iter().find(|nu| !(nu.is_finite() && **nu >= 0.0)) {
            return Err(bad("nu_range", format!("entries must be non-negative, got {nu}")));
        }
        self.signal.validate().map_err(|e| bad("signal", e.to_string()))?;
        self.time_grid().map_err(|e| bad("tgrid", e.to_string()))?;
        self.spectral_grid().map_err(|e| bad("grid", e.to_string()))?;
        Ok(())
    }

    pub fn kernel(&self) -> horizon::Result<TargetKernel> {
        bump_kernel(self.horizon, self.theta)
    }

    pub fn time_grid(&self) -> horizon::Result<TimeGrid> {
        TimeGrid::from_spec(self.tgrid)
    }

    pub fn spectral_grid(&self) -> horizon::Result<SpectralGrid> {
        SpectralGrid::from_spec(self.grid)
    }
}
