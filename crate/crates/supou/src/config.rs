//! Versioned JSON experiment configuration: one file describes the model,
//! the simulation settings, the verification thresholds, and output paths,
//! and maps onto the module-level types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CharacteristicQuadruple, LevyMeasureSpec, PiSpec};
use crate::simulate::{BurnIn, SimConfig};
use crate::verify::Thresholds;

/// Schema version this build reads and writes.
pub const CONFIG_VERSION: u32 = 1;

/// Model block: the characteristic quadruple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Drift of the BDLP. Omit to auto-center (zero BDLP mean), which the
    /// heavy-tail theory requires whenever the tail index exceeds 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    /// Gaussian variance coefficient of the BDLP.
    #[serde(default)]
    pub gaussian_b: f64,
    pub levy_measure: LevyMeasureSpec,
    pub mixing: PiSpec,
}

impl ModelConfig {
    pub fn to_quadruple(&self) -> Result<CharacteristicQuadruple> {
        match self.drift {
            Some(a) => CharacteristicQuadruple::new(a, self.gaussian_b, self.levy_measure.clone(), self.mixing.clone()),
            None => {
                let q = CharacteristicQuadruple {
                    a: 0.0,
                    b: self.gaussian_b,
                    mu: self.levy_measure.clone(),
                    pi: self.mixing.clone(),
                }
                .with_zero_mean();
                q.validate()?;
                Ok(q)
            }
        }
    }
}

fn default_cutoff() -> f64 {
    1e-2
}

fn default_burn_in() -> BurnIn {
    BurnIn::StationarySeries
}

/// Simulation block: horizons and ensemble size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Horizons; `simulate` runs the largest, `verify` uses the whole ladder
    /// (which must then be geometric with at least 3 entries).
    pub t_ladder: Vec<f64>,
    /// Output grid spacing for the `simulate` command.
    pub grid_step: f64,
    /// Number of OU summands in the superposition.
    pub superposition_count: usize,
    pub replications: usize,
    #[serde(default = "default_cutoff")]
    pub small_jump_cutoff: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: BurnIn,
}

impl SimulationConfig {
    pub fn horizon(&self) -> Result<f64> {
        self.t_ladder
            .iter()
            .copied()
            .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))))
            .ok_or_else(|| Error::invalid("t_ladder", "must not be empty"))
    }

    /// SimConfig for the largest horizon, gridded at `grid_step`.
    pub fn to_sim_config(&self, seed: u64) -> Result<SimConfig> {
        let horizon = self.horizon()?;
        if !(self.grid_step > 0.0 && self.grid_step <= horizon) {
            return Err(Error::invalid("grid_step", "must be in (0, horizon]"));
        }
        let n = (horizon / self.grid_step).round().max(1.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * horizon / n as f64).collect();
        let mut cfg = SimConfig::new(grid, self.superposition_count, self.replications, seed)?;
        cfg.small_jump_cutoff = self.small_jump_cutoff;
        cfg.burn_in = self.burn_in;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output paths; command-line flags override these.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub paths_csv: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
}

/// Top-level experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub model: ModelConfig,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputConfig,
    /// Master seed; omit to have the CLI generate one (printed to stderr).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    /// Parse and validate. JSON syntax/field errors carry serde_json's
    /// line/column location.
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::invalid(
                "version",
                format!("unsupported config version {} (this build reads {CONFIG_VERSION})", self.version),
            ));
        }
        self.model.to_quadruple()?;
        self.simulation.horizon()?;
        Ok(())
    }
}
