//! Pipeline configuration file: dataset schema plus every stage's knobs.

use crate::dataset::DatasetConfig;
use crate::error::{Error, Result};
use crate::pruner::PruneConfig;
use crate::rex::RexConfig;
use crate::trainer::TrainConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Clustering knobs as they appear in the config file. The absolute
/// accuracy floor is derived at run time from the pruned network's
/// training accuracy minus `accuracy_floor_delta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterFileConfig {
    pub epsilon: f64,
    #[serde(default = "default_floor_delta")]
    pub accuracy_floor_delta: f64,
    #[serde(default = "default_shrink")]
    pub shrink_factor: f64,
}

fn default_floor_delta() -> f64 {
    0.005
}

fn default_shrink() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub dataset: DatasetConfig,
    pub train: TrainConfig<f64>,
    pub prune: PruneConfig,
    pub cluster: ClusterFileConfig,
    #[serde(default)]
    pub rex: RexConfig,
}

impl PipelineConfig {
    /// Reads and validates a config file; the dataset path is resolved
    /// relative to the config file's directory.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if cfg.dataset.path.is_relative() {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            cfg.dataset.path = base.join(&cfg.dataset.path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        self.train.validate()?;
        self.prune.validate()?;
        if !(0.1..=1.0).contains(&self.cluster.epsilon) {
            return Err(Error::Config(format!(
                "cluster epsilon {} outside [0.1, 1.0]",
                self.cluster.epsilon
            )));
        }
        if !(self.cluster.shrink_factor > 0.0 && self.cluster.shrink_factor < 1.0) {
            return Err(Error::Config("cluster shrink_factor outside (0, 1)".into()));
        }
        if self.cluster.accuracy_floor_delta < 0.0 {
            return Err(Error::Config(
                "cluster accuracy_floor_delta must be nonnegative".into(),
            ));
        }
        if self.rex.dnf_cap == 0 {
            return Err(Error::Config("rex dnf_cap must be positive".into()));
        }
        Ok(())
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.dataset.path.clone()
    }
}
