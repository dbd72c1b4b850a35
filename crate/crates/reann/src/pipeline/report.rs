//! Run report and artifact serialization.

use crate::discretizer::ClusteringFile;
use crate::error::Result;
use crate::pruner::PruneReport;
use crate::rex::RuleSet;
use crate::trainer::TrainReport;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    /// Usable examples after dropping rows with missing values.
    pub examples: usize,
    pub raw_rows: usize,
    pub dropped_rows: usize,
    pub attributes: usize,
    pub encoded_inputs: usize,
    pub classes: usize,
    pub train_size: usize,
    pub test_size: usize,
}

/// Correct/total with the ratio stored alongside.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct AccuracyCount {
    pub correct: usize,
    pub total: usize,
    pub ratio: f64,
}

impl AccuracyCount {
    pub fn new(correct: usize, total: usize) -> Self {
        AccuracyCount {
            correct,
            total,
            ratio: correct as f64 / total as f64,
        }
    }
}

/// Network and rule accuracies on both splits. Test entries are absent when
/// the test split is empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccuracyQuad {
    pub network_train: AccuracyCount,
    pub network_test: Option<AccuracyCount>,
    pub rules_train: AccuracyCount,
    pub rules_test: Option<AccuracyCount>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WallClock {
    pub load_s: f64,
    pub train_s: f64,
    pub prune_s: f64,
    pub discretize_s: f64,
    pub extract_s: f64,
    pub evaluate_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub dataset: DatasetSummary,
    pub train: TrainReport,
    pub prune: PruneReport,
    pub clustering: ClusteringFile,
    pub rules: RuleSet,
    /// Display names for rule conditions, by class index.
    pub class_names: Vec<String>,
    pub accuracy: AccuracyQuad,
    /// Agreement between the rule set and the discretized pruned network on
    /// the training split.
    pub fidelity_train: f64,
    pub wall_clock: WallClock,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_matches_counts() {
        let a = AccuracyCount::new(327, 350);
        assert!((a.ratio - 327.0 / 350.0).abs() < 1e-15);
        assert!((a.ratio * 100.0 - 93.43).abs() < 0.005);
    }
}
