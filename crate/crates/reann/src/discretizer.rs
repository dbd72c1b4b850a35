//! Clustering of hidden-unit activations into a few discrete values.
//!
//! Per hidden unit, activation values over the training set are processed
//! in sorted order: a value joins the current cluster while it stays within
//! ε of the cluster's running mean, otherwise a new cluster opens. Cluster
//! centers are then recomputed as member means and every value is assigned
//! to its nearest center. The clustering is accepted only if replacing
//! activations by their centers keeps the training accuracy at or above the
//! floor; otherwise ε shrinks and the pass repeats.

use crate::dataset::Example;
use crate::error::{Error, Result};
use crate::network::{accuracy, argmax, forward, forward_from_hidden, Network};
use crate::scalar::{lit, to_f64, Scalar};
use serde::{Deserialize, Serialize};

/// ε below which the search gives up.
const MIN_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Initial ε, within [0.1, 1.0].
    pub epsilon: f64,
    /// Required discretized training accuracy. `None` means the network's
    /// own training accuracy.
    pub accuracy_floor: Option<f64>,
    /// Multiplier applied to ε after a failed validation, in (0, 1).
    pub shrink_factor: f64,
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.1..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!(
                "cluster epsilon {} outside [0.1, 1.0]",
                self.epsilon
            )));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::Config(format!(
                "cluster shrink_factor {} outside (0, 1)",
                self.shrink_factor
            )));
        }
        Ok(())
    }
}

/// Clusters for one hidden unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct UnitClustering<F: Scalar> {
    /// Cluster centers in ascending order.
    pub centers: Vec<F>,
    /// Training members per cluster.
    pub counts: Vec<usize>,
    /// Cluster index per training example.
    pub assignments: Vec<usize>,
}

impl<F: Scalar> UnitClustering<F> {
    /// Index of the center nearest to `value`; ties go to the lower index.
    pub fn nearest(&self, value: F) -> usize {
        let mut best = 0usize;
        let mut best_d = (value - self.centers[0]).abs();
        for (i, &c) in self.centers.iter().enumerate().skip(1) {
            let d = (value - c).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}

/// Discretization of every hidden unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ActivationClustering<F: Scalar> {
    pub units: Vec<UnitClustering<F>>,
    /// ε that produced the accepted clustering.
    pub epsilon: f64,
}

/// One greedy pass at a fixed ε over already-sorted (value, row) pairs.
///
/// A value joins the current cluster when it lies within ε of the running
/// mean and the join keeps both cluster extremes within ε of the updated
/// mean, so recomputing centers as means cannot break ε-coverage.
fn greedy_pass<F: Scalar>(sorted: &[(F, usize)], eps: F) -> Vec<Vec<(F, usize)>> {
    let mut clusters: Vec<Vec<(F, usize)>> = Vec::new();
    let mut sum = F::zero();
    let mut min = F::zero();
    for &(value, row) in sorted {
        let joined = match clusters.last_mut() {
            Some(current) => {
                let n = lit::<F>(current.len() as f64);
                let mean = sum / n;
                let new_mean = (sum + value) / (n + F::one());
                let fits = (value - mean).abs() <= eps
                    && (value - new_mean).abs() <= eps
                    && (min - new_mean).abs() <= eps;
                if fits {
                    current.push((value, row));
                    sum = sum + value;
                }
                fits
            }
            None => false,
        };
        if !joined {
            clusters.push(vec![(value, row)]);
            sum = value;
            min = value;
        }
    }
    clusters
}

fn cluster_unit<F: Scalar>(values: &[F], eps: F) -> UnitClustering<F> {
    let mut sorted: Vec<(F, usize)> = values.iter().copied().zip(0..).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let clusters = greedy_pass(&sorted, eps);
    let mut centers: Vec<F> = clusters
        .iter()
        .map(|members| {
            let sum = members.iter().fold(F::zero(), |acc, &(v, _)| acc + v);
            sum / lit::<F>(members.len() as f64)
        })
        .collect();
    centers.dedup();

    // Normalize membership to nearest-center and drop centers that lose
    // all members.
    let mut unit = UnitClustering {
        centers,
        counts: vec![],
        assignments: vec![],
    };
    let mut counts = vec![0usize; unit.centers.len()];
    let mut assignments = vec![0usize; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let c = unit.nearest(v);
        counts[c] += 1;
        assignments[i] = c;
    }
    if counts.contains(&0) {
        let mut remap = vec![usize::MAX; unit.centers.len()];
        let mut kept = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                remap[i] = kept.len();
                kept.push(unit.centers[i]);
            }
        }
        unit.centers = kept;
        counts.retain(|&c| c > 0);
        for a in assignments.iter_mut() {
            *a = remap[*a];
        }
    }
    unit.counts = counts;
    unit.assignments = assignments;
    unit
}

fn coverage_holds<F: Scalar>(values: &[F], unit: &UnitClustering<F>, eps: F) -> bool {
    values
        .iter()
        .zip(&unit.assignments)
        .all(|(&v, &a)| (v - unit.centers[a]).abs() <= eps)
}

/// Clusters every hidden unit's training activations, shrinking ε until the
/// discretized network keeps the required training accuracy.
pub fn cluster_activations<F: Scalar>(
    net: &Network<F>,
    train: &[Example<F>],
    cfg: &ClusterConfig,
) -> Result<ActivationClustering<F>> {
    cfg.validate()?;
    let floor = cfg.accuracy_floor.unwrap_or_else(|| accuracy(net, train));

    let activations: Vec<Vec<F>> = {
        let mut per_unit = vec![Vec::with_capacity(train.len()); net.h];
        for ex in train {
            let trace = forward(net, &ex.inputs);
            for (m, &a) in trace.hidden_act.iter().enumerate() {
                per_unit[m].push(a);
            }
        }
        per_unit
    };

    let mut eps = cfg.epsilon;
    loop {
        let eps_f = lit::<F>(eps);
        let units: Vec<UnitClustering<F>> = activations
            .iter()
            .map(|values| cluster_unit(values, eps_f))
            .collect();
        let clustering = ActivationClustering {
            units,
            epsilon: eps,
        };

        let covered = activations
            .iter()
            .zip(&clustering.units)
            .all(|(values, unit)| coverage_holds(values, unit, eps_f));
        if covered && discretized_accuracy(net, &clustering, train) >= floor - 1e-12 {
            return Ok(clustering);
        }

        eps *= cfg.shrink_factor;
        if eps < MIN_EPSILON {
            return Err(Error::DiscretizationFailed {
                min_epsilon: MIN_EPSILON,
            });
        }
    }
}

/// Predicted class with every hidden activation snapped to its nearest
/// cluster center.
pub fn discretized_predict<F: Scalar>(
    net: &Network<F>,
    clustering: &ActivationClustering<F>,
    inputs: &[F],
) -> usize {
    let trace = forward(net, inputs);
    let snapped: Vec<F> = trace
        .hidden_act
        .iter()
        .zip(&clustering.units)
        .map(|(&a, unit)| unit.centers[unit.nearest(a)])
        .collect();
    argmax(&forward_from_hidden(net, &snapped))
}

/// Fraction of examples classified correctly with snapped activations.
pub fn discretized_accuracy<F: Scalar>(
    net: &Network<F>,
    clustering: &ActivationClustering<F>,
    data: &[Example<F>],
) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .iter()
        .filter(|ex| discretized_predict(net, clustering, &ex.inputs) == ex.target)
        .count();
    correct as f64 / data.len() as f64
}

/// JSON form: centers and counts per unit (assignments are recomputable as
/// nearest-center memberships).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringFile {
    pub epsilon: f64,
    pub units: Vec<ClusteringFileUnit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringFileUnit {
    pub centers: Vec<f64>,
    pub counts: Vec<usize>,
}

impl ClusteringFile {
    pub fn from_clustering<F: Scalar>(c: &ActivationClustering<F>) -> Self {
        ClusteringFile {
            epsilon: c.epsilon,
            units: c
                .units
                .iter()
                .map(|u| ClusteringFileUnit {
                    centers: u.centers.iter().map(|&x| to_f64(x)).collect(),
                    counts: u.counts.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds full clustering state against the given training set.
    pub fn into_clustering<F: Scalar>(
        &self,
        net: &Network<F>,
        train: &[Example<F>],
    ) -> Result<ActivationClustering<F>> {
        if self.units.len() != net.h {
            return Err(Error::InvalidState(
                "clustering file does not match the network's hidden layer".into(),
            ));
        }
        let mut units: Vec<UnitClustering<F>> = self
            .units
            .iter()
            .map(|u| UnitClustering {
                centers: u.centers.iter().map(|&x| lit(x)).collect(),
                counts: vec![0; u.centers.len()],
                assignments: vec![],
            })
            .collect();
        for ex in train {
            let trace = forward(net, &ex.inputs);
            for (m, unit) in units.iter_mut().enumerate() {
                let c = unit.nearest(trace.hidden_act[m]);
                unit.counts[c] += 1;
                unit.assignments.push(c);
            }
        }
        Ok(ActivationClustering {
            units,
            epsilon: self.epsilon,
        })
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
