//! End-to-end orchestration: load → train → prune → discretize → extract →
//! evaluate, with every intermediate artifact serialized to the output
//! directory.

pub mod config;
pub mod report;

pub use config::{ClusterFileConfig, PipelineConfig};
pub use report::{AccuracyCount, AccuracyQuad, DatasetSummary, RunReport, WallClock};

use crate::dataset::{self, AttributeRange, Dataset, Example, RawValue};
use crate::discretizer::{
    cluster_activations, discretized_predict, ActivationClustering, ClusterConfig, ClusteringFile,
};
use crate::error::{Error, Result};
use crate::network::{accuracy, predict, Network, NetworkFile};
use crate::pruner::{prune_nodes, prune_weights, PruneReport};
use crate::rex::{
    boundary_thresholds, cluster_rules, extract_rules, merge_rule_layers, render_text, Cell,
    ColumnKind, RexColumn, RexTable, Rule, RuleSet,
};
use crate::trainer::{constructive_train, TrainReport};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// A pruned network plus the encoded-input indices it still consumes.
#[derive(Debug, Clone)]
pub struct PrunedModel {
    pub net: Network<f64>,
    pub input_indices: Vec<usize>,
}

impl PrunedModel {
    pub fn project(&self, inputs: &[f64]) -> Vec<f64> {
        self.input_indices.iter().map(|&i| inputs[i]).collect()
    }

    pub fn project_examples(&self, data: &[Example<f64>]) -> Vec<Example<f64>> {
        data.iter()
            .map(|ex| Example {
                raw: ex.raw.clone(),
                inputs: self.project(&ex.inputs),
                target: ex.target,
            })
            .collect()
    }

    pub fn predict_encoded(&self, inputs: &[f64]) -> usize {
        predict(&self.net, &self.project(inputs))
    }
}

/// JSON wrapper for the rule set with display names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RulesFile {
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
    #[serde(flatten)]
    pub rules: RuleSet,
}

pub fn stage_load(cfg: &PipelineConfig) -> Result<Dataset<f64>> {
    dataset::load_prepared(&cfg.dataset_path(), &cfg.dataset).map_err(|e| e.in_stage("load"))
}

pub fn stage_train(
    cfg: &PipelineConfig,
    seed: u64,
    data: &Dataset<f64>,
) -> Result<(Network<f64>, TrainReport)> {
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = seed;
    constructive_train(
        data.encoded_width,
        data.n_classes(),
        data.train(),
        &train_cfg,
    )
    .map_err(|e| e.in_stage("train"))
}

pub fn stage_prune(
    cfg: &PipelineConfig,
    net: Network<f64>,
    data: &Dataset<f64>,
) -> Result<(PrunedModel, PruneReport)> {
    let (pruned, mut prune_report) = prune_weights(net, data.train(), &cfg.prune, &cfg.train)
        .map_err(|e| e.in_stage("prune"))?;
    let (reduced, map) = prune_nodes(pruned).map_err(|e| e.in_stage("prune"))?;
    prune_report.removed_inputs = map.removed_inputs.clone();
    prune_report.removed_hidden = map.removed_hidden.clone();
    prune_report.final_connections = reduced.live_connections();
    let model = PrunedModel {
        net: reduced,
        input_indices: map.kept_inputs,
    };
    prune_report.final_accuracy = accuracy(&model.net, &model.project_examples(data.train()));
    Ok((model, prune_report))
}

pub fn stage_discretize(
    cfg: &PipelineConfig,
    model: &PrunedModel,
    data: &Dataset<f64>,
) -> Result<ActivationClustering<f64>> {
    let train = model.project_examples(data.train());
    let floor = accuracy(&model.net, &train) - cfg.cluster.accuracy_floor_delta;
    let cluster_cfg = ClusterConfig {
        epsilon: cfg.cluster.epsilon,
        accuracy_floor: Some(floor.max(0.0)),
        shrink_factor: cfg.cluster.shrink_factor,
    };
    cluster_activations(&model.net, &train, &cluster_cfg).map_err(|e| e.in_stage("discretize"))
}

/// Original attributes that still feed the pruned network.
fn surviving_attributes(data: &Dataset<f64>, model: &PrunedModel) -> Vec<usize> {
    let mut attrs = Vec::new();
    for (a, slot) in data.encoding.iter().enumerate() {
        let live = model
            .input_indices
            .iter()
            .any(|&i| i >= slot.offset && i < slot.offset + slot.width);
        if live {
            attrs.push(a);
        }
    }
    attrs
}

/// Builds the cluster-index table whose class column is the discretized
/// network's prediction.
fn hidden_layer_table(
    model: &PrunedModel,
    clustering: &ActivationClustering<f64>,
    train: &[Example<f64>],
    n_classes: usize,
) -> RexTable {
    let columns: Vec<RexColumn> = clustering
        .units
        .iter()
        .enumerate()
        .map(|(m, unit)| RexColumn {
            attr: m,
            kind: ColumnKind::Discrete {
                n_values: unit.centers.len(),
            },
        })
        .collect();
    let rows: Vec<Vec<Cell>> = (0..train.len())
        .map(|i| {
            clustering
                .units
                .iter()
                .map(|unit| Cell::Cat(unit.assignments[i]))
                .collect()
        })
        .collect();
    let classes: Vec<usize> = train
        .iter()
        .map(|ex| discretized_predict(&model.net, clustering, &ex.inputs))
        .collect();
    RexTable::new(columns, rows, classes, n_classes)
}

/// Builds one inputs-versus-cluster table for a hidden unit. Column kinds
/// come from the schema; continuous thresholds sit at cluster-boundary
/// midpoints in original attribute units.
fn input_layer_table(
    data: &Dataset<f64>,
    train: &[Example<f64>],
    attrs: &[usize],
    classes: Vec<usize>,
    n_classes: usize,
) -> RexTable {
    let columns: Vec<RexColumn> = attrs
        .iter()
        .map(|&a| {
            let kind = match &data.meta[a].kind {
                AttributeRange::Discrete { categories } => ColumnKind::Discrete {
                    n_values: categories.len(),
                },
                AttributeRange::Continuous { .. } => {
                    let values: Vec<f64> = train
                        .iter()
                        .map(|ex| match ex.raw[a] {
                            RawValue::Num(x) => x,
                            RawValue::Cat(_) => unreachable!("continuous attribute"),
                        })
                        .collect();
                    ColumnKind::Continuous {
                        thresholds: boundary_thresholds(&values, &classes),
                    }
                }
            };
            RexColumn { attr: a, kind }
        })
        .collect();
    let rows: Vec<Vec<Cell>> = train
        .iter()
        .map(|ex| {
            attrs
                .iter()
                .map(|&a| match ex.raw[a] {
                    RawValue::Num(x) => Cell::Num(x),
                    RawValue::Cat(c) => Cell::Cat(c),
                })
                .collect()
        })
        .collect();
    RexTable::new(columns, rows, classes, n_classes)
}

/// Steps: rules for outputs in terms of clusters, rules for clusters in
/// terms of inputs, merge, prune.
pub fn stage_extract(
    cfg: &PipelineConfig,
    data: &Dataset<f64>,
    model: &PrunedModel,
    clustering: &ActivationClustering<f64>,
) -> Result<RuleSet> {
    let train = model.project_examples(data.train());
    let o = data.n_classes();

    let hidden_table = hidden_layer_table(model, clustering, &train, o);
    let hidden_rules = cluster_rules(extract_rules(&hidden_table));

    let attrs = surviving_attributes(data, model);
    if attrs.is_empty() {
        return Err(
            Error::InvalidState("no attributes survived pruning".into()).in_stage("extract")
        );
    }

    let mut input_rules: Vec<Vec<Vec<Rule>>> = Vec::with_capacity(clustering.units.len());
    for unit in &clustering.units {
        let table = input_layer_table(
            data,
            data.train(),
            &attrs,
            unit.assignments.clone(),
            unit.centers.len(),
        );
        let rules = extract_rules(&table);
        let mut per_cluster: Vec<Vec<Rule>> = vec![Vec::new(); unit.centers.len()];
        for rule in rules {
            per_cluster[rule.class].push(rule);
        }
        input_rules.push(per_cluster);
    }

    let eval_table = input_layer_table(data, data.train(), &attrs, hidden_table.classes.clone(), o);
    merge_rule_layers(
        &hidden_rules,
        &input_rules,
        &eval_table,
        cfg.rex.noise_threshold,
        cfg.rex.dnf_cap,
    )
    .map_err(|e| e.in_stage("extract"))
}

/// Network and rule accuracies on both splits, against true labels.
pub fn evaluate(data: &Dataset<f64>, model: &PrunedModel, rules: &RuleSet) -> AccuracyQuad {
    let count_net = |examples: &[Example<f64>]| -> Option<AccuracyCount> {
        if examples.is_empty() {
            return None;
        }
        let correct = examples
            .iter()
            .filter(|ex| model.predict_encoded(&ex.inputs) == ex.target)
            .count();
        Some(AccuracyCount::new(correct, examples.len()))
    };
    let count_rules = |examples: &[Example<f64>]| -> Option<AccuracyCount> {
        if examples.is_empty() {
            return None;
        }
        let correct = examples
            .iter()
            .filter(|ex| rules.classify(&ex.raw) == ex.target)
            .count();
        Some(AccuracyCount::new(correct, examples.len()))
    };
    AccuracyQuad {
        network_train: count_net(data.train()).expect("training split is never empty"),
        network_test: count_net(data.test()),
        rules_train: count_rules(data.train()).expect("training split is never empty"),
        rules_test: count_rules(data.test()),
    }
}

/// Agreement between rule classification and the discretized network on
/// the training split.
pub fn fidelity(
    data: &Dataset<f64>,
    model: &PrunedModel,
    clustering: &ActivationClustering<f64>,
    rules: &RuleSet,
) -> f64 {
    let train = data.train();
    if train.is_empty() {
        return 0.0;
    }
    let agree = train
        .iter()
        .filter(|ex| {
            let net_class = discretized_predict(&model.net, clustering, &model.project(&ex.inputs));
            rules.classify(&ex.raw) == net_class
        })
        .count();
    agree as f64 / train.len() as f64
}

fn attribute_names(data: &Dataset<f64>) -> Vec<String> {
    data.meta.iter().map(|m| m.name.clone()).collect()
}

/// Holds the lock on an output directory for the process lifetime.
pub struct OutDirLock {
    path: PathBuf,
}

impl OutDirLock {
    pub fn acquire(dir: &Path) -> Result<OutDirLock> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(".reann.lock");
        match std::fs::File::create_new(&path) {
            Ok(_) => Ok(OutDirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::InvalidState(format!(
                    "output directory {} is locked by another run (remove {} if stale)",
                    dir.display(),
                    path.display()
                )))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for OutDirLock {
    fn drop(&mut self) {
        std::fs::remove_file(&self.path).ok();
    }
}

/// Runs every stage, serializing artifacts as each completes.
pub fn run_pipeline(cfg: &PipelineConfig, seed: u64, out: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out)?;
    let mut clock = WallClock::default();

    let t = Instant::now();
    let data = stage_load(cfg)?;
    clock.load_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (trained, train_report) = stage_train(cfg, seed, &data)?;
    clock.train_s = t.elapsed().as_secs_f64();
    NetworkFile::from_network(&trained, (0..trained.n).collect())
        .write_json(&out.join("network-trained.json"))?;
    std::fs::write(out.join("training_curve.csv"), train_report.to_csv())?;

    let t = Instant::now();
    let (model, prune_report) = stage_prune(cfg, trained, &data)?;
    clock.prune_s = t.elapsed().as_secs_f64();
    NetworkFile::from_network(&model.net, model.input_indices.clone())
        .write_json(&out.join("network.json"))?;
    report::write_json(&prune_report, &out.join("prune_report.json"))?;

    let t = Instant::now();
    let clustering = stage_discretize(cfg, &model, &data)?;
    clock.discretize_s = t.elapsed().as_secs_f64();
    let clustering_file = ClusteringFile::from_clustering(&clustering);
    clustering_file.write_json(&out.join("clusters.json"))?;

    let t = Instant::now();
    let rules = stage_extract(cfg, &data, &model, &clustering)?;
    clock.extract_s = t.elapsed().as_secs_f64();
    let rules_file = RulesFile {
        attribute_names: attribute_names(&data),
        class_names: data.class_names.clone(),
        rules: rules.clone(),
    };
    report::write_json(&rules_file, &out.join("rules.json"))?;
    std::fs::write(
        out.join("rules.txt"),
        render_text(&rules, &data.meta, &data.class_names),
    )?;

    let t = Instant::now();
    let accuracy_quad = evaluate(&data, &model, &rules);
    let fidelity_train = fidelity(&data, &model, &clustering, &rules);
    clock.evaluate_s = t.elapsed().as_secs_f64();

    let split = data.split.clone().expect("prepared dataset has a split");
    let run_report = RunReport {
        seed,
        dataset: DatasetSummary {
            examples: data.k(),
            raw_rows: data.raw_rows,
            dropped_rows: data.dropped_rows,
            attributes: data.meta.len(),
            encoded_inputs: data.encoded_width,
            classes: data.n_classes(),
            train_size: split.train.len(),
            test_size: split.test.len(),
        },
        train: train_report,
        prune: prune_report,
        clustering: clustering_file,
        rules,
        class_names: data.class_names.clone(),
        accuracy: accuracy_quad,
        fidelity_train,
        wall_clock: clock,
    };
    report::write_json(&run_report, &out.join("report.json"))?;
    Ok(run_report)
}
