//! Integration checks of the pipeline against the bundled fixtures.

use reann::dataset::{self, AttrKind, ClassSpec, ColumnSpec, DatasetConfig, SplitMode};
use reann::pipeline::{self, PipelineConfig, RunReport};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(config: &str, tag: &str) -> RunReport {
    let cfg = PipelineConfig::load(&config_path(config)).unwrap();
    let out = std::env::temp_dir().join(format!("reann-pipe-{tag}-{}", std::process::id()));
    std::fs::remove_dir_all(&out).ok();
    pipeline::run_pipeline(&cfg, cfg.train.seed, &out).unwrap()
}

fn cancer_report() -> &'static RunReport {
    static R: OnceLock<RunReport> = OnceLock::new();
    R.get_or_init(|| run("cancer.json", "cancer"))
}

#[test]
fn cancer_fixture_has_the_published_shape() {
    let cfg = PipelineConfig::load(&config_path("cancer.json")).unwrap();
    let data = pipeline::stage_load(&cfg).unwrap();
    assert_eq!(data.raw_rows, 699);
    assert_eq!(data.dropped_rows, 16);
    assert_eq!(data.k(), 683);
    assert_eq!(data.meta.len(), 9);
    assert_eq!(data.n_classes(), 2);
    let split = data.split.clone().unwrap();
    assert_eq!(split.train.len(), 342);
    assert_eq!(split.test.len(), 341);
}

#[test]
fn season_fixture_has_the_published_shape() {
    let cfg = PipelineConfig::load(&config_path("season.json")).unwrap();
    let data = pipeline::stage_load(&cfg).unwrap();
    assert_eq!(data.k(), 11);
    assert_eq!(data.meta.len(), 3);
    assert!(data.meta.iter().all(|m| !m.is_continuous()));
    assert_eq!(data.n_classes(), 4);
    let split = data.split.clone().unwrap();
    assert_eq!((split.train.len(), split.test.len()), (11, 11));
}

#[test]
fn single_hidden_unit_reaches_target_on_cancer_training_data() {
    let cfg = PipelineConfig::load(&config_path("cancer.json")).unwrap();
    let data = pipeline::stage_load(&cfg).unwrap();
    let mut train_cfg = cfg.train.clone();
    train_cfg.max_hidden = 1;
    train_cfg.target_accuracy = 0.93;
    let (net, report) = reann::trainer::constructive_train(
        data.encoded_width,
        data.n_classes(),
        data.train(),
        &train_cfg,
    )
    .unwrap();
    assert_eq!(net.h, 1);
    assert!(
        report.final_accuracy >= 0.93,
        "single-unit training accuracy {:.4}",
        report.final_accuracy
    );
}

#[test]
fn cancer_rule_set_is_one_rule_plus_default() {
    let report = cancer_report();
    assert_eq!(report.rules.rules.len(), 1);
    assert_eq!(report.rules.default_class, Some(1));
    // The non-default rule carries exactly three conditions.
    assert_eq!(report.rules.rules[0].conditions.len(), 3);
}

#[test]
fn cancer_clustering_matches_the_expected_structure() {
    // Two saturated activation groups carry the two class masses; any
    // further clusters are small transitional ones. Counts are compared
    // per activation side because transitional clusters may split off.
    let report = cancer_report();
    let unit = &report.clustering.units[0];
    let k = unit.centers.len();
    assert!((2..=4).contains(&k));
    let negative: usize = unit
        .centers
        .iter()
        .zip(&unit.counts)
        .filter(|(c, _)| **c < 0.0)
        .map(|(_, n)| *n)
        .sum();
    let positive: usize = unit.counts.iter().sum::<usize>() - negative;
    let (majority, minority) = (negative.max(positive), negative.min(positive));
    assert!(
        (majority as i64 - 238).unsigned_abs() <= 10,
        "majority activation side holds {majority} training examples"
    );
    assert!(
        (minority as i64 - 106).unsigned_abs() <= 10,
        "minority activation side holds {minority} training examples"
    );
    let dominant = unit
        .centers
        .iter()
        .zip(&unit.counts)
        .filter(|(_, n)| **n > 16)
        .map(|(c, _)| *c)
        .collect::<Vec<_>>();
    assert!(
        dominant.iter().all(|c| c.abs() >= 0.8),
        "dominant cluster centers not saturated: {dominant:?}"
    );
}

#[test]
fn season_run_yields_five_rules_including_default() {
    let report = run("season.json", "season");
    assert_eq!(report.rules.rules.len() + 1, 5);
    assert_eq!(report.accuracy.rules_train.correct, 11);
    assert_eq!(report.accuracy.rules_test.unwrap().correct, 11);
    // Default is the class with no remaining rule.
    let default = report.rules.default_class.unwrap();
    assert!(report.rules.rules.iter().all(|r| r.class != default));
}

#[test]
fn golf_run_is_exact_on_both_splits() {
    let report = run("golf.json", "golf");
    assert_eq!(report.accuracy.rules_train.correct, 14);
    assert_eq!(report.accuracy.rules_test.unwrap().correct, 14);
    assert!(report.rules.rules.len() < 4);
}

#[test]
fn report_percentages_match_their_counts() {
    let report = cancer_report();
    let entries = [
        Some(report.accuracy.network_train),
        report.accuracy.network_test,
        Some(report.accuracy.rules_train),
        report.accuracy.rules_test,
    ];
    for entry in entries.into_iter().flatten() {
        let recomputed = entry.correct as f64 / entry.total as f64;
        assert!((entry.ratio - recomputed).abs() < 5e-5);
    }
}

#[test]
fn run_report_is_reproducible_modulo_wall_clock() {
    let cfg = PipelineConfig::load(&config_path("season.json")).unwrap();
    let strip = |r: &RunReport| {
        let mut v = serde_json::to_value(r).unwrap();
        v.as_object_mut().unwrap().remove("wall_clock");
        v
    };
    let out_a = std::env::temp_dir().join(format!("reann-rep-a-{}", std::process::id()));
    let out_b = std::env::temp_dir().join(format!("reann-rep-b-{}", std::process::id()));
    std::fs::remove_dir_all(&out_a).ok();
    std::fs::remove_dir_all(&out_b).ok();
    let a = pipeline::run_pipeline(&cfg, 99, &out_a).unwrap();
    let b = pipeline::run_pipeline(&cfg, 99, &out_b).unwrap();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn empty_test_split_reports_absent_accuracies() {
    // A one-row dataset under the half split leaves the test side empty.
    let dir = std::env::temp_dir().join(format!("reann-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).ok();
    let csv = dir.join("one.csv");
    std::fs::write(&csv, "0.4,yes\n").unwrap();
    let dcfg = DatasetConfig {
        path: csv.clone(),
        has_header: false,
        split: SplitMode::Half,
        columns: vec![
            ColumnSpec::Attribute {
                name: "x".into(),
                kind: AttrKind::Continuous,
                categories: vec![],
            },
            ColumnSpec::Class {
                name: "y".into(),
                classes: vec![
                    ClassSpec {
                        value: "yes".into(),
                        label: "yes".into(),
                    },
                    ClassSpec {
                        value: "no".into(),
                        label: "no".into(),
                    },
                ],
            },
        ],
    };
    let data = dataset::load_prepared::<f64>(&csv, &dcfg).unwrap();
    assert_eq!(data.test().len(), 0);
    let net = reann::network::Network::<f64>::zeros(1, 1, 2);
    let model = pipeline::PrunedModel {
        net,
        input_indices: vec![0],
    };
    let rules = reann::rex::RuleSet {
        rules: vec![],
        default_class: Some(0),
    };
    let quad = pipeline::evaluate(&data, &model, &rules);
    assert!(quad.network_test.is_none());
    assert!(quad.rules_test.is_none());
    assert_eq!(quad.network_train.total, 1);
}

#[test]
fn numeric_core_runs_at_reduced_precision() {
    // The generic core accepts f32; a small training problem converges the
    // same way it does for f64.
    use reann::dataset::Example;
    use reann::network::PenaltyConfig;
    use reann::trainer::{constructive_train, TrainConfig};
    let data: Vec<Example<f32>> = (0..8)
        .map(|i| {
            let x = i as f32 / 7.0;
            Example {
                raw: vec![reann::dataset::RawValue::Num(x as f64)],
                inputs: vec![x],
                target: (x > 0.5) as usize,
            }
        })
        .collect();
    let cfg = TrainConfig::<f32> {
        learning_rate: 0.5,
        init_range: 1.0,
        penalty: PenaltyConfig {
            eps1: 0.05,
            eps2: 1e-5,
            beta: 10.0,
        },
        max_epochs: 500,
        patience: 200,
        target_accuracy: 1.0,
        max_hidden: 3,
        seed: 5,
    };
    let (net, report) = constructive_train(1, 2, &data, &cfg).unwrap();
    assert_eq!(report.final_accuracy, 1.0);
    assert!(net.h <= 3);
}
