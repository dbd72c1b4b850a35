use clap::{Parser, Subcommand};
use reann::discretizer::ClusteringFile;
use reann::error::{Error, Result};
use reann::network::NetworkFile;
use reann::pipeline::{self, report, OutDirLock, PipelineConfig, PrunedModel, RulesFile};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "reann",
    about = "Train, prune, discretize, and extract rules from a small tabular classifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every artifact.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Repeat with consecutive seeds and report mean and standard
        /// deviation of the accuracies.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Train the network constructively and save it.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prune a trained network.
    Prune {
        #[arg(long)]
        config: PathBuf,
        /// Artifact from the train stage.
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster the pruned network's hidden activations.
    Discretize {
        #[arg(long)]
        config: PathBuf,
        /// Artifact from the prune stage.
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract rules from the discretized network.
    Extract {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Artifact from the discretize stage.
        #[arg(long)]
        clusters: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report network and rule accuracies on both splits.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Artifact from the extract stage.
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_model(path: &Path) -> Result<PrunedModel> {
    let (net, input_indices) = NetworkFile::<f64>::read_json(path)?.into_network()?;
    Ok(PrunedModel { net, input_indices })
}

fn seed_of(cfg: &PipelineConfig, flag: Option<u64>) -> u64 {
    flag.unwrap_or(cfg.train.seed)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            repeat,
        } => {
            let cfg = PipelineConfig::load(&config)?;
            let base_seed = seed_of(&cfg, seed);
            let _lock = OutDirLock::acquire(&out)?;
            if repeat <= 1 {
                let report = pipeline::run_pipeline(&cfg, base_seed, &out)?;
                print_summary(&report);
            } else {
                let mut quads = Vec::with_capacity(repeat);
                for i in 0..repeat {
                    let seed = base_seed + i as u64;
                    let run_dir = out.join(format!("run-{seed}"));
                    let report = pipeline::run_pipeline(&cfg, seed, &run_dir)?;
                    print_summary(&report);
                    quads.push((seed, report.accuracy));
                }
                let summary = repeat_summary(&quads);
                report::write_json(&summary, &out.join("summary.json"))?;
                println!(
                    "rule test accuracy over {} seeds: mean {:.4} sd {:.4}",
                    repeat, summary.rules_test_mean, summary.rules_test_sd
                );
            }
            Ok(())
        }
        Command::Train { config, seed, out } => {
            let cfg = PipelineConfig::load(&config)?;
            let seed = seed_of(&cfg, seed);
            let _lock = OutDirLock::acquire(&out)?;
            let data = pipeline::stage_load(&cfg)?;
            let (net, report) = pipeline::stage_train(&cfg, seed, &data)?;
            NetworkFile::from_network(&net, (0..net.n).collect())
                .write_json(&out.join("network-trained.json"))?;
            std::fs::write(out.join("training_curve.csv"), report.to_csv())?;
            println!(
                "trained: {} hidden units, train accuracy {:.4} in {} epochs",
                net.h, report.final_accuracy, report.epochs_run
            );
            Ok(())
        }
        Command::Prune {
            config,
            network,
            out,
        } => {
            let cfg = PipelineConfig::load(&config)?;
            let _lock = OutDirLock::acquire(&out)?;
            let data = pipeline::stage_load(&cfg)?;
            let (net, _) = NetworkFile::<f64>::read_json(&network)?.into_network()?;
            let (model, prune_report) = pipeline::stage_prune(&cfg, net, &data)?;
            NetworkFile::from_network(&model.net, model.input_indices.clone())
                .write_json(&out.join("network.json"))?;
            report::write_json(&prune_report, &out.join("prune_report.json"))?;
            println!(
                "pruned to {} hidden units, {} connections, train accuracy {:.4}",
                model.net.h, prune_report.final_connections, prune_report.final_accuracy
            );
            Ok(())
        }
        Command::Discretize {
            config,
            network,
            out,
        } => {
            let cfg = PipelineConfig::load(&config)?;
            let _lock = OutDirLock::acquire(&out)?;
            let data = pipeline::stage_load(&cfg)?;
            let model = load_model(&network)?;
            let clustering = pipeline::stage_discretize(&cfg, &model, &data)?;
            let file = ClusteringFile::from_clustering(&clustering);
            file.write_json(&out.join("clusters.json"))?;
            for (m, unit) in file.units.iter().enumerate() {
                println!(
                    "unit {m}: {} clusters at epsilon {}",
                    unit.centers.len(),
                    file.epsilon
                );
            }
            Ok(())
        }
        Command::Extract {
            config,
            network,
            clusters,
            out,
        } => {
            let cfg = PipelineConfig::load(&config)?;
            let _lock = OutDirLock::acquire(&out)?;
            let data = pipeline::stage_load(&cfg)?;
            let model = load_model(&network)?;
            let clustering_file = ClusteringFile::read_json(&clusters)?;
            let train = model.project_examples(data.train());
            let clustering = clustering_file.into_clustering(&model.net, &train)?;
            let rules = pipeline::stage_extract(&cfg, &data, &model, &clustering)?;
            let rules_file = RulesFile {
                attribute_names: data.meta.iter().map(|m| m.name.clone()).collect(),
                class_names: data.class_names.clone(),
                rules: rules.clone(),
            };
            report::write_json(&rules_file, &out.join("rules.json"))?;
            let text = reann::rex::render_text(&rules, &data.meta, &data.class_names);
            std::fs::write(out.join("rules.txt"), &text)?;
            print!("{text}");
            Ok(())
        }
        Command::Evaluate {
            config,
            network,
            rules,
            out,
        } => {
            let cfg = PipelineConfig::load(&config)?;
            let _lock = OutDirLock::acquire(&out)?;
            let data = pipeline::stage_load(&cfg)?;
            let model = load_model(&network)?;
            let rules_file: RulesFile = report::read_json(&rules)?;
            let quad = pipeline::evaluate(&data, &model, &rules_file.rules);
            report::write_json(&quad, &out.join("eval.json"))?;
            println!(
                "network train: {}/{} {:.2}%",
                quad.network_train.correct,
                quad.network_train.total,
                quad.network_train.ratio * 100.0
            );
            if let Some(t) = quad.network_test {
                println!(
                    "network test: {}/{} {:.2}%",
                    t.correct,
                    t.total,
                    t.ratio * 100.0
                );
            }
            println!(
                "rules train: {}/{} {:.2}%",
                quad.rules_train.correct,
                quad.rules_train.total,
                quad.rules_train.ratio * 100.0
            );
            if let Some(t) = quad.rules_test {
                println!(
                    "rules test: {}/{} {:.2}%",
                    t.correct,
                    t.total,
                    t.ratio * 100.0
                );
            }
            Ok(())
        }
    }
}

fn print_summary(report: &report::RunReport) {
    println!(
        "seed {}: h={} connections={} clusters={:?}",
        report.seed,
        report.clustering.units.len(),
        report.prune.final_connections,
        report
            .clustering
            .units
            .iter()
            .map(|u| u.centers.len())
            .collect::<Vec<_>>()
    );
    let a = &report.accuracy;
    println!(
        "network train {}/{} {:.2}%",
        a.network_train.correct,
        a.network_train.total,
        a.network_train.ratio * 100.0
    );
    if let Some(t) = &a.network_test {
        println!(
            "network test {}/{} {:.2}%",
            t.correct,
            t.total,
            t.ratio * 100.0
        );
    }
    println!(
        "rules train {}/{} {:.2}%",
        a.rules_train.correct,
        a.rules_train.total,
        a.rules_train.ratio * 100.0
    );
    if let Some(t) = &a.rules_test {
        println!(
            "rules test {}/{} {:.2}%",
            t.correct,
            t.total,
            t.ratio * 100.0
        );
    }
    println!("fidelity (train) {:.4}", report.fidelity_train);
}

#[derive(serde::Serialize)]
struct RepeatSummary {
    seeds: Vec<u64>,
    rules_test_mean: f64,
    rules_test_sd: f64,
    network_test_mean: f64,
    network_test_sd: f64,
}

fn repeat_summary(quads: &[(u64, report::AccuracyQuad)]) -> RepeatSummary {
    let stat = |values: &[f64]| -> (f64, f64) {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let rules: Vec<f64> = quads
        .iter()
        .filter_map(|(_, q)| q.rules_test.map(|t| t.ratio))
        .collect();
    let nets: Vec<f64> = quads
        .iter()
        .filter_map(|(_, q)| q.network_test.map(|t| t.ratio))
        .collect();
    let (rm, rs) = stat(&rules);
    let (nm, ns) = stat(&nets);
    RepeatSummary {
        seeds: quads.iter().map(|(s, _)| *s).collect(),
        rules_test_mean: rm,
        rules_test_sd: rs,
        network_test_mean: nm,
        network_test_sd: ns,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(stage) = err.stage() {
                eprintln!("stage {stage} failed");
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

// Exit codes: 0 success, 2 config error, 3 data error, 4 stage failure.
#[allow(dead_code)]
fn exit_code_contract(err: &Error) -> i32 {
    err.exit_code()
}
