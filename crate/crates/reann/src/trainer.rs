//! Batch gradient-descent training and constructive hidden-layer growth.
//!
//! Training starts from a single hidden unit. Whenever the training
//! accuracy plateaus below the target, one hidden unit with fresh random
//! weights is appended while every existing weight is retained, and
//! training resumes. All randomness flows through one generator seeded
//! from the config, so identical inputs produce bit-identical networks.
//!
//! Each epoch applies one full-batch step along the objective gradient
//! scaled by 1/k (k = training-set size). The scaling is a pure
//! learning-rate normalization: with the summed objective, step sizes in
//! the configured range diverge on any non-trivial training set.

use crate::dataset::Example;
use crate::error::{Error, Result};
use crate::network::{accuracy, data_gradient, penalty, penalty_gradient, Network, PenaltyConfig};
use crate::scalar::{lit, to_f64, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Everything the training loop needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrainConfig<F: Scalar> {
    /// Step size, within [0.1, 1.0].
    pub learning_rate: F,
    /// Weights initialize uniformly in [-init_range, init_range].
    pub init_range: F,
    pub penalty: PenaltyConfig<F>,
    pub max_epochs: usize,
    /// Epochs without a training-accuracy improvement before a plateau is
    /// declared.
    pub patience: usize,
    /// Training accuracy at which growth stops.
    pub target_accuracy: f64,
    pub max_hidden: usize,
    pub seed: u64,
}

impl<F: Scalar> TrainConfig<F> {
    pub fn validate(&self) -> Result<()> {
        let lr = to_f64(self.learning_rate);
        if !(0.1..=1.0).contains(&lr) {
            return Err(Error::Config(format!(
                "learning_rate {lr} outside [0.1, 1.0]"
            )));
        }
        let r = to_f64(self.init_range);
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Config(format!("init_range {r} outside (0, 1.0]")));
        }
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return Err(Error::Config(format!(
                "target_accuracy {} outside (0, 1]",
                self.target_accuracy
            )));
        }
        if self.max_hidden == 0 {
            return Err(Error::Config("max_hidden must be positive".into()));
        }
        self.penalty.validate()
    }
}

/// Per-epoch traces plus growth history.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    /// Mean cross-entropy plus penalty, at the point each epoch's step was
    /// computed.
    pub objective: Vec<f64>,
    pub accuracy: Vec<f64>,
    /// Hidden-unit count in effect at each epoch.
    pub hidden_units: Vec<usize>,
    /// Epoch numbers (1-based) at which a unit was added.
    pub growth_epochs: Vec<usize>,
    pub final_accuracy: f64,
    pub target_reached: bool,
}

impl TrainReport {
    /// CSV with columns epoch, objective, accuracy, hidden_count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,objective,accuracy,hidden_count\n");
        for i in 0..self.epochs_run {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                self.objective[i],
                self.accuracy[i],
                self.hidden_units[i]
            ));
        }
        out
    }

    fn extend(&mut self, other: TrainReport) {
        self.epochs_run += other.epochs_run;
        self.objective.extend(other.objective);
        self.accuracy.extend(other.accuracy);
        self.hidden_units.extend(other.hidden_units);
        self.final_accuracy = other.final_accuracy;
        self.target_reached = other.target_reached;
    }
}

/// Per-example objective (cross-entropy plus penalty, divided by k): the
/// quantity whose descent one epoch performs.
pub fn training_objective<F: Scalar>(
    net: &Network<F>,
    data: &[Example<F>],
    cfg: &PenaltyConfig<F>,
) -> F {
    let (_, ce) = data_gradient(net, data);
    let k = lit::<F>(data.len().max(1) as f64);
    (ce + penalty(net, cfg)) / k
}

/// One full-batch gradient step. Returns the objective the step was
/// computed from. Masked weights are untouched.
pub fn train_epoch<F: Scalar>(
    net: &mut Network<F>,
    data: &[Example<F>],
    cfg: &TrainConfig<F>,
) -> Result<F> {
    let (mut grad, ce) = data_gradient(net, data);
    let k = lit::<F>(data.len().max(1) as f64);
    let obj = (ce + penalty(net, &cfg.penalty)) / k;
    if !obj.is_finite() {
        return Err(Error::Diverged);
    }
    grad.add(&penalty_gradient(net, &cfg.penalty));
    grad.scale(F::one() / k);

    let lr = cfg.learning_rate;
    for i in 0..net.w.len() {
        if net.mask_w[i] != 0 {
            net.w[i] = net.w[i] - lr * grad.w[i];
        }
    }
    for i in 0..net.v.len() {
        if net.mask_v[i] != 0 {
            net.v[i] = net.v[i] - lr * grad.v[i];
        }
    }
    for m in 0..net.h {
        net.hidden_bias[m] = net.hidden_bias[m] - lr * grad.hidden_bias[m];
    }
    for p in 0..net.o {
        net.output_bias[p] = net.output_bias[p] - lr * grad.output_bias[p];
    }
    Ok(obj)
}

struct Snapshot<F: Scalar> {
    net: Network<F>,
    accuracy: f64,
    objective: f64,
}

/// Trains until the target accuracy is reached, the accuracy plateaus, or
/// the epoch budget runs out. Returns the best-accuracy snapshot seen.
pub fn train_until_plateau<F: Scalar>(
    net: Network<F>,
    data: &[Example<F>],
    cfg: &TrainConfig<F>,
) -> Result<(Network<F>, TrainReport)> {
    let mut current = net;
    let mut best = Snapshot {
        accuracy: accuracy(&current, data),
        objective: to_f64(training_objective(&current, data, &cfg.penalty)),
        net: current.clone(),
    };
    let mut report = TrainReport::default();
    let mut stale = 0usize;

    for _epoch in 1..=cfg.max_epochs {
        let obj = train_epoch(&mut current, data, cfg)?;
        let acc = accuracy(&current, data);
        report.epochs_run += 1;
        report.objective.push(to_f64(obj));
        report.accuracy.push(acc);
        report.hidden_units.push(current.h);

        let post_obj = to_f64(training_objective(&current, data, &cfg.penalty));
        if acc > best.accuracy || (acc == best.accuracy && post_obj < best.objective) {
            let improved = acc > best.accuracy;
            best = Snapshot {
                net: current.clone(),
                accuracy: acc,
                objective: post_obj,
            };
            if improved {
                stale = 0;
            } else {
                stale += 1;
            }
        } else {
            stale += 1;
        }

        if best.accuracy >= cfg.target_accuracy {
            break;
        }
        if stale >= cfg.patience {
            break;
        }
    }

    report.final_accuracy = best.accuracy;
    report.target_reached = best.accuracy >= cfg.target_accuracy;
    Ok((best.net, report))
}

/// Constructive training: start at one hidden unit, grow until the target
/// accuracy is met or `max_hidden` is reached.
pub fn constructive_train<F: Scalar>(
    n: usize,
    o: usize,
    data: &[Example<F>],
    cfg: &TrainConfig<F>,
) -> Result<(Network<F>, TrainReport)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Network::random(n, 1, o, cfg.init_range, &mut rng);
    let mut report = TrainReport::default();
    let mut best: Option<(Network<F>, f64)> = None;

    loop {
        let (phase_net, phase_report) = train_until_plateau(net, data, cfg)?;
        let phase_acc = phase_report.final_accuracy;
        report.extend(phase_report);
        match &best {
            Some((_, acc)) if *acc >= phase_acc => {}
            _ => best = Some((phase_net.clone(), phase_acc)),
        }
        if phase_acc >= cfg.target_accuracy || phase_net.h >= cfg.max_hidden {
            break;
        }
        net = phase_net;
        net.grow(cfg.init_range, &mut rng);
        report.growth_epochs.push(report.epochs_run + 1);
    }

    let (best_net, best_acc) = best.expect("at least one phase runs");
    report.final_accuracy = best_acc;
    report.target_reached = best_acc >= cfg.target_accuracy;
    Ok((best_net, report))
}
