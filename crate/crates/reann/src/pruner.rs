//! Connection and node pruning for a trained network.
//!
//! Weights are removed smallest-magnitude first. Each removal is tried
//! tentatively, followed by a short retraining budget; it sticks only if
//! the training accuracy stays at or above the floor, otherwise the weight
//! is restored and marked untouchable. Node pruning then deletes inputs
//! with no live outgoing connection and hidden units with a dead side,
//! shrinking the network dimensions.
//!
//! Biases are not removal candidates; a unit keeps its bias while any of
//! its weights survive, and loses it with the unit.

use crate::dataset::Example;
use crate::error::{Error, Result};
use crate::network::{accuracy, tanh_act, Network};
use crate::scalar::Scalar;
use crate::trainer::{train_until_plateau, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneConfig {
    /// Minimum training accuracy after each accepted removal. `None` means
    /// the accuracy measured just before pruning starts.
    pub accuracy_floor: Option<f64>,
    /// Retraining epochs granted after each tentative removal.
    pub retrain_epochs: usize,
    /// Cap on removal attempts.
    pub max_passes: usize,
}

impl PruneConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(floor) = self.accuracy_floor {
            if !(floor > 0.0 && floor <= 1.0) {
                return Err(Error::Config(format!(
                    "prune accuracy_floor {floor} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Identity of a single connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "matrix", rename_all = "lowercase")]
pub enum WeightId {
    W { hidden: usize, input: usize },
    V { output: usize, hidden: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Removal {
    pub weight: WeightId,
    /// Training accuracy after the removal was accepted.
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PruneReport {
    pub removals: Vec<Removal>,
    pub final_connections: usize,
    pub accuracy_floor: f64,
    pub final_accuracy: f64,
    pub removed_inputs: Vec<usize>,
    pub removed_hidden: Vec<usize>,
}

/// Index bookkeeping produced by [`prune_nodes`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodePruneMap {
    pub kept_inputs: Vec<usize>,
    pub removed_inputs: Vec<usize>,
    pub kept_hidden: Vec<usize>,
    pub removed_hidden: Vec<usize>,
}

fn live_weights<F: Scalar>(net: &Network<F>) -> Vec<(WeightId, f64)> {
    let mut out = Vec::new();
    for m in 0..net.h {
        for l in 0..net.n {
            if net.w_live(m, l) {
                out.push((
                    WeightId::W {
                        hidden: m,
                        input: l,
                    },
                    crate::scalar::to_f64(net.w_at(m, l)).abs(),
                ));
            }
        }
    }
    for p in 0..net.o {
        for m in 0..net.h {
            if net.v_live(p, m) {
                out.push((
                    WeightId::V {
                        output: p,
                        hidden: m,
                    },
                    crate::scalar::to_f64(net.v_at(p, m)).abs(),
                ));
            }
        }
    }
    out
}

fn mask<F: Scalar>(net: &mut Network<F>, id: WeightId) {
    match id {
        WeightId::W { hidden, input } => net.mask_w_at(hidden, input),
        WeightId::V { output, hidden } => net.mask_v_at(output, hidden),
    }
}

/// Removes connections smallest-|weight| first while the training accuracy
/// holds at or above the floor.
pub fn prune_weights<F: Scalar>(
    net: Network<F>,
    train: &[Example<F>],
    cfg: &PruneConfig,
    train_cfg: &TrainConfig<F>,
) -> Result<(Network<F>, PruneReport)> {
    cfg.validate()?;
    let floor = cfg.accuracy_floor.unwrap_or_else(|| accuracy(&net, train));

    let retrain_cfg = TrainConfig {
        max_epochs: cfg.retrain_epochs,
        patience: cfg.retrain_epochs.max(1),
        target_accuracy: 1.0,
        ..train_cfg.clone()
    };

    let mut current = net;
    let mut untouchable: Vec<WeightId> = Vec::new();
    let mut report = PruneReport {
        accuracy_floor: floor,
        ..PruneReport::default()
    };

    for _pass in 0..cfg.max_passes {
        let mut candidates: Vec<(WeightId, f64)> = live_weights(&current)
            .into_iter()
            .filter(|(id, _)| !untouchable.contains(id))
            .collect();
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        let (victim, _) = candidates[0];

        let mut trial = current.clone();
        mask(&mut trial, victim);
        let (retrained, _) = train_until_plateau(trial, train, &retrain_cfg)?;
        let acc = accuracy(&retrained, train);
        if acc >= floor {
            current = retrained;
            report.removals.push(Removal {
                weight: victim,
                accuracy: acc,
            });
        } else {
            untouchable.push(victim);
        }
    }

    report.final_connections = current.live_connections();
    report.final_accuracy = accuracy(&current, train);
    Ok((current, report))
}

/// Removes disconnected nodes and shrinks the network.
///
/// An input with every outgoing weight masked is dropped. A hidden unit
/// with all outgoing weights masked is dropped along with its incoming
/// weights. A hidden unit whose incoming weights are all masked still emits
/// the constant `tanh(bias)`; that constant is folded into the output
/// biases before the unit is dropped, so the network function is preserved.
pub fn prune_nodes<F: Scalar>(net: Network<F>) -> Result<(Network<F>, NodePruneMap)> {
    let mut net = net;

    // Fold constant contributions of input-dead hidden units, then decide
    // which units stay.
    let mut keep_hidden = Vec::new();
    let mut drop_hidden = Vec::new();
    for m in 0..net.h {
        let incoming_live = (0..net.n).any(|l| net.w_live(m, l));
        let outgoing_live = (0..net.o).any(|p| net.v_live(p, m));
        if incoming_live && outgoing_live {
            keep_hidden.push(m);
        } else {
            if !incoming_live && outgoing_live {
                let constant = tanh_act(net.hidden_bias[m]);
                for p in 0..net.o {
                    if net.v_live(p, m) {
                        let shift = net.v_at(p, m) * constant;
                        net.output_bias[p] = net.output_bias[p] + shift;
                    }
                }
            }
            drop_hidden.push(m);
        }
    }
    if keep_hidden.is_empty() {
        return Err(Error::InvalidState(
            "pruning would remove every hidden unit".into(),
        ));
    }

    let mut keep_inputs = Vec::new();
    let mut drop_inputs = Vec::new();
    for l in 0..net.n {
        if keep_hidden.iter().any(|&m| net.w_live(m, l)) {
            keep_inputs.push(l);
        } else {
            drop_inputs.push(l);
        }
    }
    if keep_inputs.is_empty() {
        return Err(Error::InvalidState(
            "pruning would remove every input".into(),
        ));
    }

    let (n2, h2) = (keep_inputs.len(), keep_hidden.len());
    let mut out = Network::zeros(n2, h2, net.o);
    for (m2, &m) in keep_hidden.iter().enumerate() {
        for (l2, &l) in keep_inputs.iter().enumerate() {
            out.w[m2 * n2 + l2] = net.w_at(m, l);
            out.mask_w[m2 * n2 + l2] = net.mask_w[m * net.n + l];
        }
        out.hidden_bias[m2] = net.hidden_bias[m];
        for p in 0..net.o {
            out.v[p * h2 + m2] = net.v_at(p, m);
            out.mask_v[p * h2 + m2] = net.mask_v[p * net.h + m];
        }
    }
    out.output_bias = net.output_bias.clone();

    Ok((
        out,
        NodePruneMap {
            kept_inputs: keep_inputs,
            removed_inputs: drop_inputs,
            kept_hidden: keep_hidden,
            removed_hidden: drop_hidden,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RawValue;
    use crate::network::{forward, PenaltyConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example(inputs: Vec<f64>, target: usize) -> Example<f64> {
        Example {
            raw: inputs.iter().map(|&x| RawValue::Num(x)).collect(),
            inputs,
            target,
        }
    }

    fn train_cfg() -> TrainConfig<f64> {
        TrainConfig {
            learning_rate: 0.5,
            init_range: 1.0,
            penalty: PenaltyConfig {
                eps1: 0.05,
                eps2: 1e-6,
                beta: 10.0,
            },
            max_epochs: 200,
            patience: 200,
            target_accuracy: 1.0,
            max_hidden: 4,
            seed: 0,
        }
    }

    /// Data where the second input is pure noise: class = [x0 > 0.5].
    fn one_relevant_input() -> Vec<Example<f64>> {
        let mut out = Vec::new();
        for i in 0..20 {
            let x0 = i as f64 / 19.0;
            let x1 = ((i * 7) % 11) as f64 / 10.0;
            out.push(example(vec![x0, x1], (x0 > 0.5) as usize));
        }
        out
    }

    #[test]
    fn zero_weight_is_removed_first_without_accuracy_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = Network::<f64>::random(2, 2, 2, 1.0, &mut rng);
        net.w[0] = 0.0; // W { hidden: 0, input: 0 }
        let data = one_relevant_input();
        let before = accuracy(&net, &data);
        let cfg = PruneConfig {
            accuracy_floor: Some(before.max(1e-9)),
            retrain_epochs: 0,
            max_passes: 1,
        };
        let (pruned, report) = prune_weights(net, &data, &cfg, &train_cfg()).unwrap();
        assert_eq!(
            report.removals[0].weight,
            WeightId::W {
                hidden: 0,
                input: 0
            }
        );
        assert_eq!(accuracy(&pruned, &data), before);
    }

    #[test]
    fn impossible_floor_blocks_all_removals() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Network::<f64>::random(2, 1, 2, 0.3, &mut rng);
        let data = one_relevant_input();
        assert!(accuracy(&net, &data) < 1.0);
        let cfg = PruneConfig {
            accuracy_floor: Some(1.0),
            retrain_epochs: 0,
            max_passes: 50,
        };
        let (pruned, report) = prune_weights(net.clone(), &data, &cfg, &train_cfg()).unwrap();
        assert!(report.removals.is_empty());
        assert_eq!(pruned, net);
    }

    #[test]
    fn connection_count_is_non_increasing_and_floor_respected() {
        let data = one_relevant_input();
        let tc = train_cfg();
        let (net, _) = crate::trainer::constructive_train(2, 2, &data, &tc).unwrap();
        let cfg = PruneConfig {
            accuracy_floor: Some(0.95),
            retrain_epochs: 100,
            max_passes: 100,
        };
        let before = net.live_connections();
        let (pruned, report) = prune_weights(net, &data, &cfg, &tc).unwrap();
        assert!(pruned.live_connections() <= before);
        assert!(report.removals.iter().all(|r| r.accuracy >= 0.95));
        assert!(accuracy(&pruned, &data) >= 0.95);
        // The noise input should have lost its connections.
        assert!(!pruned.w_live(0, 1) || pruned.h > 1);
    }

    #[test]
    fn node_prune_removes_dead_inputs_and_preserves_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Network::<f64>::random(3, 2, 2, 1.0, &mut rng);
        for m in 0..2 {
            net.mask_w_at(m, 1); // input 1 fully dead
        }
        let probe: Vec<Vec<f64>> = vec![vec![0.2, 0.9, -0.4], vec![1.0, 0.0, 0.3]];
        let before: Vec<Vec<f64>> = probe.iter().map(|x| forward(&net, x).output).collect();
        let (pruned, map) = prune_nodes(net).unwrap();
        assert_eq!(map.removed_inputs, vec![1]);
        assert_eq!(map.kept_inputs, vec![0, 2]);
        assert_eq!(pruned.n, 2);
        for (x, want) in probe.iter().zip(&before) {
            let projected: Vec<f64> = map.kept_inputs.iter().map(|&l| x[l]).collect();
            let got = forward(&pruned, &projected).output;
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn node_prune_without_dead_nodes_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = Network::<f64>::random(3, 2, 2, 1.0, &mut rng);
        let (pruned, map) = prune_nodes(net.clone()).unwrap();
        assert_eq!(pruned, net);
        assert!(map.removed_inputs.is_empty());
        assert!(map.removed_hidden.is_empty());
    }

    #[test]
    fn hidden_unit_with_dead_outgoing_side_is_dropped() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut net = Network::<f64>::random(2, 2, 2, 1.0, &mut rng);
        for p in 0..2 {
            net.mask_v_at(p, 1);
        }
        let probe = vec![0.3, -0.6];
        let before = forward(&net, &probe).output;
        let (pruned, map) = prune_nodes(net).unwrap();
        assert_eq!(map.removed_hidden, vec![1]);
        assert_eq!(pruned.h, 1);
        let got = forward(&pruned, &probe).output;
        for (g, w) in got.iter().zip(&before) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn input_dead_hidden_unit_folds_into_output_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut net = Network::<f64>::random(2, 2, 2, 1.0, &mut rng);
        for l in 0..2 {
            net.mask_w_at(1, l);
        }
        let probe = vec![0.7, 0.1];
        let before = forward(&net, &probe).output;
        let (pruned, map) = prune_nodes(net).unwrap();
        assert_eq!(map.removed_hidden, vec![1]);
        let got = forward(&pruned, &probe).output;
        for (g, w) in got.iter().zip(&before) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn removing_every_hidden_unit_is_an_error() {
        let mut net = Network::<f64>::zeros(2, 1, 2);
        for p in 0..2 {
            net.mask_v_at(p, 0);
        }
        assert!(matches!(prune_nodes(net), Err(Error::InvalidState(_))));
    }

    #[test]
    fn removed_inputs_have_no_influence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut net = Network::<f64>::random(3, 2, 2, 1.0, &mut rng);
        for m in 0..2 {
            net.mask_w_at(m, 2);
        }
        let (pruned, map) = prune_nodes(net).unwrap();
        assert_eq!(map.removed_inputs, vec![2]);
        // Perturbing the removed input's value cannot reach the pruned net:
        // it is simply absent from the projected vector.
        let a = forward(&pruned, &[0.1, 0.9]).output;
        let b = forward(&pruned, &[0.1, 0.9]).output;
        assert_eq!(a, b);
    }
}
