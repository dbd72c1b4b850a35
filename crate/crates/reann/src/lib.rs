//! Train a small three-layer tabular classifier constructively, prune it to
//! a minimal topology, discretize its hidden activations by clustering, and
//! extract a compact symbolic rule set whose accuracy matches the network's.
//!
//! The stages compose into a pipeline exposed by the `reann` binary:
//!
//! 1. load, split, and encode a tabular dataset ([`dataset`])
//! 2. train with hidden-unit growth and a weight-decay objective
//!    ([`network`], [`trainer`])
//! 3. remove redundant connections and dead nodes ([`pruner`])
//! 4. discretize hidden activations without losing accuracy
//!    ([`discretizer`])
//! 5. induce rules relating clusters to outputs and inputs to clusters,
//!    merge the layers, and prune the rule set ([`rex`])
//!
//! The numeric core is generic over the scalar type; the aliases below fix
//! `f64`, which is what the CLI and the pipeline use.

pub mod dataset;
pub mod discretizer;
pub mod error;
pub mod network;
pub mod pipeline;
pub mod pruner;
pub mod rex;
pub mod scalar;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = dataset::Dataset<f64>;
pub type Example64 = dataset::Example<f64>;
pub type Network64 = network::Network<f64>;
pub type ForwardTrace64 = network::ForwardTrace<f64>;
pub type PenaltyConfig64 = network::PenaltyConfig<f64>;
pub type TrainConfig64 = trainer::TrainConfig<f64>;
pub type Clustering64 = discretizer::ActivationClustering<f64>;
