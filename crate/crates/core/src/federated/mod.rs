//! The federated round engine: broadcast, parallel local training, DP
//! perturbation, QKD-secured uplink, sample-weighted aggregation, server
//! fine-tuning, and per-round metric collection.

mod aggregate;
mod engine;
mod finetune;
mod link;
mod metrics;

pub use aggregate::weighted_average;
pub use engine::{
    local_round, run_experiment, run_experiment_to_file, AnyModel, LocalOutcome,
};
pub use finetune::{server_fine_tune, FineTuneOutcome, FtMetrics, FtMode};
pub use link::{
    establish_key, secure_downlink, secure_uplink, CipherKind, QkdLinkConfig, Transmission,
};
pub use metrics::{metrics_to_csv, write_metrics_csv, RoundMetrics, METRICS_HEADER};

use crate::data::LabeledDataset;

/// One participating device: its local data split and current parameters.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: usize,
    pub train_set: LabeledDataset,
    pub test_set: LabeledDataset,
    pub params: Vec<f64>,
}

/// The aggregating server: global parameters plus its validation/test
/// holdouts.
#[derive(Debug, Clone)]
pub struct ServerState {
    pub params: Vec<f64>,
    pub validation_set: LabeledDataset,
    pub test_set: LabeledDataset,
}
