//! The experiment driver: dataset preparation, client construction, and the
//! round loop. Every source of randomness is a named stream off the root
//! seed, so whole-experiment replays are exact (times excluded) and security
//! layers can be toggled without shifting anything else.

use std::time::Instant;

use rayon::prelude::*;

use super::{
    secure_downlink, secure_uplink, server_fine_tune, weighted_average, write_metrics_csv,
    ClientState, RoundMetrics, ServerState, Transmission,
};
use crate::config::{DataSource, ExperimentConfig, ModelKind};
use crate::data::{
    balance_classes, generate_blobs, load_csv, partition, pca_fit, pca_transform, scaler_fit,
    scaler_transform, train_test_split, LabeledDataset, ScalerKind,
};
use crate::error::{Error, Result};
use crate::models::{evaluate, train, Classifier, QcnnModel, VqcModel};
use crate::optim::OptimizerConfig;
use crate::rng;

/// Architecture dispatch without dynamic typing (the classifier trait has
/// `Sized` constructors).
#[derive(Debug, Clone)]
pub enum AnyModel {
    Vqc(VqcModel),
    Qcnn(QcnnModel),
}

impl Classifier for AnyModel {
    fn num_features(&self) -> usize {
        match self {
            AnyModel::Vqc(m) => m.num_features(),
            AnyModel::Qcnn(m) => m.num_features(),
        }
    }

    fn num_classes(&self) -> usize {
        match self {
            AnyModel::Vqc(m) => m.num_classes(),
            AnyModel::Qcnn(m) => m.num_classes(),
        }
    }

    fn num_params(&self) -> usize {
        match self {
            AnyModel::Vqc(m) => m.num_params(),
            AnyModel::Qcnn(m) => m.num_params(),
        }
    }

    fn params(&self) -> &[f64] {
        match self {
            AnyModel::Vqc(m) => m.params(),
            AnyModel::Qcnn(m) => m.params(),
        }
    }

    fn with_params(&self, params: &[f64]) -> Result<Self> {
        Ok(match self {
            AnyModel::Vqc(m) => AnyModel::Vqc(m.with_params(params)?),
            AnyModel::Qcnn(m) => AnyModel::Qcnn(m.with_params(params)?),
        })
    }

    fn class_probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            AnyModel::Vqc(m) => m.class_probabilities(x),
            AnyModel::Qcnn(m) => m.class_probabilities(x),
        }
    }
}

fn build_model(config: &ExperimentConfig) -> Result<AnyModel> {
    Ok(match config.model {
        ModelKind::Vqc => AnyModel::Vqc(VqcModel::new(
            config.num_qubits,
            config.num_layers,
            config.num_classes,
        )?),
        ModelKind::Qcnn => AnyModel::Qcnn(QcnnModel::new(config.num_qubits)?),
    })
}

/// What one client reports back for a round.
#[derive(Debug, Clone)]
pub struct LocalOutcome {
    pub params: Vec<f64>,
    pub train_acc: f64,
    pub train_loss: f64,
    pub test_acc: f64,
    pub train_time_s: f64,
}

/// Adopt the incoming parameters, train on the local shard, and report the
/// post-training metrics.
pub fn local_round<M: Classifier>(
    client: &ClientState,
    template: &M,
    incoming: &[f64],
    opt: &OptimizerConfig,
) -> Result<LocalOutcome> {
    let seeded = template.with_params(incoming)?;
    let started = Instant::now();
    let (params, trace) = train(&seeded, &client.train_set, opt)?;
    let train_time_s = started.elapsed().as_secs_f64();
    let trained = template.with_params(&params)?;
    let (train_acc, _) = evaluate(&trained, &client.train_set)?;
    let (test_acc, _) = evaluate(&trained, &client.test_set)?;
    Ok(LocalOutcome {
        params,
        train_acc,
        train_loss: trace.best_value,
        test_acc,
        train_time_s,
    })
}

/// Build the preprocessed dataset for an experiment: source, optional
/// balancing, optional scaler, optional PCA, then an unconditional min-max
/// map onto the encoding range [-pi, pi].
fn prepare_dataset(config: &ExperimentConfig) -> Result<LabeledDataset> {
    let data_cfg = &config.data;
    let mut dataset = match data_cfg.source {
        DataSource::Blobs => {
            let uniform = vec![1.0 / data_cfg.n_classes as f64; data_cfg.n_classes];
            let weights = data_cfg.class_weights.as_deref().unwrap_or(&uniform);
            generate_blobs(
                data_cfg.n_samples,
                data_cfg.n_features,
                data_cfg.n_classes,
                data_cfg.class_separation,
                weights,
                data_cfg.seed,
            )?
        }
        DataSource::Csv => {
            let path = data_cfg
                .csv_path
                .as_ref()
                .ok_or_else(|| Error::invalid_config("csv_path", "required for source = csv"))?;
            let (dataset, _names) = load_csv(path)?;
            dataset
        }
    };

    if dataset.labels().iter().any(|&l| l >= config.num_classes) {
        return Err(Error::invalid_config(
            "num_classes",
            format!(
                "dataset contains label {} outside 0..{}",
                dataset.labels().iter().max().unwrap(),
                config.num_classes
            ),
        ));
    }

    if data_cfg.balance {
        dataset = balance_classes(&dataset, rng::derive(config.root_seed, "balance", &[]))?;
    }

    let encoding_range = (-std::f64::consts::PI, std::f64::consts::PI);
    let mut features = dataset.features().to_vec();
    if let Some(kind) = data_cfg.scaler {
        let params = scaler_fit(&features, kind, encoding_range)?;
        features = scaler_transform(&features, &params);
    }
    if let Some(k) = data_cfg.pca_k {
        let model = pca_fit(&features, k)?;
        features = pca_transform(&features, &model);
    }
    // Final range map guarantees the models' feature-scaling contract.
    let final_scaler = scaler_fit(&features, ScalerKind::MinMax, encoding_range)?;
    features = scaler_transform(&features, &final_scaler);
    let dataset = dataset.with_features(features)?;

    if dataset.num_features() != config.num_qubits {
        return Err(Error::invalid_config(
            "num_qubits",
            format!(
                "preprocessed dataset has {} feature(s), model encodes {}",
                dataset.num_features(),
                config.num_qubits
            ),
        ));
    }
    Ok(dataset)
}

fn initial_params(config: &ExperimentConfig, dim: usize) -> Vec<f64> {
    use rand::Rng;
    let mut stream = rng::stream(config.root_seed, "init", &[]);
    (0..dim).map(|_| stream.random_range(-0.5..0.5)).collect()
}

fn run_local_rounds(
    clients: &[ClientState],
    template: &AnyModel,
    incomings: &[Vec<f64>],
    opt: &OptimizerConfig,
    parallel: bool,
) -> Vec<Result<LocalOutcome>> {
    if parallel {
        clients
            .par_iter()
            .zip(incomings.par_iter())
            .map(|(client, incoming)| local_round(client, template, incoming, opt))
            .collect()
    } else {
        clients
            .iter()
            .zip(incomings)
            .map(|(client, incoming)| local_round(client, template, incoming, opt))
            .collect()
    }
}

/// Execute the full experiment and return one metrics row per round.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RoundMetrics>> {
    run_experiment_inner(config, true)
}

/// Like [`run_experiment`] but also writes the metrics CSV to the configured
/// output path (used by the CLI; kept separate so library callers can keep
/// everything in memory).
pub fn run_experiment_to_file(config: &ExperimentConfig) -> Result<Vec<RoundMetrics>> {
    let metrics = run_experiment_inner(config, true)?;
    write_metrics_csv(&config.output, &metrics)?;
    Ok(metrics)
}

fn run_experiment_inner(config: &ExperimentConfig, parallel: bool) -> Result<Vec<RoundMetrics>> {
    config.validate()?;
    let devices = config.devices.single().ok_or_else(|| {
        Error::invalid_config("devices", "sweeps must be expanded before running")
    })?;

    let template = build_model(config)?;
    let dataset = prepare_dataset(config)?;
    let plan = partition(
        &dataset,
        devices,
        config.data.server_val_count,
        config.data.server_test_count,
        rng::derive(config.root_seed, "partition", &[]),
    )?;

    let init = initial_params(config, template.num_params());
    let mut clients = Vec::with_capacity(devices);
    for (id, shard) in plan.shards.iter().enumerate() {
        let shard_data = dataset.subset(shard);
        let (train_set, test_set) = train_test_split(
            &shard_data,
            1.0 - config.data.local_test_fraction,
            rng::derive(config.root_seed, "local-split", &[id as u64]),
        )?;
        if train_set.is_empty() {
            return Err(Error::invalid_config(
                "devices",
                format!("client {id} received an empty training shard"),
            ));
        }
        clients.push(ClientState {
            id,
            train_set,
            test_set,
            params: init.clone(),
        });
    }
    let mut server = ServerState {
        params: init.clone(),
        validation_set: dataset.subset(&plan.server_val),
        test_set: dataset.subset(&plan.server_test),
    };

    let dp = config.security.dp_config();
    let qkd = config.security.qkd_link();
    let decimals = config.security.wire_decimals;
    let root = config.root_seed;

    let mut rounds = Vec::with_capacity(config.rounds);
    let mut broadcast = server.params.clone();

    for round in 1..=config.rounds {
        let t = round as u64;
        let round_started = Instant::now();

        // Downlink: server -> every client, encrypted when QKD is on. DP is
        // an uplink-only mechanism.
        let mut incomings = Vec::with_capacity(devices);
        for k in 0..devices {
            let mut noop_dp = rng::stream(root, "dp-down-unused", &[t, k as u64]);
            let mut link_rng = rng::stream(root, "qkd-down", &[t, k as u64]);
            let transmission = secure_uplink(
                &broadcast,
                None,
                qkd.as_ref(),
                decimals,
                &mut noop_dp,
                &mut link_rng,
            )
            .map_err(|e| round_abort(round, "broadcast", e))?;
            incomings.push(
                secure_downlink(&transmission, qkd.as_ref())
                    .map_err(|e| round_abort(round, "broadcast", e))?,
            );
        }

        // Parallel local training.
        let outcomes = run_local_rounds(&clients, &template, &incomings, &config.optimizer, parallel);

        // Uplink per surviving client; optimizer failures drop the client
        // for this round and the weights renormalize over survivors.
        let mut uploaded: Vec<Vec<f64>> = Vec::with_capacity(devices);
        let mut counts: Vec<usize> = Vec::with_capacity(devices);
        let mut survivors: Vec<&LocalOutcome> = Vec::with_capacity(devices);
        for (k, outcome) in outcomes.iter().enumerate() {
            let outcome = match outcome {
                Ok(o) => o,
                Err(e) => {
                    log::warn!("round {round}: client {k} dropped ({e})");
                    continue;
                }
            };
            clients[k].params = outcome.params.clone();
            let mut dp_rng = rng::stream(root, "dp", &[t, k as u64]);
            let mut link_rng = rng::stream(root, "qkd-up", &[t, k as u64]);
            let transmission: Transmission = secure_uplink(
                &outcome.params,
                dp.as_ref(),
                qkd.as_ref(),
                decimals,
                &mut dp_rng,
                &mut link_rng,
            )
            .map_err(|e| round_abort(round, &format!("client {k} uplink"), e))?;
            let recovered = secure_downlink(&transmission, qkd.as_ref())
                .map_err(|e| round_abort(round, &format!("client {k} uplink"), e))?;
            uploaded.push(recovered);
            counts.push(clients[k].train_set.len());
            survivors.push(outcome);
        }
        if uploaded.is_empty() {
            return Err(Error::RoundAbort(format!(
                "round {round}: every client dropped"
            )));
        }

        let average = weighted_average(&uploaded, &counts)?;
        let tuned = server_fine_tune(
            &average,
            &server,
            config.ft_mode,
            &template,
            config.server_opt(),
        )?;
        server.params = tuned.broadcast.clone();

        let prediction_model = template.with_params(&tuned.prediction)?;
        let (pred_val_acc, pred_val_loss) = evaluate(&prediction_model, &server.validation_set)?;
        let (pred_test_acc, _) = evaluate(&prediction_model, &server.test_set)?;

        let n = survivors.len() as f64;
        let mean = |f: fn(&LocalOutcome) -> f64| survivors.iter().map(|o| f(o)).sum::<f64>() / n;

        rounds.push(RoundMetrics {
            round,
            global_ft_val_acc: tuned.metrics.val_acc,
            global_ft_test_acc: tuned.metrics.test_acc,
            global_ft_val_loss: tuned.metrics.val_loss,
            pred_test_acc,
            pred_val_acc,
            pred_val_loss,
            avg_local_train_acc: mean(|o| o.train_acc),
            avg_local_test_acc: mean(|o| o.test_acc),
            avg_local_train_loss: mean(|o| o.train_loss),
            avg_local_train_time_s: mean(|o| o.train_time_s),
            comm_time_s: round_started.elapsed().as_secs_f64(),
        });

        broadcast = tuned.broadcast;
    }
    Ok(rounds)
}

fn round_abort(round: usize, stage: &str, e: Error) -> Error {
    Error::RoundAbort(format!("round {round}: {stage}: {e}"))
}
