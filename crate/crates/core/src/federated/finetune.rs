//! Server-side fine-tuning of the aggregated model on the server validation
//! set, in three flavors. The optimized copy's metrics are always reported;
//! what gets broadcast (and used for prediction) depends on the mode.

use serde::{Deserialize, Serialize};

use super::ServerState;
use crate::error::Result;
use crate::models::{evaluate, train, Classifier};
use crate::optim::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FtMode {
    /// Optimize a copy for metrics only; broadcast the untouched average.
    NoFt,
    /// Broadcast the optimized parameters.
    Ft,
    /// Broadcast the coordinate-wise mean of the optimized parameters and
    /// the untouched round average.
    FtAvg,
}

/// Validation/test performance of the optimized copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtMetrics {
    pub val_acc: f64,
    pub val_loss: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone)]
pub struct FineTuneOutcome {
    /// Sent back to the clients for the next round.
    pub broadcast: Vec<f64>,
    /// Evaluated as the "global prediction model" on the server sets.
    /// Equals `broadcast` under every mode.
    pub prediction: Vec<f64>,
    pub metrics: FtMetrics,
}

/// Fine-tune `global` on the server validation set and resolve the
/// mode-dependent broadcast. An optimizer failure degrades to no-op
/// fine-tuning with a logged warning rather than killing the round.
pub fn server_fine_tune<M: Classifier>(
    global: &[f64],
    server: &ServerState,
    mode: FtMode,
    template: &M,
    opt: &OptimizerConfig,
) -> Result<FineTuneOutcome> {
    let seeded = template.with_params(global)?;
    let optimized = match train(&seeded, &server.validation_set, opt) {
        Ok((params, _trace)) => params,
        Err(e) => {
            log::warn!("server fine-tune failed ({e}); falling back to no-ft behavior");
            global.to_vec()
        }
    };

    let tuned = template.with_params(&optimized)?;
    let (val_acc, val_loss) = evaluate(&tuned, &server.validation_set)?;
    let (test_acc, _) = evaluate(&tuned, &server.test_set)?;

    let broadcast = match mode {
        FtMode::NoFt => global.to_vec(),
        FtMode::Ft => optimized.clone(),
        FtMode::FtAvg => global
            .iter()
            .zip(&optimized)
            .map(|(g, o)| (g + o) / 2.0)
            .collect(),
    };

    Ok(FineTuneOutcome {
        prediction: broadcast.clone(),
        broadcast,
        metrics: FtMetrics {
            val_acc,
            val_loss,
            test_acc,
        },
    })
}
