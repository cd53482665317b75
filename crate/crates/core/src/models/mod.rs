//! Quantum classifiers: a layered VQC and a convolution/pooling-style QCNN,
//! both read out as class probabilities from the exact final state.
//!
//! Features must arrive pre-scaled into `[-pi, pi]`; the data pipeline's
//! min-max scaler provides that.

mod qcnn;
mod vqc;

pub use qcnn::QcnnModel;
pub use vqc::VqcModel;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::optim::{minimize, ObjectiveTrace, OptimizerConfig};
use crate::quantum::Gate;

/// Probability floor inside the cross-entropy log.
const LOG_EPS: f64 = 1e-12;

/// Angle-encode a feature vector: one `RY(x_i)` on qubit `i`.
pub fn encode_features(x: &[f64]) -> Vec<Gate> {
    x.iter()
        .enumerate()
        .map(|(qubit, &angle)| Gate::Ry { qubit, angle })
        .collect()
}

/// Common surface of the trainable classifiers. Parameters travel separately
/// from the architecture so federated rounds can swap them in and out.
pub trait Classifier: Clone + Send + Sync {
    fn num_features(&self) -> usize;
    fn num_classes(&self) -> usize;
    fn num_params(&self) -> usize;
    fn params(&self) -> &[f64];
    fn with_params(&self, params: &[f64]) -> Result<Self>;

    /// Class probabilities for one sample; a probability simplex point.
    fn class_probabilities(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Argmax class with ties broken toward the lowest class id.
pub fn predict<M: Classifier>(model: &M, x: &[f64]) -> Result<usize> {
    let probs = model.class_probabilities(x)?;
    let mut best = 0;
    for (c, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = c;
        }
    }
    Ok(best)
}

/// Mean negative log-probability of the true class.
pub fn cross_entropy_loss<M: Classifier>(model: &M, data: &LabeledDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for (x, label) in data.rows() {
        let probs = model.class_probabilities(x)?;
        if label >= probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "label {label} out of range for {} classes",
                probs.len()
            )));
        }
        total -= (probs[label] + LOG_EPS).ln();
    }
    Ok(total / data.len() as f64)
}

/// Fraction of correct predictions plus the cross-entropy loss.
pub fn evaluate<M: Classifier>(model: &M, data: &LabeledDataset) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0usize;
    for (x, label) in data.rows() {
        if predict(model, x)? == label {
            correct += 1;
        }
    }
    let loss = cross_entropy_loss(model, data)?;
    Ok((correct as f64 / data.len() as f64, loss))
}

/// Minimize the model's loss on `data`, starting from its current
/// parameters. Returns the trained parameters and the optimizer trace.
pub fn train<M: Classifier>(
    model: &M,
    data: &LabeledDataset,
    opt: &OptimizerConfig,
) -> Result<(Vec<f64>, ObjectiveTrace)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.num_features() != model.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "model expects {} feature(s), dataset has {}",
            model.num_features(),
            data.num_features()
        )));
    }
    let template = model.clone();
    let objective = move |params: &[f64]| -> f64 {
        match template.with_params(params) {
            Ok(candidate) => cross_entropy_loss(&candidate, data).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    minimize(objective, model.params(), opt)
}

/// Sum basis-state probabilities into `num_classes` buckets by
/// `index mod num_classes`.
pub(crate) fn mod_class_readout(basis_probs: &[f64], num_classes: usize) -> Vec<f64> {
    let mut out = vec![0.0; num_classes];
    for (index, p) in basis_probs.iter().enumerate() {
        out[index % num_classes] += p;
    }
    out
}
