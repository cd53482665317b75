//! Dataset construction and preprocessing: synthetic blob generation, CSV
//! ingestion, scalers, PCA, splitting, device partitioning, and class
//! balancing. All transformations are pure and seeded.

mod blobs;
mod csvio;
mod pca;
mod scaler;
mod split;

pub use blobs::generate_blobs;
pub use csvio::{label_encode, load_csv, save_csv};
pub use pca::{pca_fit, pca_inverse, pca_transform, PcaModel};
pub use scaler::{scaler_fit, scaler_inverse, scaler_transform, ScalerKind, ScalerParams};
pub use split::{balance_classes, partition, train_test_split, PartitionPlan};

use crate::error::{Error, Result};

/// A feature matrix with integer class labels in `[0, num_classes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let width = features.first().map_or(0, Vec::len);
        if features.iter().any(|row| row.len() != width) {
            return Err(Error::DimensionMismatch(
                "feature rows have unequal lengths".to_string(),
            ));
        }
        Ok(LabeledDataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Highest label + 1.
    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.features
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }

    /// Materialize the rows at `indices` (duplicates allowed, order kept).
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Replace the feature matrix (e.g. after scaling or PCA), keeping labels.
    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<LabeledDataset> {
        LabeledDataset::new(features, self.labels.clone())
    }

    /// Per-class sample counts, indexed by label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes()];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }
}
