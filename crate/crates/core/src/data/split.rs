//! Device partitioning, class balancing, and train/test splitting.

use rand::seq::SliceRandom;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng;

/// Disjoint index sets: one shard per device plus the server holdouts.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub shards: Vec<Vec<usize>>,
    pub server_val: Vec<usize>,
    pub server_test: Vec<usize>,
}

/// Uniformly shuffle indices, peel off the server validation and test
/// holdouts, then deal the rest into `devices` near-equal shards (the
/// remainder goes one sample each to the first shards).
pub fn partition(
    data: &LabeledDataset,
    devices: usize,
    server_val_count: usize,
    server_test_count: usize,
    seed: u64,
) -> Result<PartitionPlan> {
    if devices == 0 {
        return Err(Error::invalid_config("devices", "need at least 1 device"));
    }
    let holdout = server_val_count + server_test_count;
    if data.len() < holdout + devices {
        return Err(Error::invalid_config(
            "data",
            format!(
                "{} samples cannot cover {} holdouts plus {} devices",
                data.len(),
                holdout,
                devices
            ),
        ));
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    let mut generator = rng::stream(seed, "partition", &[]);
    indices.shuffle(&mut generator);

    let server_val = indices[..server_val_count].to_vec();
    let server_test = indices[server_val_count..holdout].to_vec();
    let rest = &indices[holdout..];

    let base = rest.len() / devices;
    let extra = rest.len() % devices;
    let mut shards = Vec::with_capacity(devices);
    let mut cursor = 0;
    for device in 0..devices {
        let size = base + usize::from(device < extra);
        shards.push(rest[cursor..cursor + size].to_vec());
        cursor += size;
    }
    Ok(PartitionPlan {
        shards,
        server_val,
        server_test,
    })
}

/// Undersample every class to the smallest class count, uniformly without
/// replacement.
pub fn balance_classes(data: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let counts = data.class_counts();
    let min_count = counts
        .iter()
        .filter(|&&c| c > 0)
        .min()
        .copied()
        .unwrap_or(0);
    let mut generator = rng::stream(seed, "balance", &[]);
    let mut selected = Vec::new();
    for class in 0..counts.len() {
        let mut members: Vec<usize> = data
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut generator);
        selected.extend_from_slice(&members[..min_count.min(members.len())]);
    }
    selected.shuffle(&mut generator);
    Ok(data.subset(&selected))
}

/// Seeded shuffle-then-cut. `train_fraction` of the rows (rounded) land in
/// the first returned set.
pub fn train_test_split(
    data: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
        return Err(Error::invalid_config(
            "train_fraction",
            "must be in (0, 1)",
        ));
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    let mut generator = rng::stream(seed, "split", &[]);
    indices.shuffle(&mut generator);
    let cut = ((data.len() as f64) * train_fraction).round() as usize;
    let cut = cut.min(data.len());
    Ok((data.subset(&indices[..cut]), data.subset(&indices[cut..])))
}
