//! Sample-weighted federated averaging.

use crate::error::{Error, Result};

/// Coordinate-wise weighted mean with weights `counts[k] / sum(counts)`.
pub fn weighted_average(params_list: &[Vec<f64>], counts: &[usize]) -> Result<Vec<f64>> {
    if params_list.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if params_list.len() != counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameter vectors but {} counts",
            params_list.len(),
            counts.len()
        )));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::DimensionMismatch("counts must be positive".into()));
    }
    let dim = params_list[0].len();
    if params_list.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch(
            "parameter vectors have unequal lengths".into(),
        ));
    }
    let total: f64 = counts.iter().map(|&c| c as f64).sum();
    let mut out = vec![0.0; dim];
    for (params, &count) in params_list.iter().zip(counts) {
        let weight = count as f64 / total;
        for (acc, &x) in out.iter_mut().zip(params) {
            *acc += weight * x;
        }
    }
    Ok(out)
}
