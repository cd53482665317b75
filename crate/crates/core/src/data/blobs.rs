//! Synthetic class-blob generation: one isotropic unit-variance Gaussian
//! cluster per class, used as the desk-scale stand-in for real sensor data.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng;

/// Cluster centers with adjacent pairwise distance `separation`: spaced on a
/// line for one feature, on a circle in the first two features otherwise.
/// The circle is rotated an eighth turn so no class sits axis-aligned and
/// every feature carries signal.
fn class_centers(n_classes: usize, n_features: usize, separation: f64) -> Vec<Vec<f64>> {
    (0..n_classes)
        .map(|c| {
            let mut center = vec![0.0; n_features];
            if n_features == 1 {
                center[0] = separation * c as f64;
            } else if n_classes > 1 {
                let theta = 2.0 * std::f64::consts::PI * c as f64 / n_classes as f64
                    + std::f64::consts::FRAC_PI_4;
                let radius = separation / (2.0 * (std::f64::consts::PI / n_classes as f64).sin());
                center[0] = radius * theta.cos();
                center[1] = radius * theta.sin();
            }
            center
        })
        .collect()
}

/// Largest-remainder allocation of `n` samples over `weights`.
fn allocate_counts(n: usize, weights: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut shortfall = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in &order {
        if shortfall == 0 {
            break;
        }
        counts[i] += 1;
        shortfall -= 1;
    }
    counts
}

/// Generate `n_samples` points in `n_features` dimensions, one Gaussian blob
/// per class, label proportions following `class_weights` (which must sum to
/// 1 within 1e-9).
pub fn generate_blobs(
    n_samples: usize,
    n_features: usize,
    n_classes: usize,
    class_separation: f64,
    class_weights: &[f64],
    seed: u64,
) -> Result<LabeledDataset> {
    if n_classes < 2 {
        return Err(Error::invalid_config("n_classes", "need at least 2 classes"));
    }
    if n_features == 0 {
        return Err(Error::invalid_config("n_features", "need at least 1 feature"));
    }
    if class_weights.len() != n_classes {
        return Err(Error::invalid_config(
            "class_weights",
            format!("{} weights for {} classes", class_weights.len(), n_classes),
        ));
    }
    if class_weights.iter().any(|w| *w < 0.0) {
        return Err(Error::invalid_config("class_weights", "weights must be >= 0"));
    }
    let total: f64 = class_weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid_config(
            "class_weights",
            format!("weights sum to {total}, expected 1"),
        ));
    }

    let centers = class_centers(n_classes, n_features, class_separation);
    let counts = allocate_counts(n_samples, class_weights);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut generator = rng::stream(seed, "blobs", &[]);

    let mut features = Vec::with_capacity(n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    for (class, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let row: Vec<f64> = centers[class]
                .iter()
                .map(|c| c + normal.sample(&mut generator))
                .collect();
            features.push(row);
            labels.push(class);
        }
    }
    // Interleave classes so shard prefixes are not single-class.
    let mut order: Vec<usize> = (0..features.len()).collect();
    for i in (1..order.len()).rev() {
        let j = generator.random_range(0..=i);
        order.swap(i, j);
    }
    let dataset = LabeledDataset::new(features, labels)?;
    Ok(dataset.subset(&order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_weights_split_evenly() {
        let ds = generate_blobs(100, 2, 2, 3.0, &[0.5, 0.5], 1).unwrap();
        assert_eq!(ds.class_counts(), vec![50, 50]);
    }

    #[test]
    fn skewed_weights_follow_proportions() {
        let ds = generate_blobs(1000, 3, 2, 3.0, &[0.9, 0.1], 2).unwrap();
        assert_eq!(ds.class_counts(), vec![900, 100]);
    }

    #[test]
    fn zero_separation_shares_center() {
        let ds = generate_blobs(400, 2, 2, 0.0, &[0.5, 0.5], 3).unwrap();
        // Class means should coincide near the origin within sampling noise.
        let mean = |class: usize, dim: usize| {
            let rows: Vec<&[f64]> = ds
                .rows()
                .filter(|(_, l)| *l == class)
                .map(|(r, _)| r)
                .collect();
            rows.iter().map(|r| r[dim]).sum::<f64>() / rows.len() as f64
        };
        for dim in 0..2 {
            assert!((mean(0, dim) - mean(1, dim)).abs() < 0.5);
        }
    }

    #[test]
    fn separation_is_center_distance() {
        let centers = class_centers(2, 2, 4.0);
        let d: f64 = centers[0]
            .iter()
            .zip(&centers[1])
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((d - 4.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(generate_blobs(10, 2, 2, 1.0, &[0.7, 0.7], 1).is_err());
        assert!(generate_blobs(10, 2, 2, 1.0, &[1.0], 1).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_blobs(50, 2, 2, 2.0, &[0.5, 0.5], 9).unwrap();
        let b = generate_blobs(50, 2, 2, 2.0, &[0.5, 0.5], 9).unwrap();
        assert_eq!(a, b);
    }
}
