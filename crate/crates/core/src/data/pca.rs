//! Principal component analysis backed by a cyclic Jacobi eigensolver on the
//! sample covariance. Dependency-free and exact enough at desk scale (the
//! pipeline caps out well under 64 features).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Top-k eigenvectors of the covariance, one row per component,
    /// pairwise orthonormal, sorted by eigenvalue descending.
    pub components: Vec<Vec<f64>>,
    /// Matching eigenvalues, non-increasing.
    pub explained_variance: Vec<f64>,
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Diagonalize a symmetric matrix with cyclic Jacobi rotations. Returns
/// (eigenvalues, eigenvectors as columns of V), unsorted.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() < JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < JACOBI_TOL / (n as f64) {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i][i]).collect();
    (eigenvalues, v)
}

/// Fit PCA with `k` components on the rows of `data`.
pub fn pca_fit(rows: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    if rows.len() < 2 {
        return Err(Error::invalid_config("pca", "need at least 2 samples"));
    }
    let d = rows[0].len();
    if k == 0 || k > d {
        return Err(Error::invalid_config(
            "pca_k",
            format!("k = {k} out of range for {d} feature(s)"),
        ));
    }
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let mut covariance = vec![vec![0.0; d]; d];
    for row in rows {
        for i in 0..d {
            let xi = row[i] - mean[i];
            for j in i..d {
                covariance[i][j] += xi * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            covariance[i][j] /= n - 1.0;
            covariance[j][i] = covariance[i][j];
        }
    }

    let (eigenvalues, vectors) = jacobi_eigen(covariance);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].partial_cmp(&eigenvalues[a]).unwrap());

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let mut component: Vec<f64> = (0..d).map(|row| vectors[row][idx]).collect();
        // Deterministic sign: largest-magnitude entry made positive.
        let lead = component
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if component[lead] < 0.0 {
            for x in &mut component {
                *x = -*x;
            }
        }
        components.push(component);
        explained_variance.push(eigenvalues[idx]);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

/// Project centered rows onto the fitted components.
pub fn pca_transform(rows: &[Vec<f64>], model: &PcaModel) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            model
                .components
                .iter()
                .map(|comp| {
                    comp.iter()
                        .zip(row.iter().zip(&model.mean))
                        .map(|(c, (x, m))| c * (x - m))
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Map projected rows back to the original space (exact when k = d).
pub fn pca_inverse(rows: &[Vec<f64>], model: &PcaModel) -> Vec<Vec<f64>> {
    let d = model.mean.len();
    rows.iter()
        .map(|row| {
            let mut out = model.mean.clone();
            for (weight, comp) in row.iter().zip(&model.components) {
                for j in 0..d {
                    out[j] += weight * comp[j];
                }
            }
            out
        })
        .collect()
}
