//! Per-feature scalers: standardization and min-max range mapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalerKind {
    Standard,
    MinMax,
}

/// Fitted per-feature statistics. `lo`/`hi` are the MinMax output range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub kind: ScalerKind,
    /// Means (Standard) or minima (MinMax), one per feature.
    pub center: Vec<f64>,
    /// Population standard deviations (Standard) or maxima (MinMax).
    pub spread: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

pub fn scaler_fit(rows: &[Vec<f64>], kind: ScalerKind, range: (f64, f64)) -> Result<ScalerParams> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let width = rows[0].len();
    let n = rows.len() as f64;
    let (center, spread) = match kind {
        ScalerKind::Standard => {
            let mut means = vec![0.0; width];
            for row in rows {
                for (m, x) in means.iter_mut().zip(row) {
                    *m += x;
                }
            }
            for m in &mut means {
                *m /= n;
            }
            let mut vars = vec![0.0; width];
            for row in rows {
                for ((v, x), m) in vars.iter_mut().zip(row).zip(&means) {
                    *v += (x - m) * (x - m);
                }
            }
            let stds: Vec<f64> = vars.iter().map(|v| (v / n).sqrt()).collect();
            (means, stds)
        }
        ScalerKind::MinMax => {
            let mut mins = rows[0].clone();
            let mut maxs = rows[0].clone();
            for row in rows {
                for ((lo, hi), x) in mins.iter_mut().zip(maxs.iter_mut()).zip(row) {
                    *lo = lo.min(*x);
                    *hi = hi.max(*x);
                }
            }
            (mins, maxs)
        }
    };
    Ok(ScalerParams {
        kind,
        center,
        spread,
        lo: range.0,
        hi: range.1,
    })
}

/// Apply the fitted scaler. Degenerate features (zero std, or min == max)
/// map to 0 for Standard and to the range midpoint for MinMax.
pub fn scaler_transform(rows: &[Vec<f64>], params: &ScalerParams) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &x)| match params.kind {
                    ScalerKind::Standard => {
                        if params.spread[j] == 0.0 {
                            0.0
                        } else {
                            (x - params.center[j]) / params.spread[j]
                        }
                    }
                    ScalerKind::MinMax => {
                        let width = params.spread[j] - params.center[j];
                        if width == 0.0 {
                            (params.lo + params.hi) / 2.0
                        } else {
                            (x - params.center[j]) / width * (params.hi - params.lo) + params.lo
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Invert the scaler on non-degenerate features.
pub fn scaler_inverse(rows: &[Vec<f64>], params: &ScalerParams) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &y)| match params.kind {
                    ScalerKind::Standard => y * params.spread[j] + params.center[j],
                    ScalerKind::MinMax => {
                        let width = params.spread[j] - params.center[j];
                        (y - params.lo) / (params.hi - params.lo) * width + params.center[j]
                    }
                })
                .collect()
        })
        .collect()
}
