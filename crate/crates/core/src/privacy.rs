//! Differential-privacy perturbation of parameter vectors: Laplace and
//! Gaussian mechanisms with calibrated scale, optional nonnegativity
//! clipping, and fixed-point rounding, applied in that order.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DpMechanism {
    Laplace,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpConfig {
    pub mechanism: DpMechanism,
    /// Privacy budget, > 0.
    pub epsilon: f64,
    /// Exception probability for the Gaussian mechanism, in (0, 1).
    #[serde(default)]
    pub delta: Option<f64>,
    /// Query sensitivity, >= 0.
    pub sensitivity: f64,
    /// Clamp noisy coordinates at zero.
    pub clip_nonnegative: bool,
    /// Optional half-away-from-zero rounding, applied after clipping.
    #[serde(default)]
    pub decimals: Option<u32>,
}

impl DpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid_config("epsilon", "must be > 0"));
        }
        if self.sensitivity < 0.0 {
            return Err(Error::invalid_config("sensitivity", "must be >= 0"));
        }
        if self.mechanism == DpMechanism::Gaussian {
            match self.delta {
                None => return Err(Error::invalid_config("delta", "required for gaussian")),
                Some(d) if !(0.0..1.0).contains(&d) || d == 0.0 => {
                    return Err(Error::invalid_config("delta", "must be in (0, 1)"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Calibrated noise scale: Laplace `b = sensitivity/epsilon`, Gaussian
/// `sigma = (sensitivity/epsilon) * sqrt(2 ln(1.25/delta))`.
pub fn noise_scale(cfg: &DpConfig) -> Result<f64> {
    cfg.validate()?;
    let base = cfg.sensitivity / cfg.epsilon;
    Ok(match cfg.mechanism {
        DpMechanism::Laplace => base,
        DpMechanism::Gaussian => {
            let delta = cfg.delta.expect("validated above");
            base * (2.0 * (1.25 / delta).ln()).sqrt()
        }
    })
}

/// Inverse-CDF Laplace sample with scale `b`.
fn sample_laplace<R: Rng>(b: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u - 0.5;
        }
    };
    -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Perturb a parameter vector coordinate-wise, then clip and round per the
/// config. Output length always equals input length.
pub fn add_noise(params: &[f64], cfg: &DpConfig, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let scale = noise_scale(cfg)?;
    let gaussian = Normal::new(0.0, scale).map_err(|e| {
        Error::invalid_config("sensitivity", format!("bad gaussian scale: {e}"))
    })?;
    let mut out: Vec<f64> = params
        .iter()
        .map(|&x| {
            x + match cfg.mechanism {
                DpMechanism::Laplace => sample_laplace(scale, rng),
                DpMechanism::Gaussian => gaussian.sample(rng),
            }
        })
        .collect();
    if cfg.clip_nonnegative {
        for x in &mut out {
            *x = x.max(0.0);
        }
    }
    if let Some(decimals) = cfg.decimals {
        out = round_params(&out, decimals);
    }
    Ok(out)
}

/// Half-away-from-zero rounding to `decimals` fractional digits.
pub fn round_params(params: &[f64], decimals: u32) -> Vec<f64> {
    let factor = 10f64.powi(decimals as i32);
    params.iter().map(|x| (x * factor).round() / factor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn laplace_cfg(epsilon: f64, sensitivity: f64) -> DpConfig {
        DpConfig {
            mechanism: DpMechanism::Laplace,
            epsilon,
            delta: None,
            sensitivity,
            clip_nonnegative: false,
            decimals: None,
        }
    }

    #[test]
    fn laplace_scale_formula() {
        assert_eq!(noise_scale(&laplace_cfg(0.5, 1.0)).unwrap(), 2.0);
        assert_eq!(noise_scale(&laplace_cfg(2.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_scale_formula() {
        let cfg = DpConfig {
            mechanism: DpMechanism::Gaussian,
            epsilon: 1.0,
            delta: Some(1e-5),
            sensitivity: 1.0,
            clip_nonnegative: false,
            decimals: None,
        };
        let sigma = noise_scale(&cfg).unwrap();
        let expected = (2.0 * (1.25 / 1e-5f64).ln()).sqrt();
        assert!((sigma - expected).abs() < 1e-12);
        assert!((sigma - 4.8448).abs() < 1e-3);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(noise_scale(&laplace_cfg(0.0, 1.0)).is_err());
        assert!(noise_scale(&laplace_cfg(-1.0, 1.0)).is_err());
        let missing_delta = DpConfig {
            mechanism: DpMechanism::Gaussian,
            delta: None,
            ..laplace_cfg(1.0, 1.0)
        };
        assert!(noise_scale(&missing_delta).is_err());
    }

    #[test]
    fn zero_sensitivity_is_identity() {
        let mut generator = rng::stream(1, "dp-test", &[]);
        let params = vec![0.25, -1.5, 3.75];
        let out = add_noise(&params, &laplace_cfg(1.0, 0.0), &mut generator).unwrap();
        assert_eq!(out, params);
    }

    #[test]
    fn clipping_clamps_at_zero() {
        let mut generator = rng::stream(2, "dp-test", &[]);
        let cfg = DpConfig {
            clip_nonnegative: true,
            ..laplace_cfg(1.0, 0.0)
        };
        let out = add_noise(&[-1.0, 2.0], &cfg, &mut generator).unwrap();
        assert_eq!(out, vec![0.0, 2.0]);

        let noisy_cfg = DpConfig {
            clip_nonnegative: true,
            ..laplace_cfg(0.5, 1.0)
        };
        for _ in 0..200 {
            let out = add_noise(&[-0.5, 0.1, 2.0], &noisy_cfg, &mut generator).unwrap();
            assert!(out.iter().all(|&x| x >= 0.0));
            assert_eq!(out.len(), 3);
        }
    }

    #[test]
    fn laplace_moments_match() {
        // Var(Laplace(b)) = 2 b^2.
        let b = 2.0;
        let mut generator = rng::stream(3, "dp-test", &[]);
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|_| sample_laplace(b, &mut generator)).collect();
        let mean: f64 = samples.iter().sum::<f64>() / n as f64;
        let var: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 0.05 * b, "mean = {mean}");
        assert!((var - 2.0 * b * b).abs() <= 0.05 * 2.0 * b * b, "var = {var}");
    }

    #[test]
    fn gaussian_variance_matches() {
        let cfg = DpConfig {
            mechanism: DpMechanism::Gaussian,
            epsilon: 1.0,
            delta: Some(1e-5),
            sensitivity: 1.0,
            clip_nonnegative: false,
            decimals: None,
        };
        let sigma = noise_scale(&cfg).unwrap();
        let mut generator = rng::stream(4, "dp-test", &[]);
        let n = 100_000;
        let zeros = vec![0.0];
        let samples: Vec<f64> = (0..n)
            .map(|_| add_noise(&zeros, &cfg, &mut generator).unwrap()[0])
            .collect();
        let mean: f64 = samples.iter().sum::<f64>() / n as f64;
        let var: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - sigma * sigma).abs() <= 0.05 * sigma * sigma, "var = {var}");
    }

    #[test]
    fn rounding_rules() {
        assert_eq!(round_params(&[1.23456], 2), vec![1.23]);
        assert_eq!(round_params(&[-0.005], 2), vec![-0.01]);
        let values = vec![0.1234567890123, -2.71828];
        for (a, b) in round_params(&values, 15).iter().zip(&values) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn scale_decreases_with_epsilon() {
        let mut previous = f64::INFINITY;
        for epsilon in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let scale = noise_scale(&laplace_cfg(epsilon, 1.0)).unwrap();
            assert!(scale < previous);
            previous = scale;
        }
    }
}
