//! Declarative experiment configuration. Parsed from TOML by the CLI;
//! unknown keys are rejected so a typo cannot silently change an experiment.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::data::ScalerKind;
use crate::error::{Error, Result};
use crate::federated::{CipherKind, FtMode, QkdLinkConfig};
use crate::optim::OptimizerConfig;
use crate::privacy::{DpConfig, DpMechanism};
use crate::qkd::ChannelConfig;
use crate::quantum::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Vqc,
    Qcnn,
}

/// `devices = 10` or `devices = [3, 10]` for a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviceCount {
    Single(usize),
    Sweep(Vec<usize>),
}

impl DeviceCount {
    pub fn counts(&self) -> Vec<usize> {
        match self {
            DeviceCount::Single(k) => vec![*k],
            DeviceCount::Sweep(ks) => ks.clone(),
        }
    }

    pub fn single(&self) -> Option<usize> {
        match self {
            DeviceCount::Single(k) => Some(*k),
            DeviceCount::Sweep(ks) if ks.len() == 1 => Some(ks[0]),
            DeviceCount::Sweep(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Blobs,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub source: DataSource,
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_two")]
    pub n_features: usize,
    #[serde(default = "default_two")]
    pub n_classes: usize,
    #[serde(default = "default_separation")]
    pub class_separation: f64,
    /// Defaults to uniform proportions.
    #[serde(default)]
    pub class_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    /// Absent means no scaler before the encoding range map.
    #[serde(default)]
    pub scaler: Option<ScalerKind>,
    #[serde(default)]
    pub pca_k: Option<usize>,
    #[serde(default)]
    pub balance: bool,
    pub server_val_count: usize,
    pub server_test_count: usize,
    #[serde(default = "default_local_test_fraction")]
    pub local_test_fraction: f64,
}

fn default_n_samples() -> usize {
    300
}
fn default_two() -> usize {
    2
}
fn default_separation() -> f64 {
    4.0
}
fn default_local_test_fraction() -> f64 {
    0.2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecurityConfig {
    pub dp_enabled: bool,
    #[serde(default = "default_mechanism")]
    pub mechanism: DpMechanism,
    #[serde(default = "default_one")]
    pub epsilon: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_one")]
    pub sensitivity: f64,
    #[serde(default = "default_true")]
    pub clip_nonnegative: bool,
    /// Optional rounding inside the DP mechanism, separate from the wire
    /// precision below.
    #[serde(default)]
    pub dp_decimals: Option<u32>,
    pub qkd_enabled: bool,
    #[serde(default = "default_cipher")]
    pub cipher: CipherKind,
    #[serde(default)]
    pub flip_probability: f64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub n_allowed: usize,
    #[serde(default = "default_wire_decimals")]
    pub wire_decimals: u32,
}

fn default_mechanism() -> DpMechanism {
    DpMechanism::Laplace
}
fn default_one() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_cipher() -> CipherKind {
    CipherKind::Shift256
}
fn default_test_fraction() -> f64 {
    0.125
}
fn default_wire_decimals() -> u32 {
    12
}

impl SecurityConfig {
    pub fn dp_config(&self) -> Option<DpConfig> {
        self.dp_enabled.then(|| DpConfig {
            mechanism: self.mechanism,
            epsilon: self.epsilon,
            delta: self.delta,
            sensitivity: self.sensitivity,
            clip_nonnegative: self.clip_nonnegative,
            decimals: self.dp_decimals,
        })
    }

    pub fn qkd_link(&self) -> Option<QkdLinkConfig> {
        self.qkd_enabled.then(|| QkdLinkConfig {
            cipher: self.cipher,
            channel: ChannelConfig {
                flip_probability: self.flip_probability,
            },
            test_fraction: self.test_fraction,
            n_allowed: self.n_allowed,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub num_qubits: usize,
    #[serde(default = "default_one_usize")]
    pub num_layers: usize,
    pub num_classes: usize,
    pub devices: DeviceCount,
    pub rounds: usize,
    pub root_seed: u64,
    /// Metrics CSV destination; sweeps suffix `_k<devices>` onto the stem.
    pub output: PathBuf,
    pub ft_mode: FtMode,
    pub optimizer: OptimizerConfig,
    /// Optional override for server-side fine-tuning; defaults to the local
    /// optimizer settings.
    #[serde(default)]
    pub server_optimizer: Option<OptimizerConfig>,
    pub security: SecurityConfig,
    pub data: DataConfig,
}

fn default_one_usize() -> usize {
    1
}

impl ExperimentConfig {
    /// Parse a TOML document. Unknown keys are an error.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid_config("config", e.to_string()))
    }

    /// Read and parse a config file.
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn server_opt(&self) -> &OptimizerConfig {
        self.server_optimizer.as_ref().unwrap_or(&self.optimizer)
    }

    /// Structural validation shared by the engine and the CLI. Permits
    /// `rounds = 0` (an empty experiment); the CLI adds the stricter check.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > MAX_QUBITS {
            return Err(Error::invalid_config(
                "num_qubits",
                format!("must be in 1..={MAX_QUBITS}"),
            ));
        }
        if self.num_classes < 2 || self.num_classes > (1 << self.num_qubits) {
            return Err(Error::invalid_config(
                "num_classes",
                format!(
                    "{} classes cannot be read out from {} qubit(s)",
                    self.num_classes, self.num_qubits
                ),
            ));
        }
        match self.model {
            ModelKind::Vqc => {
                if self.num_layers == 0 {
                    return Err(Error::invalid_config("num_layers", "must be >= 1"));
                }
            }
            ModelKind::Qcnn => {
                if !self.num_qubits.is_power_of_two() {
                    return Err(Error::invalid_config(
                        "num_qubits",
                        "qcnn needs a power-of-two register",
                    ));
                }
                if self.num_classes != 2 {
                    return Err(Error::invalid_config("num_classes", "qcnn is binary"));
                }
            }
        }
        let counts = self.devices.counts();
        if counts.is_empty() || counts.iter().any(|&k| k == 0) {
            return Err(Error::invalid_config("devices", "every count must be >= 1"));
        }
        self.optimizer.validate()?;
        if let Some(server_opt) = &self.server_optimizer {
            server_opt.validate()?;
        }
        self.validate_security()?;
        self.validate_data()
    }

    /// Full validation for `run`: everything above plus `rounds >= 1`.
    pub fn validate_for_run(&self) -> Result<()> {
        self.validate()?;
        if self.rounds == 0 {
            return Err(Error::invalid_config("rounds", "must be >= 1"));
        }
        Ok(())
    }

    fn validate_security(&self) -> Result<()> {
        let sec = &self.security;
        if let Some(dp) = sec.dp_config() {
            dp.validate()?;
        }
        if !(1..=17).contains(&sec.wire_decimals) {
            return Err(Error::invalid_config("wire_decimals", "must be in 1..=17"));
        }
        if sec.qkd_enabled {
            if !(0.0..=1.0).contains(&sec.flip_probability) {
                return Err(Error::invalid_config("flip_probability", "must be in [0, 1]"));
            }
            if !(0.0..1.0).contains(&sec.test_fraction) || sec.test_fraction == 0.0 {
                return Err(Error::invalid_config("test_fraction", "must be in (0, 1)"));
            }
        }
        Ok(())
    }

    fn validate_data(&self) -> Result<()> {
        let data = &self.data;
        match data.source {
            DataSource::Csv => {
                if data.csv_path.is_none() {
                    return Err(Error::invalid_config("csv_path", "required for source = csv"));
                }
            }
            DataSource::Blobs => {
                if data.n_classes != self.num_classes {
                    return Err(Error::invalid_config(
                        "n_classes",
                        format!(
                            "blob classes ({}) must match num_classes ({})",
                            data.n_classes, self.num_classes
                        ),
                    ));
                }
                if let Some(weights) = &data.class_weights {
                    if weights.len() != data.n_classes {
                        return Err(Error::invalid_config(
                            "class_weights",
                            format!(
                                "{} weights for {} classes",
                                weights.len(),
                                data.n_classes
                            ),
                        ));
                    }
                }
                // Feature width after optional PCA must land on the register.
                let final_width = data.pca_k.unwrap_or(data.n_features);
                if final_width != self.num_qubits {
                    return Err(Error::invalid_config(
                        "num_qubits",
                        format!(
                            "encoded feature count {final_width} must equal num_qubits {}",
                            self.num_qubits
                        ),
                    ));
                }
            }
        }
        if let Some(k) = data.pca_k {
            if k == 0 {
                return Err(Error::invalid_config("pca_k", "must be >= 1"));
            }
        }
        if data.server_val_count == 0 || data.server_test_count == 0 {
            return Err(Error::invalid_config(
                "server_val_count",
                "server validation and test sets must be nonempty",
            ));
        }
        if !(0.0..1.0).contains(&data.local_test_fraction) || data.local_test_fraction == 0.0 {
            return Err(Error::invalid_config(
                "local_test_fraction",
                "must be in (0, 1)",
            ));
        }
        Ok(())
    }

    /// Clone with a resolved single device count (for sweep expansion).
    pub fn with_devices(&self, devices: usize) -> ExperimentConfig {
        ExperimentConfig {
            devices: DeviceCount::Single(devices),
            ..self.clone()
        }
    }
}

/// Shared fixture for unit tests across the crate.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::ExperimentConfig;

    pub(crate) fn minimal_config() -> ExperimentConfig {
        toml::from_str(super::tests::minimal_toml()).expect("fixture parses")
    }
}
